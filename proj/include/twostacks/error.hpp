#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace twostacks {

enum class ErrorKind {
  IllegalMove,
  InvalidAlphabet,
  ResourceLimit,
  SingularFit,
  RecurrenceBreakdown,
  EnsembleTooSmall,
  IndexMismatch,
  GammaPole,
  DegenerateWindow,
  FixtureUnknown,
  InputFormat,
  InvalidArgument,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::IllegalMove: return "IllegalMove";
    case ErrorKind::InvalidAlphabet: return "InvalidAlphabet";
    case ErrorKind::ResourceLimit: return "ResourceLimit";
    case ErrorKind::SingularFit: return "SingularFit";
    case ErrorKind::RecurrenceBreakdown: return "RecurrenceBreakdown";
    case ErrorKind::EnsembleTooSmall: return "EnsembleTooSmall";
    case ErrorKind::IndexMismatch: return "IndexMismatch";
    case ErrorKind::GammaPole: return "GammaPole";
    case ErrorKind::DegenerateWindow: return "DegenerateWindow";
    case ErrorKind::FixtureUnknown: return "FixtureUnknown";
    case ErrorKind::InputFormat: return "InputFormat";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace twostacks
