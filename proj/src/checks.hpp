#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace twostacks::checks {

struct CheckOptions {
  std::size_t workers = 1;
  /// Largest n recomputed by the exact-coefficient check.
  std::size_t max_n = 11;
};

struct CheckResult {
  bool passed = false;
  std::string detail;
};

struct Check {
  int criterion;
  std::string_view fixture;
  std::string_view summary;
  CheckResult (*run)(const CheckOptions&);
};

/// Every golden-data check, in criterion order.
std::span<const Check> all_checks();

/// nullptr when no check has this fixture name.
const Check* find_check(std::string_view fixture);

}  // namespace twostacks::checks
