#pragma once

#include "twostacks/error.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace twostacks {

/// The three machine moves. The enumerator order RHO < LAMBDA < MU is the
/// order used when comparing words lexicographically.
///   RHO    input  -> stack 1
///   LAMBDA stack 1 -> stack 2
///   MU     stack 2 -> output
enum class Letter : std::uint8_t { Rho = 0, Lambda = 1, Mu = 2 };

inline constexpr std::array<Letter, 3> kAlphabet = {Letter::Rho, Letter::Lambda, Letter::Mu};

constexpr int index(Letter l) noexcept { return static_cast<int>(l); }

/// std::vector's operator<=> is already lexicographic with a proper prefix
/// comparing less, which is exactly the order wanted for words.
using Word = std::vector<Letter>;

inline char to_ascii(Letter l) {
  switch (l) {
    case Letter::Rho: return 'r';
    case Letter::Lambda: return 'l';
    case Letter::Mu: return 'm';
  }
  return '?';
}

/// ASCII rendering: r, l, m.
inline std::string to_string(const Word& w) {
  std::string s;
  s.reserve(w.size());
  for (Letter l : w) s.push_back(to_ascii(l));
  return s;
}

/// Greek rendering for human-facing output.
inline std::string to_greek(const Word& w) {
  std::string s;
  for (Letter l : w) {
    switch (l) {
      case Letter::Rho: s += "ρ"; break;
      case Letter::Lambda: s += "λ"; break;
      case Letter::Mu: s += "μ"; break;
    }
  }
  return s;
}

/// Accepts ASCII (r/l/m, case-insensitive) and the Greek letters ρ λ μ.
inline Word parse_word(std::string_view text) {
  static constexpr std::string_view rho = "ρ", lambda = "λ", mu = "μ";
  Word w;
  for (std::size_t i = 0; i < text.size();) {
    const char c = text[i];
    if (c == 'r' || c == 'R') {
      w.push_back(Letter::Rho);
      ++i;
    } else if (c == 'l' || c == 'L') {
      w.push_back(Letter::Lambda);
      ++i;
    } else if (c == 'm' || c == 'M') {
      w.push_back(Letter::Mu);
      ++i;
    } else if (text.substr(i, rho.size()) == rho) {
      w.push_back(Letter::Rho);
      i += rho.size();
    } else if (text.substr(i, lambda.size()) == lambda) {
      w.push_back(Letter::Lambda);
      i += lambda.size();
    } else if (text.substr(i, mu.size()) == mu) {
      w.push_back(Letter::Mu);
      i += mu.size();
    } else if (c == ' ') {
      ++i;
    } else {
      throw Error(ErrorKind::InvalidAlphabet, "unexpected character in word '" + std::string(text) + "'");
    }
  }
  return w;
}

/// All 3^length words of the given length in lexicographic order.
inline std::vector<Word> all_words(std::size_t length) {
  std::vector<Word> out;
  Word w(length, Letter::Rho);
  while (true) {
    out.push_back(w);
    std::size_t i = length;
    while (i > 0 && w[i - 1] == Letter::Mu) {
      w[i - 1] = Letter::Rho;
      --i;
    }
    if (i == 0) break;
    w[i - 1] = static_cast<Letter>(index(w[i - 1]) + 1);
  }
  return out;
}

}  // namespace twostacks
