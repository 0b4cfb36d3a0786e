#pragma once

#include "twostacks/error.hpp"
#include "twostacks/numeric.hpp"

#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace twostacks {

struct ApproxTerm {
  Real value;
  Real std_dev;
};

/// Coefficient sequence indexed from n = 0: exact integers followed by an
/// optional tail of estimates that starts at index exact.size().
struct Series {
  std::string name;
  std::vector<Integer> exact;
  std::vector<ApproxTerm> approx_tail;

  std::size_t size() const noexcept { return exact.size() + approx_tail.size(); }

  /// Coefficient n as a float, exact or estimated.
  Real value(std::size_t n) const {
    if (n < exact.size()) return Real(exact[n]);
    return approx_tail.at(n - exact.size()).value;
  }

  Real std_dev(std::size_t n) const {
    if (n < exact.size()) return Real(0);
    return approx_tail.at(n - exact.size()).std_dev;
  }

  bool is_exact(std::size_t n) const noexcept { return n < exact.size(); }

  static Series from_integers(std::string name, const std::vector<long long>& values) {
    Series s{std::move(name), {}, {}};
    for (long long v : values) s.exact.emplace_back(v);
    return s;
  }
};

inline Integer binomial(unsigned n, unsigned k) {
  if (k > n) return Integer(0);
  Integer r = 1;
  for (unsigned i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

/// s_n = sum_{i=1..n} C(n-1, i-1) t_i and s_0 = t_0, i.e. S(x) = T(x/(1-x)).
inline Series binomial_transform(const Series& t) {
  if (t.exact.empty()) throw Error(ErrorKind::InvalidArgument, "binomial_transform of an empty series");
  Series s{t.name.empty() ? std::string() : "binomial(" + t.name + ")", {}, {}};
  s.exact.resize(t.exact.size());
  s.exact[0] = t.exact[0];
  for (std::size_t n = 1; n < t.exact.size(); ++n) {
    Integer c = 1;  // C(n-1, i-1), starting at i = 1
    Integer acc = 0;
    for (std::size_t i = 1; i <= n; ++i) {
      acc += c * t.exact[i];
      c = c * Integer(n - i) / Integer(i);
    }
    s.exact[n] = acc;
  }
  return s;
}

/// t_n = sum_{i=1..n} (-1)^{n-i} C(n-1, i-1) s_i, the inverse substitution
/// T(x) = S(x/(1+x)).
inline Series inverse_binomial_transform(const Series& s) {
  if (s.exact.empty()) throw Error(ErrorKind::InvalidArgument, "inverse_binomial_transform of an empty series");
  Series t{s.name.empty() ? std::string() : "inverse_binomial(" + s.name + ")", {}, {}};
  t.exact.resize(s.exact.size());
  t.exact[0] = s.exact[0];
  for (std::size_t n = 1; n < s.exact.size(); ++n) {
    Integer c = 1;
    Integer acc = 0;
    for (std::size_t i = 1; i <= n; ++i) {
      if ((n - i) % 2 == 0) acc += c * s.exact[i];
      else acc -= c * s.exact[i];
      c = c * Integer(n - i) / Integer(i);
    }
    t.exact[n] = acc;
  }
  return t;
}

/// Series file: one decimal integer per line, line index = n from 0.
/// Lines starting with '#' and blank lines are skipped.
inline Series read_series(std::istream& in, std::string name = {}) {
  Series s{std::move(name), {}, {}};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string token = line.substr(first, last - first + 1);
    const bool digits = token.find_first_not_of("0123456789", token[0] == '-' ? 1 : 0) == std::string::npos &&
                        token != "-";
    if (!digits) throw Error(ErrorKind::InputFormat, "line " + std::to_string(line_no) + ": '" + token + "' is not an integer");
    s.exact.emplace_back(token);
  }
  return s;
}

inline Series read_series_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InputFormat, "cannot open series file '" + path + "'");
  return read_series(in, path);
}

inline void write_series(std::ostream& out, const Series& s) {
  for (const Integer& v : s.exact) out << v << '\n';
}

}  // namespace twostacks
