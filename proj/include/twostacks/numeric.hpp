#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <iomanip>
#include <sstream>
#include <string>

namespace twostacks {

using Integer = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;
// 50 decimal digits; enough headroom for the cancellation in r_n - r_{n-1}.
using Real = boost::multiprecision::mpfr_float_50;

inline Real to_real(const Rational& q) { return Real(q); }
inline Real to_real(const Integer& z) { return Real(z); }

/// Scientific notation with 16 significant digits, the format used by every
/// CSV the tools write.
inline std::string format_sci(const Real& x) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(15) << x;
  return os.str();
}

inline std::string format_sci(double x) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(15) << x;
  return os.str();
}

}  // namespace twostacks
