#pragma once

#include "twostacks/error.hpp"
#include "twostacks/estimate_table.hpp"
#include "twostacks/linear_solve.hpp"
#include "twostacks/numeric.hpp"
#include "twostacks/series.hpp"

#include <algorithm>
#include <atomic>
#include <compare>
#include <exception>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace twostacks {

/// Shape of an inhomogeneous linear ODE
///   sum_{i=0..order} Q_i(z) (z d/dz)^i F(z) = P(z)
/// given by the degrees of Q_0..Q_order and of P (-1 for P = 0).
struct DAConfig {
  int order = 0;
  std::vector<int> q_degrees;
  int p_degree = -1;

  /// Number of polynomial coefficients, before normalisation.
  std::size_t unknowns() const {
    std::size_t u = static_cast<std::size_t>(p_degree + 1);
    for (int d : q_degrees) u += static_cast<std::size_t>(d + 1);
    return u;
  }

  /// Series coefficients the fit consumes; one fewer than the unknowns since
  /// one coefficient is fixed to 1.
  std::size_t coefficients_used() const { return unknowns() - 1; }

  bool is_valid() const {
    if (order < 1 || q_degrees.size() != static_cast<std::size_t>(order) + 1 || p_degree < -1) return false;
    return std::all_of(q_degrees.begin(), q_degrees.end(), [](int d) { return d >= 0; });
  }

  auto operator<=>(const DAConfig&) const = default;
  bool operator==(const DAConfig&) const = default;
};

inline std::string to_string(const DAConfig& c) {
  std::string s = "M=" + std::to_string(c.order) + " Q=[";
  for (std::size_t i = 0; i < c.q_degrees.size(); ++i) s += (i ? "," : "") + std::to_string(c.q_degrees[i]);
  return s + "] P=" + std::to_string(c.p_degree);
}

struct DifferentialApproximant {
  DAConfig config;
  std::vector<std::vector<Rational>> q;  // q[i][j]: coefficient of z^j in Q_i
  std::vector<Rational> p;
  std::size_t fitted_upto = 0;           // last series index reproduced
  std::vector<Rational> known;           // the fitted coefficients a_0..a_{fitted_upto}

  /// Coefficient multiplying a_k in the recurrence: sum_i q_{i,0} k^i.
  Rational leading_factor(std::size_t k) const {
    Rational acc = 0;
    Rational power = 1;
    for (std::size_t i = 0; i < q.size(); ++i) {
      acc += q[i][0] * power;
      power *= Rational(static_cast<long>(k));
    }
    return acc;
  }
};

namespace detail {

// (k - j)^i as an integer, with 0^0 = 1.
inline Integer theta_weight(long base, int power) {
  Integer r = 1;
  for (int e = 0; e < power; ++e) r *= base;
  return r;
}

// sum over (i, j), j >= first_j, of q_{i,j} (k - j)^i a_{k-j}.
inline Rational relation_sum(const DifferentialApproximant& da, const std::vector<Rational>& a, std::size_t k,
                             int first_j) {
  Rational acc = 0;
  for (std::size_t i = 0; i < da.q.size(); ++i) {
    for (std::size_t j = static_cast<std::size_t>(first_j); j < da.q[i].size() && j <= k; ++j) {
      if (da.q[i][j] == 0) continue;
      acc += da.q[i][j] * Rational(theta_weight(static_cast<long>(k - j), static_cast<int>(i))) * a[k - j];
    }
  }
  return acc;
}

inline std::optional<DifferentialApproximant> try_fit(const std::vector<Integer>& a, const DAConfig& cfg,
                                                      std::size_t normalised, bool allow_rank_deficient) {
  const std::size_t big_n = a.size() - 1;
  struct Unknown {
    std::size_t i, j;
  };
  std::vector<Unknown> free;
  for (std::size_t i = 0; i <= static_cast<std::size_t>(cfg.order); ++i)
    for (std::size_t j = 0; j <= static_cast<std::size_t>(cfg.q_degrees[i]); ++j)
      if (!(i == normalised && j == 0)) free.push_back({i, j});

  // Coefficient of z^k in the relation vanishes for p_degree < k <= N.
  const std::size_t first_k = static_cast<std::size_t>(cfg.p_degree + 1);
  const std::size_t rows = big_n + 1 - first_k;
  if (rows != free.size()) return std::nullopt;

  auto coefficient = [&](std::size_t i, std::size_t j, std::size_t k) -> Integer {
    if (j > k) return Integer(0);
    return theta_weight(static_cast<long>(k - j), static_cast<int>(i)) * a[k - j];
  };
  IntegerMatrix m(rows, rows);
  std::vector<Integer> rhs(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t k = first_k + r;
    for (std::size_t c = 0; c < free.size(); ++c) m(r, c) = coefficient(free[c].i, free[c].j, k);
    rhs[r] = -coefficient(normalised, 0, k);
  }
  auto solution = allow_rank_deficient ? solve_consistent(m, rhs) : solve_exact(std::move(m), std::move(rhs));
  if (!solution) return std::nullopt;

  DifferentialApproximant da;
  da.config = cfg;
  da.q.resize(cfg.order + 1);
  for (int i = 0; i <= cfg.order; ++i) da.q[i].assign(cfg.q_degrees[i] + 1, Rational(0));
  da.q[normalised][0] = 1;
  for (std::size_t c = 0; c < free.size(); ++c) da.q[free[c].i][free[c].j] = (*solution)[c];
  da.fitted_upto = big_n;
  da.known.assign(a.begin(), a.end());
  da.p.resize(first_k);
  for (std::size_t k = 0; k < first_k; ++k) da.p[k] = relation_sum(da, da.known, k, 0);
  return da;
}

}  // namespace detail

/// Fits the configuration to the first cfg.coefficients_used() coefficients
/// of the series by solving the exact linear system for the polynomial
/// coefficients. The constant term of Q_order is fixed to 1, falling back to
/// the constant term of Q_{order-1}. If both systems are singular, a
/// consistent one is still accepted with its free unknowns set to 0: a
/// holonomic series makes every configuration that holds its operator
/// singular, since polynomial multiples of the operator fit as well. Throws
/// SingularFit when no normalisation gives a consistent system.
inline DifferentialApproximant fit_da(const Series& s, const DAConfig& cfg) {
  if (!cfg.is_valid()) throw Error(ErrorKind::InvalidArgument, "invalid DA configuration " + to_string(cfg));
  const std::size_t used = cfg.coefficients_used();
  if (used == 0 || s.exact.size() < used) {
    throw Error(ErrorKind::InvalidArgument, to_string(cfg) + " needs " + std::to_string(used) + " coefficients, series has " +
                                                std::to_string(s.exact.size()));
  }
  if (cfg.p_degree + 1 > static_cast<int>(used)) throw Error(ErrorKind::InvalidArgument, "P degree too large for the series");
  const std::vector<Integer> a(s.exact.begin(), s.exact.begin() + static_cast<std::ptrdiff_t>(used));
  for (bool rank_deficient : {false, true}) {
    for (int normalised : {cfg.order, cfg.order - 1}) {
      if (auto da = detail::try_fit(a, cfg, static_cast<std::size_t>(normalised), rank_deficient)) return std::move(*da);
    }
  }
  throw Error(ErrorKind::SingularFit, to_string(cfg) + " gives a singular system");
}

namespace detail {

// Extends past fitted_upto up to `count` terms; stops early at the first
// vanishing leading factor and reports the index through `breakdown`.
inline std::vector<Rational> extend(const DifferentialApproximant& da, std::size_t count,
                                    std::optional<std::size_t>* breakdown) {
  std::vector<Rational> a = da.known;
  std::vector<Rational> out;
  out.reserve(count);
  for (std::size_t step = 0; step < count; ++step) {
    const std::size_t k = da.fitted_upto + 1 + step;
    const Rational lead = da.leading_factor(k);
    if (lead == 0) {
      if (breakdown) *breakdown = k;
      break;
    }
    const Rational inhomogeneous = k < da.p.size() ? da.p[k] : Rational(0);
    a.push_back((inhomogeneous - relation_sum(da, a, k, 1)) / lead);
    out.push_back(a.back());
  }
  return out;
}

}  // namespace detail

/// The next k coefficients implied by the approximant's recurrence.
/// Throws RecurrenceBreakdown if the leading factor vanishes on the way.
inline std::vector<Rational> predict_coefficients(const DifferentialApproximant& da, std::size_t k) {
  std::optional<std::size_t> breakdown;
  auto out = detail::extend(da, k, &breakdown);
  if (breakdown) throw Error(ErrorKind::RecurrenceBreakdown, "leading factor vanishes at n = " + std::to_string(*breakdown));
  return out;
}

/// Re-expands the recurrence from a_0 alone (for exactness checks). Index k
/// of the result is a_k for k <= fitted_upto.
inline std::vector<Rational> reexpand(const DifferentialApproximant& da) {
  // Low-order coefficients are fixed by the recurrence only where the
  // leading factor is nonzero; elsewhere the fitted value is carried over.
  std::vector<Rational> a;
  for (std::size_t k = 0; k <= da.fitted_upto; ++k) {
    const Rational lead = da.leading_factor(k);
    if (lead == 0) {
      a.push_back(da.known[k]);
      continue;
    }
    const Rational inhomogeneous = k < da.p.size() ? da.p[k] : Rational(0);
    a.push_back((inhomogeneous - detail::relation_sum(da, a, k, 1)) / lead);
  }
  return a;
}

/// The approximant family for a series of `length` coefficients: every
/// degree tuple for Q_0..Q_order whose degrees differ pairwise by at most
/// `max_spread`, and every P degree in [-1, max_p_degree], that uses all
/// coefficients.
inline std::vector<DAConfig> generate_configs(int order, std::size_t length, int max_spread = 2, int max_p_degree = 4) {
  std::vector<DAConfig> out;
  for (int p = -1; p <= max_p_degree; ++p) {
    const long q_total = static_cast<long>(length) + 1 - (p + 1);  // sum of (deg + 1)
    const long deg_sum = q_total - (order + 1);
    if (deg_sum < 0) continue;
    std::vector<int> degs(order + 1);
    auto place = [&](auto&& self, int i, long remaining, int lo, int hi) -> void {
      if (i == order + 1) {
        if (remaining == 0 && hi - lo <= max_spread) out.push_back({order, degs, p});
        return;
      }
      for (int d = 0; d <= remaining; ++d) {
        const int nlo = std::min(lo, d), nhi = std::max(hi, d);
        if (nhi - nlo > max_spread) continue;
        degs[i] = d;
        self(self, i + 1, remaining - d, nlo, nhi);
      }
    };
    place(place, 0, deg_sum, 1 << 20, -1);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<DAConfig> generate_configs(std::span<const int> orders, std::size_t length) {
  std::vector<DAConfig> out;
  for (int m : orders) {
    auto part = generate_configs(m, length);
    out.insert(out.end(), part.begin(), part.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct EnsembleOptions {
  double trim = 0.10;
  std::size_t workers = 1;
  std::size_t min_survivors = 4;
};

struct EnsembleMember {
  DAConfig config;
  /// Predicted coefficients for indices series_length, series_length + 1, ...
  /// Shorter than requested when the recurrence broke down.
  std::vector<Rational> predictions;
  /// a_{series_length - 1} as seen by this approximant, for forming ratios.
  Rational last_known;
};

/// Fits every configuration (in parallel when asked) and keeps the ones that
/// fit. Results come back in configuration order regardless of scheduling.
inline std::vector<EnsembleMember> fit_ensemble(const Series& s, std::span<const DAConfig> cfgs, std::size_t k,
                                                std::size_t workers = 1) {
  const std::size_t length = s.exact.size();
  std::vector<std::optional<EnsembleMember>> slots(cfgs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < cfgs.size(); i = next.fetch_add(1)) {
      try {
        if (cfgs[i].coefficients_used() > length) continue;
        const DifferentialApproximant da = fit_da(s, cfgs[i]);
        const std::size_t needed = length + k - 1 - da.fitted_upto;
        std::optional<std::size_t> breakdown;
        std::vector<Rational> ext = detail::extend(da, needed, &breakdown);
        // ext[j] is a_{fitted_upto + 1 + j}; keep indices >= length.
        const std::size_t skip = length - 1 - da.fitted_upto;
        EnsembleMember member{cfgs[i], {}, skip == 0 ? da.known.back() : Rational(0)};
        if (ext.size() > skip) {
          if (skip > 0) member.last_known = ext[skip - 1];
          member.predictions.assign(ext.begin() + static_cast<std::ptrdiff_t>(skip), ext.end());
        }
        slots[i] = std::move(member);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::SingularFit) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);

  std::vector<EnsembleMember> members;
  for (auto& slot : slots)
    if (slot) members.push_back(std::move(*slot));
  return members;
}

namespace detail {

inline EstimateTable aggregate(const std::vector<std::vector<Real>>& per_offset, std::size_t first_n,
                               const EnsembleOptions& options) {
  EstimateTable table;
  for (std::size_t off = 0; off < per_offset.size(); ++off) {
    const auto& values = per_offset[off];
    if (values.size() < options.min_survivors) {
      throw Error(ErrorKind::EnsembleTooSmall, "only " + std::to_string(values.size()) + " approximants reach n = " +
                                                   std::to_string(first_n + off));
    }
    const TrimmedStats st = trimmed_stats(values, options.trim);
    if (st.kept < 2) throw Error(ErrorKind::EnsembleTooSmall, "trimming leaves fewer than 2 estimates");
    table.rows.push_back({first_n + off, st.mean, st.std_dev, st.kept});
  }
  return table;
}

}  // namespace detail

/// Trimmed-mean predictions of the k coefficients after the series, one
/// estimate per surviving approximant.
inline EstimateTable predict_ensemble(const Series& s, std::span<const DAConfig> cfgs, std::size_t k,
                                      const EnsembleOptions& options = {}) {
  const auto members = fit_ensemble(s, cfgs, k, options.workers);
  std::vector<std::vector<Real>> per_offset(k);
  for (const auto& m : members)
    for (std::size_t off = 0; off < m.predictions.size() && off < k; ++off)
      per_offset[off].push_back(to_real(m.predictions[off]));
  return detail::aggregate(per_offset, s.exact.size(), options);
}

/// Ratios r_n = a_n / a_{n-1} are formed inside each approximant first and
/// only then aggregated, rather than taking ratios of averaged coefficients.
inline EstimateTable predict_ratios_ensemble(const Series& s, std::span<const DAConfig> cfgs, std::size_t k,
                                             const EnsembleOptions& options = {}) {
  const auto members = fit_ensemble(s, cfgs, k, options.workers);
  std::vector<std::vector<Real>> per_offset(k);
  for (const auto& m : members) {
    Rational prev = m.last_known;
    for (std::size_t off = 0; off < m.predictions.size() && off < k; ++off) {
      if (prev == 0) break;
      per_offset[off].push_back(to_real(Rational(m.predictions[off] / prev)));
      prev = m.predictions[off];
    }
  }
  return detail::aggregate(per_offset, s.exact.size(), options);
}

}  // namespace twostacks
