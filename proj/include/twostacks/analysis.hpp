#pragma once

#include "twostacks/error.hpp"
#include "twostacks/estimate_table.hpp"
#include "twostacks/numeric.hpp"
#include "twostacks/series.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

namespace twostacks {

struct RatioRow {
  std::size_t n = 0;
  Real r;
  Real std_dev;
  bool valid = true;  // false when the denominator coefficient was zero
};

struct RatioSequence {
  std::vector<RatioRow> rows;

  const RatioRow* find(std::size_t n) const {
    for (const auto& row : rows)
      if (row.n == n) return &row;
    return nullptr;
  }
};

/// s_n ~ a mu^n n^g, equivalently S(z) ~ A (1 - mu z)^gamma with
/// gamma = -g - 1 and A = a Gamma(g + 1).
struct AsymptoticModel {
  Real mu;
  Real g;
  Real gamma;
  std::optional<Real> delta;
  Real a;
  Real A;

  static AsymptoticModel make(const Real& mu, const Real& g, const Real& a) {
    AsymptoticModel m;
    m.mu = mu;
    m.g = g;
    m.gamma = -g - 1;
    m.a = a;
    m.A = a * Real(boost::math::tgamma(Real(g + 1)));
    return m;
  }
};

struct ReferenceSeries {
  Series series;
  Real mu_ref;
  Real g_ref;
};

namespace detail {

inline bool is_gamma_pole(const Real& x) { return x <= 0 && x == floor(x); }

inline Real hypot_sum(const Real& a, const Real& b) { return sqrt(a * a + b * b); }

// Least squares for y ~ sum_c beta_c * columns[c], solved through the normal
// equations (the systems here have two or three columns).
inline std::vector<Real> least_squares(const std::vector<std::vector<Real>>& columns, const std::vector<Real>& y) {
  const std::size_t p = columns.size();
  std::vector<std::vector<Real>> a(p, std::vector<Real>(p + 1, Real(0)));
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = 0; k < y.size(); ++k) a[i][j] += columns[i][k] * columns[j][k];
    for (std::size_t k = 0; k < y.size(); ++k) a[i][p] += columns[i][k] * y[k];
  }
  for (std::size_t c = 0; c < p; ++c) {
    std::size_t best = c;
    for (std::size_t r = c + 1; r < p; ++r)
      if (abs(a[r][c]) > abs(a[best][c])) best = r;
    std::swap(a[c], a[best]);
    if (a[c][c] == 0) throw Error(ErrorKind::DegenerateWindow, "least-squares system is singular");
    for (std::size_t r = 0; r < p; ++r) {
      if (r == c) continue;
      const Real f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= p; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<Real> beta(p);
  for (std::size_t i = 0; i < p; ++i) beta[i] = a[i][p] / a[i][i];
  return beta;
}

}  // namespace detail

/// r_n = s_n / s_{n-1} for every n >= 1 the series covers, exact values
/// first and the estimated tail after them. Standard deviations follow from
/// first-order error propagation.
inline RatioSequence ratios(const Series& s) {
  RatioSequence out;
  for (std::size_t n = 1; n < s.size(); ++n) {
    RatioRow row;
    row.n = n;
    const Real prev = s.value(n - 1), cur = s.value(n);
    if (prev == 0) {
      row.valid = false;
      row.r = 0;
      row.std_dev = 0;
    } else {
      row.r = cur / prev;
      const Real rel_cur = cur == 0 ? Real(0) : Real(s.std_dev(n) / cur);
      const Real rel_prev = s.std_dev(n - 1) / prev;
      row.std_dev = abs(row.r) * detail::hypot_sum(rel_cur, rel_prev);
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

/// Replaces or appends rows from a predicted-ratio table.
inline RatioSequence merge_ratio_tail(RatioSequence base, const EstimateTable& tail) {
  for (const auto& t : tail.rows) {
    RatioRow row{t.n, t.value, t.std_dev, true};
    auto it = std::find_if(base.rows.begin(), base.rows.end(), [&](const RatioRow& r) { return r.n == t.n; });
    if (it != base.rows.end()) *it = row;
    else base.rows.push_back(row);
  }
  std::sort(base.rows.begin(), base.rows.end(), [](const RatioRow& a, const RatioRow& b) { return a.n < b.n; });
  return base;
}

/// Appends a coefficient table (from an ensemble) as the series' estimated tail.
inline Series attach_tail(Series s, const EstimateTable& tail) {
  s.approx_tail.clear();
  std::size_t expected = s.exact.size();
  for (const auto& row : tail.rows) {
    if (row.n < s.exact.size()) continue;
    if (row.n != expected) throw Error(ErrorKind::IndexMismatch, "coefficient tail is not contiguous at n = " + std::to_string(row.n));
    s.approx_tail.push_back({row.value, row.std_dev});
    ++expected;
  }
  return s;
}

/// Rebuilds coefficients from a predicted-ratio table by cumulative products,
/// starting at the last exact coefficient. Relative errors add in quadrature.
inline Series extend_by_ratios(Series s, const EstimateTable& ratio_tail) {
  s.approx_tail.clear();
  if (s.exact.empty()) throw Error(ErrorKind::InvalidArgument, "series has no exact coefficients");
  Real value = Real(s.exact.back());
  Real rel_var = 0;
  std::size_t expected = s.exact.size();
  for (const auto& row : ratio_tail.rows) {
    if (row.n < s.exact.size()) continue;
    if (row.n != expected) throw Error(ErrorKind::IndexMismatch, "ratio tail is not contiguous at n = " + std::to_string(row.n));
    value *= row.value;
    const Real rel = row.std_dev / row.value;
    rel_var += rel * rel;
    s.approx_tail.push_back({value, abs(value) * sqrt(rel_var)});
    ++expected;
  }
  return s;
}

inline EstimateTable to_table(const RatioSequence& r) {
  EstimateTable t;
  for (const auto& row : r.rows)
    if (row.valid) t.rows.push_back({row.n, row.r, row.std_dev, 1});
  return t;
}

/// l_n = n r_n - (n-1) r_{n-1}, for every n whose predecessor is present.
inline EstimateTable linear_intercepts(const RatioSequence& r) {
  EstimateTable out;
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    const auto& cur = r.rows[i];
    const auto& prev = r.rows[i - 1];
    if (prev.n + 1 != cur.n || !cur.valid || !prev.valid) continue;
    const Real n = static_cast<long>(cur.n);
    const Real value = n * cur.r - (n - 1) * prev.r;
    const Real sd = detail::hypot_sum(n * cur.std_dev, (n - 1) * prev.std_dev);
    out.rows.push_back({cur.n, value, sd, 2});
  }
  return out;
}

/// Exponent estimator g_n = (r_{n-1} - r_n) n (n-1) / mu. With
/// r_n = mu (1 + g/n + ...) this tends to g.
inline EstimateTable gradient_estimator(const RatioSequence& r, const Real& mu) {
  if (mu <= 0) throw Error(ErrorKind::InvalidArgument, "mu must be positive");
  EstimateTable out;
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    const auto& cur = r.rows[i];
    const auto& prev = r.rows[i - 1];
    if (prev.n + 1 != cur.n || !cur.valid || !prev.valid) continue;
    const Real n = static_cast<long>(cur.n);
    const Real scale = n * (n - 1) / mu;
    out.rows.push_back({cur.n, (prev.r - cur.r) * scale, abs(scale) * detail::hypot_sum(cur.std_dev, prev.std_dev), 2});
  }
  return out;
}

/// g from a single ratio and an assumed mu: the slope of the line through
/// (0, mu) and (1/n, r_n), divided by mu.
inline Real exponent_from_last_ratio(const RatioSequence& r, const Real& mu) {
  for (auto it = r.rows.rbegin(); it != r.rows.rend(); ++it) {
    if (it->valid) return Real(static_cast<long>(it->n)) * (it->r / mu - 1);
  }
  throw Error(ErrorKind::InvalidArgument, "no valid ratios");
}

/// Ratio sequence of the quotient q_n = s_n / ref_n over the shared indices.
inline RatioSequence quotient_ratios(const Series& s, const ReferenceSeries& ref) {
  const std::size_t overlap = std::min(s.size(), ref.series.size());
  if (overlap < 5) throw Error(ErrorKind::IndexMismatch, "series overlap only " + std::to_string(overlap) + " points");
  Series q{"quotient", {}, {}};
  // Built entirely as an estimated tail so non-integer quotients are kept.
  for (std::size_t n = 0; n < overlap; ++n) {
    const Real d = ref.series.value(n);
    if (d == 0) throw Error(ErrorKind::InvalidArgument, "reference coefficient " + std::to_string(n) + " is zero");
    const Real v = s.value(n) / d;
    const Real rel = detail::hypot_sum(s.value(n) == 0 ? Real(0) : Real(s.std_dev(n) / s.value(n)),
                                       Real(ref.series.std_dev(n) / d));
    q.approx_tail.push_back({v, abs(v) * rel});
  }
  return ratios(q);
}

/// Quotient ratios over a sparse overlap: only consecutive index pairs where
/// both the series and the reference are known contribute. The reference is
/// given as an estimate table (for instance reference predicted values).
inline RatioSequence quotient_ratios(const Series& s, const EstimateTable& ref) {
  RatioSequence out;
  std::size_t shared = 0;
  for (const auto& row : ref.rows)
    if (row.n < s.size()) ++shared;
  if (shared < 5) throw Error(ErrorKind::IndexMismatch, "series overlap only " + std::to_string(shared) + " points");
  for (const auto& row : ref.rows) {
    const EstimateRow* prev = ref.find(row.n - 1);
    if (row.n == 0 || !prev || row.n >= s.size()) continue;
    const Real q_cur = s.value(row.n) / row.value;
    const Real q_prev = s.value(row.n - 1) / prev->value;
    RatioRow r;
    r.n = row.n;
    r.r = q_cur / q_prev;
    const Real rel = sqrt(pow(s.std_dev(row.n) / s.value(row.n), 2) + pow(s.std_dev(row.n - 1) / s.value(row.n - 1), 2) +
                          pow(row.std_dev / row.value, 2) + pow(prev->std_dev / prev->value, 2));
    r.std_dev = abs(r.r) * rel;
    out.rows.push_back(std::move(r));
  }
  return out;
}

/// lambda_n = n (r1(n) - r2(n)) / (g_p - g_d), where r1 are quotient ratios
/// against the reference with exponent g_d and r2 against the one with g_p.
/// With r_i(n) = lambda (1 + (g_s - g_i)/n + ...) this tends to lambda.
inline EstimateTable lambda_estimator(const RatioSequence& r1, const RatioSequence& r2, const Real& g_d,
                                      const Real& g_p) {
  if (g_d == g_p) throw Error(ErrorKind::InvalidArgument, "reference exponents must differ");
  EstimateTable out;
  for (const auto& a : r1.rows) {
    const RatioRow* b = r2.find(a.n);
    if (!b || !a.valid || !b->valid) continue;
    const Real n = static_cast<long>(a.n);
    const Real scale = n / (g_p - g_d);
    out.rows.push_back({a.n, (a.r - b->r) * scale, abs(scale) * detail::hypot_sum(a.std_dev, b->std_dev), 2});
  }
  return out;
}

struct LinearFit {
  Real intercept;
  Real slope;
  Real rms_residual;
};

/// Least-squares line of value against 1/n^abscissa_exponent over the last
/// `window` rows; the intercept estimates the n -> infinity limit.
inline LinearFit extrapolate_linear(const EstimateTable& seq, std::size_t window, double abscissa_exponent = 1.0) {
  if (window < 2) throw Error(ErrorKind::InvalidArgument, "extrapolation window must hold at least 2 rows");
  const std::size_t count = std::min(window, seq.rows.size());
  std::vector<Real> ones, xs, ys;
  for (std::size_t i = seq.rows.size() - count; i < seq.rows.size(); ++i) {
    const auto& row = seq.rows[i];
    if (row.n == 0) throw Error(ErrorKind::DegenerateWindow, "row n = 0 has no finite abscissa");
    ones.emplace_back(1);
    xs.push_back(Real(1) / pow(Real(static_cast<long>(row.n)), Real(abscissa_exponent)));
    ys.push_back(row.value);
  }
  if (xs.size() < 2 || std::all_of(xs.begin(), xs.end(), [&](const Real& x) { return x == xs.front(); })) {
    throw Error(ErrorKind::DegenerateWindow, "all abscissae in the window are equal");
  }
  const auto beta = detail::least_squares({ones, xs}, ys);
  Real ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const Real e = ys[i] - beta[0] - beta[1] * xs[i];
    ss += e * e;
  }
  return {beta[0], beta[1], Real(sqrt(ss / xs.size()))};
}

struct WindowFit {
  std::size_t window;
  LinearFit fit;
};

/// Intercepts for a spread of window sizes, to show how much the estimate
/// moves with the window.
inline std::vector<WindowFit> window_sensitivity(const EstimateTable& seq, std::vector<std::size_t> windows,
                                                 double abscissa_exponent = 1.0) {
  std::vector<WindowFit> out;
  for (std::size_t w : windows) {
    if (w < 2 || w > seq.rows.size()) continue;
    out.push_back({w, extrapolate_linear(seq, w, abscissa_exponent)});
  }
  return out;
}

struct AmplitudeEstimate {
  Real a;
  Real A;
};

/// Extrapolates s_n / (mu^n n^g) against 1/n over the last `window` terms to
/// get a, then A = a Gamma(g + 1).
inline AmplitudeEstimate amplitude_estimate(const Series& s, const Real& mu, const Real& g, std::size_t window = 15) {
  if (mu <= 0) throw Error(ErrorKind::InvalidArgument, "mu must be positive");
  if (detail::is_gamma_pole(g + 1)) throw Error(ErrorKind::GammaPole, "Gamma(g + 1) has a pole at g = " + format_sci(g));
  EstimateTable seq;
  for (std::size_t n = 1; n < s.size(); ++n) {
    const Real nn = static_cast<long>(n);
    const Real scale = pow(mu, nn) * pow(nn, g);
    seq.rows.push_back({n, s.value(n) / scale, s.std_dev(n) / scale, 1});
  }
  const LinearFit fit = extrapolate_linear(seq, window);
  return {fit.intercept, fit.intercept * Real(boost::math::tgamma(Real(g + 1)))};
}

/// Fits r_n = mu (1 + g/n + c / n^(1 + delta)) with delta held fixed, by
/// linear least squares over the last `window` ratios. The amplitude fields
/// of the result are left at zero.
inline AsymptoticModel fit_confluent_ratios(const RatioSequence& r, const Real& delta, std::size_t window) {
  std::vector<const RatioRow*> rows;
  for (const auto& row : r.rows)
    if (row.valid && row.n > 0) rows.push_back(&row);
  if (rows.size() > window) rows.erase(rows.begin(), rows.end() - static_cast<std::ptrdiff_t>(window));
  if (rows.size() < 3) throw Error(ErrorKind::DegenerateWindow, "confluent fit needs at least 3 ratios");
  std::vector<Real> ones, inv, conf, ys;
  for (const RatioRow* row : rows) {
    const Real n = static_cast<long>(row->n);
    ones.emplace_back(1);
    inv.push_back(1 / n);
    conf.push_back(1 / pow(n, 1 + delta));
    ys.push_back(row->r);
  }
  const auto beta = detail::least_squares({ones, inv, conf}, ys);
  AsymptoticModel m = AsymptoticModel::make(beta[0], beta[1] / beta[0], Real(0));
  m.delta = delta;
  return m;
}

/// How the pipeline turns the gradient-estimator sequence into g.
enum class GradientMode {
  Extrapolate,  // linear fit against 1/n^gradient_exponent over the window
  LastValue,    // the last estimator value, no extrapolation
};

struct PipelineOptions {
  std::size_t window = 15;
  /// Abscissa exponent used when extrapolating linear intercepts.
  double intercept_exponent = 2.0;
  GradientMode gradient_mode = GradientMode::Extrapolate;
  /// 1 matches a pure algebraic singularity; confluent terms change it.
  double gradient_exponent = 1.0;
};

struct PipelineResult {
  AsymptoticModel model;
  LinearFit ratio_fit;      // ratios against 1/n
  LinearFit intercept_fit;  // linear intercepts against 1/n^intercept_exponent
  LinearFit gradient_fit;   // gradient estimator against 1/n^gradient_exponent
  Real g_last_gradient;     // last gradient-estimator value at the fitted mu
  Real g_last_ratio;        // g read off the last ratio with the fitted mu
};

/// Ratio analysis end to end: mu from the extrapolated linear intercepts, g
/// from the gradient estimator at that mu, then the amplitude. `r` should
/// already carry any predicted ratios; `s` supplies coefficients for the
/// amplitude.
inline PipelineResult analyse(const Series& s, const RatioSequence& r, const PipelineOptions& options = {}) {
  PipelineResult out;
  out.ratio_fit = extrapolate_linear(to_table(r), options.window);
  out.intercept_fit = extrapolate_linear(linear_intercepts(r), options.window, options.intercept_exponent);
  const Real mu = out.intercept_fit.intercept;
  const EstimateTable gradient = gradient_estimator(r, mu);
  if (gradient.empty()) throw Error(ErrorKind::DegenerateWindow, "no gradient estimates");
  out.gradient_fit = extrapolate_linear(gradient, options.window, options.gradient_exponent);
  out.g_last_gradient = gradient.rows.back().value;
  out.g_last_ratio = exponent_from_last_ratio(r, mu);
  const Real g = options.gradient_mode == GradientMode::Extrapolate ? out.gradient_fit.intercept : out.g_last_gradient;
  const AmplitudeEstimate amp = amplitude_estimate(s, mu, g, options.window);
  out.model = AsymptoticModel::make(mu, g, amp.a);
  return out;
}

}  // namespace twostacks
