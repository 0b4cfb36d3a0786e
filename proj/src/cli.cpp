#include "cli.hpp"

#include "checks.hpp"
#include "twostacks/analysis.hpp"
#include "twostacks/approximant.hpp"
#include "twostacks/enumerator.hpp"
#include "twostacks/series.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

namespace twostacks::cli {
namespace {

std::size_t default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

/// What a run did, written as a comment header into every output file so the
/// run can be repeated. Wall time is reported on stderr only, which keeps
/// outputs of identical runs byte-identical.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> parameters;
  std::vector<std::string> input_files;
  std::vector<std::string> output_files;
  std::size_t worker_count = 1;

  void write(std::ostream& os) const {
    os << "# twostacks " << command << '\n';
    os << "# parameters:";
    for (const auto& [k, v] : parameters) os << ' ' << k << '=' << v;
    os << "\n# inputs:";
    for (const auto& f : input_files) os << ' ' << f;
    if (input_files.empty()) os << " none";
    os << "\n# outputs:";
    for (const auto& f : output_files) os << ' ' << f;
    if (output_files.empty()) os << " stdout";
    os << "\n# workers: " << worker_count << '\n';
  }
};

class Output {
 public:
  Output(std::string path, std::ostream& fallback) : path_(std::move(path)), fallback_(fallback) {}

  std::ostream& stream() { return buffer_; }

  void commit() {
    if (path_.empty()) {
      fallback_ << buffer_.str();
      return;
    }
    std::ofstream f(path_, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path_ + "'");
    f << buffer_.str();
  }

 private:
  std::string path_;
  std::ostream& fallback_;
  std::ostringstream buffer_;
};

std::string join(const std::vector<int>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
  return s;
}

std::string fixed(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

// Options shared by the analyze sub-modes.
struct AnalysisInput {
  std::string series;
  std::string tail;
  std::string ratio_tail;
  std::size_t window = 15;
  std::string out;
};

struct LoadedSeries {
  Series series;
  RatioSequence ratios;
};

LoadedSeries load(const AnalysisInput& in, RunManifest& m) {
  m.input_files.push_back(in.series);
  LoadedSeries l{read_series_file(in.series), {}};
  if (!in.ratio_tail.empty()) {
    m.input_files.push_back(in.ratio_tail);
    const EstimateTable rt = read_csv_file(in.ratio_tail);
    l.ratios = merge_ratio_tail(ratios(l.series), rt);
    l.series = extend_by_ratios(l.series, rt);
  } else {
    if (!in.tail.empty()) {
      m.input_files.push_back(in.tail);
      l.series = attach_tail(l.series, read_csv_file(in.tail));
    }
    l.ratios = ratios(l.series);
  }
  return l;
}

void write_sequence(std::ostream& os, const EstimateTable& t, const std::string& value_column, double exponent) {
  os << "n,abscissa," << value_column << ",std_dev\n";
  for (const auto& row : t.rows) {
    const Real x = Real(1) / pow(Real(static_cast<long>(row.n)), Real(exponent));
    os << row.n << ',' << format_sci(x) << ',' << format_sci(row.value) << ',' << format_sci(row.std_dev) << '\n';
  }
}

void write_summary(std::ostream& os, const std::string& label, const EstimateTable& t, std::size_t window,
                   double exponent) {
  if (t.rows.size() < 2) {
    os << "# " << label << ": too few rows to extrapolate\n";
    return;
  }
  const LinearFit fit = extrapolate_linear(t, window, exponent);
  os << "# " << label << " (window " << std::min(window, t.rows.size()) << ", abscissa 1/n^" << fixed(exponent)
     << "): intercept " << format_sci(fit.intercept) << " slope " << format_sci(fit.slope) << '\n';
  for (const auto& w : window_sensitivity(t, {10, 15, 20}, exponent)) {
    os << "#   window " << w.window << ": intercept " << format_sci(w.fit.intercept) << " rms residual "
       << format_sci(w.fit.rms_residual) << '\n';
  }
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InputFormat:
    case ErrorKind::IndexMismatch:
      return kInputFormat;
    case ErrorKind::ResourceLimit:
      return kResourceLimit;
    case ErrorKind::FixtureUnknown:
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidAlphabet:
      return kUsage;
    default:
      return kFailure;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Counts permutations sortable by two stacks in series and analyses the resulting series.", "twostacks"};
  app.require_subcommand(1);
  app.allow_windows_style_options(false);

  std::function<void()> action;
  const auto started = std::chrono::steady_clock::now();

  // enumerate
  struct {
    std::size_t n = 0, start_len = 6, workers = default_workers(), max_stored = std::size_t{1} << 28;
    std::string method = "transform", out, automaton_out;
    bool increment_avoiding = false, no_prune = false;
  } en;
  auto* enumerate = app.add_subcommand("enumerate", "Exact coefficients s_0..s_n (or t_0..t_n) as a series file");
  enumerate->add_option("--n", en.n, "Largest n")->required();
  enumerate->add_option("--start-len", en.start_len, "Start-sequence length m, clamped to n - 1")->capture_default_str();
  enumerate->add_option("--workers", en.workers, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  enumerate->add_option("--method", en.method, "transform: count increment-avoiding and transform; direct: count s_n")
      ->check(CLI::IsMember({"transform", "direct"}))
      ->capture_default_str();
  enumerate->add_flag("--increment-avoiding", en.increment_avoiding, "Write t_n instead of s_n");
  enumerate->add_flag("--no-prune", en.no_prune, "Search every operation sequence");
  enumerate->add_option("--max-stored", en.max_stored, "Permutations one shard may hold")->capture_default_str();
  enumerate->add_option("--automaton-out", en.automaton_out, "Write the pruning automaton for n as an adjacency list");
  enumerate->add_option("--out", en.out, "Output series file (default stdout)");
  enumerate->callback([&] {
    action = [&] {
      SeriesRequest req;
      req.max_n = en.n;
      req.start_len = en.start_len;
      req.workers = en.workers;
      req.method = en.method == "direct" ? EnumerationMethod::Direct : EnumerationMethod::Transform;
      req.options.pruned = !en.no_prune;
      req.options.max_stored = en.max_stored;
      const Series s = en.increment_avoiding ? enumerate_increment_avoiding_series(req) : enumerate_series(req);
      RunManifest m{"enumerate",
                    {{"n", std::to_string(en.n)},
                     {"start-len", std::to_string(en.start_len)},
                     {"method", en.method},
                     {"series", en.increment_avoiding ? "t" : "s"},
                     {"pruned", en.no_prune ? "false" : "true"}},
                    {},
                    {},
                    en.workers};
      if (!en.out.empty()) m.output_files.push_back(en.out);
      Output o(en.out, out);
      m.write(o.stream());
      write_series(o.stream(), s);
      o.commit();
      if (!en.automaton_out.empty() && en.n > 0) {
        std::ofstream f(en.automaton_out);
        if (!f) throw std::runtime_error("cannot write '" + en.automaton_out + "'");
        build_pruning_automaton(en.n, req.options.max_forbidden_len).write_adjacency(f);
      }
    };
  });

  // transform
  struct {
    std::string series, out;
    bool inverse = false;
  } tr;
  auto* transform = app.add_subcommand("transform", "Binomial transform t -> s, or its inverse");
  transform->add_option("--series", tr.series, "Input series file")->required();
  transform->add_flag("--inverse", tr.inverse, "s -> t instead of t -> s");
  transform->add_option("--out", tr.out, "Output series file (default stdout)");
  transform->callback([&] {
    action = [&] {
      const Series in = read_series_file(tr.series);
      const Series s = tr.inverse ? inverse_binomial_transform(in) : binomial_transform(in);
      RunManifest m{"transform", {{"inverse", tr.inverse ? "true" : "false"}}, {tr.series}, {}, 1};
      if (!tr.out.empty()) m.output_files.push_back(tr.out);
      Output o(tr.out, out);
      m.write(o.stream());
      write_series(o.stream(), s);
      o.commit();
    };
  });

  // extend and ratios-predict
  struct EnsembleArgs {
    std::string series, out;
    std::vector<int> orders{4};
    std::size_t predict = 19, workers = default_workers();
    double trim = 0.10;
    int max_spread = 2, max_p_degree = 4;
  };
  EnsembleArgs ex, rp;
  auto add_ensemble = [&](const char* name, const char* help, EnsembleArgs& a, bool ratio_first) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--series", a.series, "Input series file (exact coefficients)")->required();
    sub->add_option("--orders", a.orders, "Approximant orders")->delimiter(',')->capture_default_str();
    sub->add_option("--predict", a.predict, "Number of terms past the series to predict")->capture_default_str();
    sub->add_option("--trim", a.trim, "Fraction trimmed from each end of the ensemble")->capture_default_str();
    sub->add_option("--max-spread", a.max_spread, "Largest degree difference between the Q polynomials")
        ->capture_default_str();
    sub->add_option("--max-p-degree", a.max_p_degree, "Largest degree of the inhomogeneous polynomial")
        ->capture_default_str();
    sub->add_option("--workers", a.workers, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--out", a.out, "Output CSV (default stdout)");
    sub->callback([&, name, ratio_first] {
      action = [&, name, ratio_first] {
        const Series s = read_series_file(a.series);
        std::vector<DAConfig> cfgs;
        for (int order : a.orders) {
          auto part = generate_configs(order, s.exact.size(), a.max_spread, a.max_p_degree);
          cfgs.insert(cfgs.end(), part.begin(), part.end());
        }
        std::sort(cfgs.begin(), cfgs.end());
        EnsembleOptions eo;
        eo.trim = a.trim;
        eo.workers = a.workers;
        const EstimateTable t =
            ratio_first ? predict_ratios_ensemble(s, cfgs, a.predict, eo) : predict_ensemble(s, cfgs, a.predict, eo);
        RunManifest m{name,
                      {{"orders", join(a.orders)},
                       {"predict", std::to_string(a.predict)},
                       {"trim", fixed(a.trim)},
                       {"max-spread", std::to_string(a.max_spread)},
                       {"max-p-degree", std::to_string(a.max_p_degree)},
                       {"configs", std::to_string(cfgs.size())}},
                      {a.series},
                      {},
                      a.workers};
        if (!a.out.empty()) m.output_files.push_back(a.out);
        Output o(a.out, out);
        m.write(o.stream());
        write_csv(o.stream(), t);
        o.commit();
      };
    });
  };
  add_ensemble("extend", "Predict further coefficients with a differential-approximant ensemble", ex, false);
  add_ensemble("ratios-predict", "Predict further ratios s_n / s_(n-1), aggregated ratio-first", rp, true);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Ratio-method analysis of a series");
  analyze->require_subcommand(1);
  AnalysisInput ai;
  auto add_inputs = [&](CLI::App* sub) {
    sub->add_option("--series", ai.series, "Input series file")->required();
    sub->add_option("--tail", ai.tail, "Predicted coefficients CSV appended to the series");
    sub->add_option("--ratio-tail", ai.ratio_tail, "Predicted ratios CSV; takes precedence over --tail");
    sub->add_option("--window", ai.window, "Extrapolation window (last rows)")->capture_default_str();
    sub->add_option("--out", ai.out, "Output CSV (default stdout)");
  };
  double exponent = 1.0, mu = 0, g = 0, g_d = -1.5, g_p = -2.47327, mu_d = 0;
  std::string reference, reference_d, reference_p;

  auto finish = [&](const std::string& mode, RunManifest& m, const std::function<void(std::ostream&)>& body) {
    m.command = "analyze " + mode;
    m.parameters["window"] = std::to_string(ai.window);
    if (!ai.out.empty()) m.output_files.push_back(ai.out);
    Output o(ai.out, out);
    m.write(o.stream());
    body(o.stream());
    o.commit();
  };

  auto* a_ratios = analyze->add_subcommand("ratios", "r_n against 1/n");
  add_inputs(a_ratios);
  a_ratios->callback([&] {
    action = [&] {
      RunManifest m;
      const auto l = load(ai, m);
      const EstimateTable t = to_table(l.ratios);
      finish("ratios", m, [&](std::ostream& os) {
        write_summary(os, "ratio intercept", t, ai.window, 1.0);
        os << "n,one_over_n,r_n,std_dev\n";
        for (const auto& row : t.rows) {
          os << row.n << ',' << format_sci(Real(1) / static_cast<long>(row.n)) << ',' << format_sci(row.value) << ','
             << format_sci(row.std_dev) << '\n';
        }
      });
    };
  });

  auto* a_int = analyze->add_subcommand("intercepts", "Linear intercepts n r_n - (n-1) r_(n-1)");
  add_inputs(a_int);
  a_int->add_option("--exponent", exponent, "Abscissa is 1/n^exponent")->capture_default_str();
  a_int->callback([&] {
    action = [&] {
      RunManifest m;
      m.parameters["exponent"] = fixed(exponent);
      const auto l = load(ai, m);
      const EstimateTable t = linear_intercepts(l.ratios);
      finish("intercepts", m, [&](std::ostream& os) {
        write_summary(os, "mu from linear intercepts", t, ai.window, exponent);
        write_sequence(os, t, "l_n", exponent);
      });
    };
  });

  auto* a_grad = analyze->add_subcommand("gradient", "Exponent estimators g_n at an assumed mu");
  add_inputs(a_grad);
  a_grad->add_option("--mu", mu, "Assumed growth rate")->required();
  a_grad->add_option("--exponent", exponent, "Abscissa is 1/n^exponent")->capture_default_str();
  a_grad->callback([&] {
    action = [&] {
      RunManifest m;
      m.parameters["mu"] = fixed(mu);
      m.parameters["exponent"] = fixed(exponent);
      const auto l = load(ai, m);
      const EstimateTable t = gradient_estimator(l.ratios, Real(mu));
      finish("gradient", m, [&](std::ostream& os) {
        write_summary(os, "g from exponent estimators", t, ai.window, exponent);
        if (!t.empty()) os << "# last estimator value: " << format_sci(t.rows.back().value) << '\n';
        os << "# g from the last ratio: " << format_sci(exponent_from_last_ratio(l.ratios, Real(mu))) << '\n';
        write_sequence(os, t, "g_n", exponent);
      });
    };
  });

  auto load_reference = [&](const std::string& path, const Series& s, RunManifest& m) {
    m.input_files.push_back(path);
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) return quotient_ratios(s, read_csv_file(path));
    return quotient_ratios(s, ReferenceSeries{read_series_file(path), Real(0), Real(0)});
  };

  auto* a_quot = analyze->add_subcommand("quotient", "Ratios of the quotient s_n / ref_n");
  add_inputs(a_quot);
  a_quot->add_option("--reference", reference, "Reference series file, or CSV of estimates")->required();
  a_quot->callback([&] {
    action = [&] {
      RunManifest m;
      const auto l = load(ai, m);
      const EstimateTable t = to_table(load_reference(reference, l.series, m));
      finish("quotient", m, [&](std::ostream& os) {
        write_summary(os, "quotient ratio intercept", t, ai.window, 1.0);
        write_sequence(os, t, "r_n", 1.0);
      });
    };
  });

  auto* a_lambda = analyze->add_subcommand("lambda", "lambda_n from quotients against two references");
  add_inputs(a_lambda);
  a_lambda->add_option("--reference-d", reference_d, "Reference with exponent g_d")->required();
  a_lambda->add_option("--reference-p", reference_p, "Reference with exponent g_p")->required();
  a_lambda->add_option("--g-d", g_d, "Exponent of the first reference")->capture_default_str();
  a_lambda->add_option("--g-p", g_p, "Exponent of the second reference")->capture_default_str();
  a_lambda->add_option("--mu-d", mu_d, "Growth rate shared by the references; reports mu = lambda mu_d");
  a_lambda->callback([&] {
    action = [&] {
      RunManifest m;
      m.parameters["g-d"] = fixed(g_d);
      m.parameters["g-p"] = fixed(g_p);
      const auto l = load(ai, m);
      const RatioSequence r1 = load_reference(reference_d, l.series, m);
      const RatioSequence r2 = load_reference(reference_p, l.series, m);
      const EstimateTable t = lambda_estimator(r1, r2, Real(g_d), Real(g_p));
      finish("lambda", m, [&](std::ostream& os) {
        write_summary(os, "lambda", t, ai.window, 1.0);
        if (mu_d > 0 && t.rows.size() >= 2) {
          os << "# implied mu: " << format_sci(extrapolate_linear(t, ai.window).intercept * Real(mu_d)) << '\n';
        }
        write_sequence(os, t, "lambda_n", 1.0);
      });
    };
  });

  auto* a_amp = analyze->add_subcommand("amplitude", "a from s_n / (mu^n n^g), and A = a Gamma(g + 1)");
  add_inputs(a_amp);
  a_amp->add_option("--mu", mu, "Growth rate")->required();
  a_amp->add_option("--g", g, "Coefficient exponent")->required();
  a_amp->callback([&] {
    action = [&] {
      RunManifest m;
      m.parameters["mu"] = fixed(mu);
      m.parameters["g"] = fixed(g);
      const auto l = load(ai, m);
      const AmplitudeEstimate est = amplitude_estimate(l.series, Real(mu), Real(g), ai.window);
      EstimateTable t;
      for (std::size_t n = 1; n < l.series.size(); ++n) {
        const Real scale = pow(Real(mu), static_cast<long>(n)) * pow(Real(static_cast<long>(n)), Real(g));
        t.rows.push_back({n, l.series.value(n) / scale, l.series.std_dev(n) / scale, 1});
      }
      finish("amplitude", m, [&](std::ostream& os) {
        os << "# a = " << format_sci(est.a) << " A = " << format_sci(est.A) << '\n';
        write_summary(os, "a", t, ai.window, 1.0);
        write_sequence(os, t, "scaled_s_n", 1.0);
      });
    };
  });

  // verify
  std::string fixture;
  checks::CheckOptions check_options;
  check_options.max_n = 10;
  check_options.workers = default_workers();
  auto* verify = app.add_subcommand("verify", "Recompute a golden fixture and report pass/fail");
  std::string fixture_help = "Fixture name, or 'all':";
  for (const auto& c : checks::all_checks()) fixture_help += " " + std::string(c.fixture);
  verify->add_option("fixture", fixture, fixture_help)->required();
  verify->add_option("--max-n", check_options.max_n, "Largest n for coefficients-small")->capture_default_str();
  verify->add_option("--workers", check_options.workers, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  int verify_status = kOk;
  verify->callback([&] {
    action = [&] {
      std::vector<const checks::Check*> selected;
      if (fixture == "all") {
        for (const auto& c : checks::all_checks()) selected.push_back(&c);
      } else if (const auto* c = checks::find_check(fixture)) {
        selected.push_back(c);
      } else {
        throw Error(ErrorKind::FixtureUnknown, "unknown fixture '" + fixture + "'");
      }
      for (const auto* c : selected) {
        const auto r = c->run(check_options);
        out << (r.passed ? "PASS " : "FAIL ") << c->fixture << ": " << r.detail << '\n';
        if (!r.passed) verify_status = kVerificationFailed;
      }
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help("", CLI::AppFormatMode::All);
    return kUsage;
  }

  try {
    action();
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    if (e.kind() == ErrorKind::FixtureUnknown) {
      err << "known fixtures: all";
      for (const auto& c : checks::all_checks()) err << ' ' << c.fixture;
      err << '\n';
    }
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  err << "wall_time: " << std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count() << " s\n";
  return verify_status;
}

}  // namespace twostacks::cli
