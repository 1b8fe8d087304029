#pragma once

// Command-line driver: argument parsing, experiment runners and output writers.
// Kept in a header so the test suite can drive `run` in-process.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <ginprod/ginprod.hpp>

namespace ginprod::cli {

using nlohmann::ordered_json;

enum ExitCode : int { kOk = 0, kUsage = 1, kVerificationFailed = 2, kNumericalFailure = 3 };

/// Parsed and validated command line.
struct RunConfig {
  std::string subcommand;
  int beta = 2;
  int n = 3;
  std::string nu = "0";
  std::optional<int> t;
  int reps = 1;
  std::uint64_t seed = 1;
  std::string precision = "auto";
  std::string out = "-";
  std::string format = "csv";
  unsigned threads = 0;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Null for NaN so JSON stays valid.
inline ordered_json jnum(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

inline std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw UsageError("--nu: '" + item + "' is not an integer");
    }
    if (used != item.size()) throw UsageError("--nu: '" + item + "' is not an integer");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("--nu: empty list");
  return out;
}

/// Builds the experiment description. A single --nu value is repeated t
/// times; a list fixes t by its length and may come in any order.
inline ProductSpec make_spec(const RunConfig& cfg) {
  ProductSpec spec;
  try {
    spec.beta = DysonIndex::from_int(cfg.beta);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  const auto nus = parse_int_list(cfg.nu);
  std::vector<int> profile;
  if (nus.size() == 1) {
    if (!cfg.t) throw UsageError("--time is required with a constant --nu");
    if (*cfg.t < 1) throw UsageError("--time must be positive");
    profile.assign(static_cast<std::size_t>(*cfg.t), nus.front());
  } else {
    if (cfg.t && *cfg.t != static_cast<int>(nus.size()))
      throw UsageError("--time disagrees with the length of the --nu list");
    profile = nus;
  }
  try {
    spec.profile = DimensionProfile::any_order(cfg.n, profile);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (cfg.reps < 0) throw UsageError("--reps must be non-negative");
  spec.reps = cfg.reps;
  spec.seed = cfg.seed;
  if (cfg.precision != "auto") {
    std::size_t used = 0;
    long bits = 0;
    try {
      bits = std::stol(cfg.precision, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != cfg.precision.size() || bits < 53) throw UsageError("--precision must be 'auto' or an integer >= 53");
    spec.precision_bits = bits;
  }
  return spec;
}

inline ordered_json config_json(const RunConfig& cfg, const ProductSpec& spec) {
  ordered_json j;
  j["subcommand"] = cfg.subcommand;
  j["beta"] = spec.beta.value();
  j["dim"] = spec.profile.n();
  j["nu"] = std::vector<int>(spec.profile.nus().begin(), spec.profile.nus().end());
  j["time"] = spec.t();
  j["reps"] = spec.reps;
  j["seed"] = spec.seed;
  j["precision"] = cfg.precision;
  j["precision_bits"] =
      spec.profile.closes() ? ordered_json(spec.precision_bits.value_or(auto_precision_bits(spec.beta, spec.profile)))
                            : ordered_json(nullptr);
  j["format"] = cfg.format;
  return j;
}

/// Theory values aligned with output rank n (n = 1 is the largest exponent).
inline ordered_json expected_json(DysonIndex beta, const DimensionProfile& profile) {
  ordered_json arr = ordered_json::array();
  const int n_dim = profile.n();
  for (int rank = 1; rank <= n_dim; ++rank) {
    const int k = n_dim + 1 - rank;
    arr.push_back({{"n", rank},
                   {"mu", theory::lyapunov_mean(beta, profile, k)},
                   {"sigma", std::sqrt(theory::lyapunov_variance(beta, profile, k, profile.length()))}});
  }
  return arr;
}

// Writes to a file, or to `fallback` when the path is "-".
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : path_(path) {
    if (path == "-") {
      os_ = &fallback;
    } else {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot open output file " + path);
      os_ = &file_;
    }
  }
  std::ostream& stream() { return *os_; }
  bool is_stdout() const { return path_ == "-"; }
  void finish() {
    os_->flush();
    if (!*os_) throw std::runtime_error("write failed for " + path_);
  }

 private:
  std::string path_;
  std::ofstream file_;
  std::ostream* os_ = nullptr;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// CSV goes to the output path with a "<out>.meta.json" sidecar; JSON embeds
// the metadata next to the rows.
inline void emit(const RunConfig& cfg, const Table& table, ordered_json meta, std::ostream& out) {
  Sink sink(cfg.out, out);
  auto& os = sink.stream();
  if (cfg.format == "json") {
    ordered_json rows = ordered_json::array();
    for (const auto& r : table.rows) {
      ordered_json row;
      for (std::size_t c = 0; c < table.header.size(); ++c) row[table.header[c]] = jnum(r[c]);
      rows.push_back(std::move(row));
    }
    meta["rows"] = std::move(rows);
    os << meta.dump(2) << '\n';
    sink.finish();
    return;
  }
  for (std::size_t c = 0; c < table.header.size(); ++c) os << (c ? "," : "") << table.header[c];
  os << '\n';
  for (const auto& r : table.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) os << ',';
      const double v = r[c];
      if (v == std::floor(v) && std::fabs(v) < 1e15 && c < 2) os << static_cast<long long>(v);
      else os << fmt(v);
    }
    os << '\n';
  }
  sink.finish();
  if (!sink.is_stdout()) {
    std::ofstream side(cfg.out + ".meta.json", std::ios::binary);
    if (!side) throw std::runtime_error("cannot open sidecar " + cfg.out + ".meta.json");
    side << meta.dump(2) << '\n';
  }
}

inline ordered_json retry_report(const std::vector<SpectralSample>& samples) {
  ordered_json r = ordered_json::array();
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (samples[i].retried) r.push_back({{"rep", i}, {"precision_bits", samples[i].precision_bits}});
  return r;
}

inline void require_closing(const ProductSpec& spec) {
  if (!spec.profile.closes())
    throw UsageError("eigenvalues need a square product: the last --nu entry must be 0");
}

inline int cmd_scatter(const RunConfig& cfg, std::ostream& out) {
  const ProductSpec spec = make_spec(cfg);
  require_closing(spec);
  const auto samples = run_ensemble(spec, cfg.threads);
  Table table{{"rep", "n", "modulus_rescaled", "theta"}, {}};
  for (std::size_t r = 0; r < samples.size(); ++r)
    for (std::size_t k = 0; k < samples[r].lambda.size(); ++k)
      table.rows.push_back({static_cast<double>(r), static_cast<double>(k + 1), std::exp(samples[r].lambda[k]),
                            samples[r].theta[k]});
  ordered_json meta;
  meta["config"] = config_json(cfg, spec);
  meta["expected"] = expected_json(spec.beta, spec.profile);
  meta["retried"] = retry_report(samples);
  if (spec.beta.is_real()) {
    std::size_t all_real = 0;
    for (const auto& s : samples) all_real += (s.real_count.value_or(0) == spec.profile.n());
    meta["fully_real_fraction"] = samples.empty() ? ordered_json(nullptr)
                                                  : ordered_json(static_cast<double>(all_real) / samples.size());
  }
  emit(cfg, table, std::move(meta), out);
  return kOk;
}

inline int cmd_exponents(const RunConfig& cfg, std::ostream& out) {
  const ProductSpec spec = make_spec(cfg);
  const auto samples = run_ensemble(spec, cfg.threads);
  Table table{{"rep", "n", "lambda", "gamma", "theta"}, {}};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t r = 0; r < samples.size(); ++r)
    for (std::size_t k = 0; k < samples[r].gamma.size(); ++k) {
      const bool has_eig = k < samples[r].lambda.size();
      table.rows.push_back({static_cast<double>(r), static_cast<double>(k + 1),
                            has_eig ? samples[r].lambda[k] : nan, samples[r].gamma[k],
                            has_eig ? samples[r].theta[k] : nan});
    }
  ordered_json meta;
  meta["config"] = config_json(cfg, spec);
  meta["expected"] = expected_json(spec.beta, spec.profile);
  meta["retried"] = retry_report(samples);
  emit(cfg, table, std::move(meta), out);
  return kOk;
}

inline int cmd_convergence(const RunConfig& cfg, std::ostream& out) {
  const ProductSpec spec = make_spec(cfg);
  const ConvergenceTrace trace = trace_realization(spec, 0);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Table table{{"t", "n", "lambda", "gamma"}, {}};
  ordered_json band = ordered_json::array();
  const int n_dim = spec.profile.n();
  for (int step = 1; step <= spec.t(); ++step) {
    const auto& lam = trace.lambda[static_cast<std::size_t>(step - 1)];
    const auto& gam = trace.gamma[static_cast<std::size_t>(step - 1)];
    for (int k = 0; k < n_dim; ++k)
      table.rows.push_back({static_cast<double>(step), static_cast<double>(k + 1),
                            lam.empty() ? nan : lam[static_cast<std::size_t>(k)], gam[static_cast<std::size_t>(k)]});
    const auto prefix = spec.profile.prefix(step);
    for (const auto& e : expected_json(spec.beta, prefix))
      band.push_back({{"t", step}, {"n", e["n"]}, {"mu", e["mu"]}, {"sigma", e["sigma"]}});
  }
  ordered_json meta;
  meta["config"] = config_json(cfg, spec);
  meta["band"] = std::move(band);
  meta["retried"] = trace.retried;
  emit(cfg, table, std::move(meta), out);
  return kOk;
}

struct Check {
  std::string suite;
  std::string name;
  double value;
  double threshold;
  bool passed;
};

/// Oracle and identity suites for special functions, theory and permanents.
inline std::vector<Check> verification_checks(std::uint64_t seed) {
  std::vector<Check> checks;
  auto rel = [](double a, double b) { return std::fabs(a - b) / std::fabs(b); };
  auto add = [&](std::string suite, std::string name, double value, double threshold) {
    checks.push_back({std::move(suite), std::move(name), value, threshold, value <= threshold});
  };

  add("specfun", "digamma(1) = -euler_gamma", std::fabs(specfun::digamma(1.0) + std::numbers::egamma), 1e-13);
  add("specfun", "trigamma(1) = pi^2/6", std::fabs(specfun::trigamma(1.0) - std::numbers::pi * std::numbers::pi / 6),
      1e-13);

  using specfun::MeijerParams;
  for (double z : {0.5, 1.0, 3.0})
    add("meijer", "G(-;0;z) = exp(-z) at z=" + fmt(z), rel(specfun::meijer_g(MeijerParams{{0.0}}, z), std::exp(-z)),
        1e-8);
  add("meijer", "G(-;0,0;1) = 2 K0(2)", rel(specfun::meijer_g(MeijerParams{{0.0, 0.0}}, 1.0), 2.0 * std::cyl_bessel_k(0.0, 2.0)),
      1e-8);

  RandomStream rng(seed);
  for (int trial = 0; trial < 8; ++trial) {
    const int t = 1 + trial % 4;
    MeijerParams p;
    for (int i = 0; i < t; ++i) p.b.push_back(0.5 + 2.0 * rng.uniform());
    const double z = 0.1 + 9.9 * rng.uniform();
    const double c = 3.0 * rng.uniform();
    MeijerParams shifted = p;
    for (auto& b : shifted.b) b += c;
    const double lhs = c * std::log(z) + specfun::log_meijer_g(p, z);
    const double rhs = specfun::log_meijer_g(shifted, z);
    add("meijer", "shift identity t=" + std::to_string(t), std::fabs(std::expm1(lhs - rhs)), 1e-8);
    const double s = 0.5 + 2.0 * rng.uniform();
    add("meijer", "moment identity t=" + std::to_string(t),
        specfun::check_moment_identity(p, z, s).relative_error(), 1e-8);
  }

  for (int n = 1; n <= 7; ++n) {
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = {rng.gaussian(), rng.gaussian()};
    const auto a = permanent_ryser(m), b = permanent_naive(m);
    add("permanent", "ryser = naive n=" + std::to_string(n), std::abs(a - b) / std::max(std::abs(b), 1e-300), 1e-10);
  }

  for (int t : {1, 10, 200})
    for (int k = 1; k <= 4; ++k)
      add("decoupling", "D_kk = 1 k=" + std::to_string(k) + " t=" + std::to_string(t),
          std::fabs(theory::decoupling_coefficient(DimensionProfile::square(3, t), k, k) - 1.0), 0.0);
  const double slope = std::log(std::sqrt(std::numbers::pi) / 2.0);
  for (int t : {1, 7, 50})
    add("decoupling", "log D_12 = t log(sqrt(pi)/2) t=" + std::to_string(t),
        std::fabs(theory::log_decoupling_coefficient(DimensionProfile::square(2, t), 1, 2) - t * slope),
        1e-12 * t);
  return checks;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const auto checks = verification_checks(cfg.seed);
  bool ok = true;
  ordered_json j = ordered_json::array();
  Table table{{"suite", "name", "value", "threshold", "passed"}, {}};
  for (const auto& c : checks) {
    ok = ok && c.passed;
    j.push_back({{"suite", c.suite}, {"name", c.name}, {"value", jnum(c.value)}, {"threshold", c.threshold},
                 {"passed", c.passed}});
  }
  Sink sink(cfg.out, out);
  auto& os = sink.stream();
  if (cfg.format == "json") {
    os << ordered_json{{"passed", ok}, {"checks", j}}.dump(2) << '\n';
  } else {
    os << "suite,name,value,threshold,passed\n";
    for (const auto& c : checks)
      os << c.suite << ",\"" << c.name << "\"," << fmt(c.value) << ',' << fmt(c.threshold) << ','
         << (c.passed ? "true" : "false") << '\n';
  }
  sink.finish();
  return ok ? kOk : kVerificationFailed;
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Products of Ginibre matrices: simulation of finite-time Lyapunov exponents and checks against theory",
               "ginprod"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub, bool simulation) {
    sub->add_option("--out", cfg.out, "Output path, '-' for stdout")->capture_default_str();
    sub->add_option("--format", cfg.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    sub->add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
    if (!simulation) return;
    sub->add_option("--beta", cfg.beta, "Dyson index 1, 2 or 4")->capture_default_str();
    sub->add_option("--dim", cfg.n, "Smallest matrix dimension N")->capture_default_str();
    sub->add_option("--nu", cfg.nu, "Constant offset, or comma list nu_1,...,nu_t")->capture_default_str();
    sub->add_option("--time", cfg.t, "Number of factors t");
    sub->add_option("--precision", cfg.precision, "Working bits for eigenvalues, or auto")->capture_default_str();
    sub->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)")->capture_default_str();
  };

  auto* scatter = app.add_subcommand("scatter", "Rescaled eigenvalues |z|^(1/t) and phases per realization");
  add_common(scatter, true);
  scatter->add_option("--reps", cfg.reps, "Realizations")->capture_default_str();
  auto* exponents = app.add_subcommand("exponents", "Eigenvalue and singular exponents per realization");
  add_common(exponents, true);
  exponents->add_option("--reps", cfg.reps, "Realizations")->capture_default_str();
  auto* convergence = app.add_subcommand("convergence", "Exponents of one realization after every factor");
  add_common(convergence, true);
  auto* verify = app.add_subcommand("verify", "Special-function, theory and permanent oracle checks");
  add_common(verify, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (scatter->parsed()) {
      cfg.subcommand = "scatter";
      return cmd_scatter(cfg, out);
    }
    if (exponents->parsed()) {
      cfg.subcommand = "exponents";
      return cmd_exponents(cfg, out);
    }
    if (convergence->parsed()) {
      cfg.subcommand = "convergence";
      return cmd_convergence(cfg, out);
    }
    cfg.subcommand = "verify";
    return cmd_verify(cfg, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace ginprod::cli
