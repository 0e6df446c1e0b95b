#include "fracseg/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <set>
#include <sstream>

#include "fracseg/errors.hpp"
#include "fracseg/montecarlo.hpp"
#include "fracseg/pipeline.hpp"

namespace fracseg {

using json = nlohmann::json;

namespace {

constexpr double kSpacingTol = 1e-9;
constexpr double kRoundoff = std::numeric_limits<double>::epsilon();

// Keys that never enter the configuration hash: they only route output.
const std::set<std::string> kUnhashed = {"out", "plot", "replicates_out", "threads", "input"};

std::string trim_ws(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_number(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') ++first;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

std::string format17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path + "'");
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

// Collects option values into a JSON object: config file first, then every
// flag that was given on the command line.
class Binder {
 public:
  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& flag, const std::string& key,
                   const std::string& help) {
    auto store = std::make_shared<T>();
    CLI::Option* opt = app->add_option(flag, *store, help);
    setters_.push_back([opt, store, key](json& cfg) {
      if (opt->count() > 0) cfg[key] = *store;
    });
    return opt;
  }

  void apply(json& cfg) const {
    for (const auto& set : setters_) set(cfg);
  }

 private:
  std::vector<std::function<void(json&)>> setters_;
};

const std::set<std::string> kKnownKeys = {
    "family", "m",       "n",      "delta",  "tau",        "exponents",      "sigmas",
    "seed",   "ell",     "kappa",  "wavelet", "a_n",       "v_n",            "gap",
    "min_len", "stride", "f_min",  "f_max",  "trim",       "reps",           "threads",
    "out",    "plot",    "input",  "ci_level", "max_margin_fraction", "replicates_out",
    "trend"};

json load_config(const std::string& path) {
  json cfg;
  try {
    cfg = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw IoError("config '" + path + "' is not valid JSON: " + e.what());
  }
  if (!cfg.is_object()) throw DomainError("config '" + path + "' must hold a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    if (!kKnownKeys.count(key)) throw DomainError("unknown config key '" + key + "'");
  }
  return cfg;
}

template <class T>
std::optional<T> get_opt(const json& cfg, const std::string& key) {
  if (!cfg.contains(key) || cfg.at(key).is_null()) return std::nullopt;
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception&) {
    throw DomainError("config key '" + key + "' has the wrong type");
  }
}

template <class T>
T get_or(const json& cfg, const std::string& key, T fallback) {
  return get_opt<T>(cfg, key).value_or(fallback);
}

json hashed_view(const json& cfg) {
  json view = json::object();
  for (const auto& [key, value] : cfg.items()) {
    if (!kUnhashed.count(key)) view[key] = value;
  }
  return view;
}

std::string config_hash(const json& cfg) { return fnv1a_hex(hashed_view(cfg).dump()); }

PiecewiseSpec spec_from_config(const json& cfg) {
  PiecewiseSpec spec;
  spec.family = parse_family(get_or<std::string>(cfg, "family", "fgn"));
  const auto tau = get_opt<std::vector<double>>(cfg, "tau");
  const auto m = get_opt<long>(cfg, "m");
  if (m && *m < 0) throw DomainError("m must be nonnegative");
  if (tau) {
    if (m && static_cast<std::size_t>(*m) != tau->size()) {
      throw DomainError("m=" + std::to_string(*m) + " but " + std::to_string(tau->size()) +
                        " change fractions were given in --tau");
    }
    spec.tau_stars = *tau;
  } else {
    const long count = m.value_or(0);
    for (long j = 1; j <= count; ++j) {
      spec.tau_stars.push_back(static_cast<double>(j) / static_cast<double>(count + 1));
    }
  }
  const auto exps = get_opt<std::vector<double>>(cfg, "exponents");
  if (!exps) throw DomainError("--exponents is required (one value per segment)");
  spec.exponents = *exps;
  spec.sigmas = get_or<std::vector<double>>(cfg, "sigmas",
                                            std::vector<double>(spec.exponents.size(), 1.0));
  spec.f_min = get_or<double>(cfg, "f_min", spec.f_min);
  spec.f_max = get_or<double>(cfg, "f_max", spec.f_max);
  spec.validate();
  return spec;
}

std::size_t n_from_config(const json& cfg) {
  const auto n = get_opt<long>(cfg, "n");
  if (!n) throw DomainError("--n is required");
  if (*n < 2) throw DomainError("--n must be at least 2");
  return static_cast<std::size_t>(*n);
}

double delta_from_config(const json& cfg, Family family, std::size_t N) {
  if (auto d = get_opt<double>(cfg, "delta")) {
    if (!(*d > 0.0) || !std::isfinite(*d)) throw DomainError("--delta must be positive");
    return *d;
  }
  if (family == Family::LocallyFractional) {
    return default_schedule(family, N, get_or<double>(cfg, "kappa", 0.05)).delta;
  }
  return 1.0;
}

AnalysisOptions options_from_config(const json& cfg, Family family) {
  AnalysisOptions o;
  o.family = family;
  const long m = get_or<long>(cfg, "m", 0);
  if (m < 0) throw DomainError("m must be nonnegative");
  o.m = static_cast<std::size_t>(m);
  o.ell = static_cast<int>(get_or<long>(cfg, "ell", 0));
  if (o.ell != 0 && o.ell < 3) throw DomainError("--ell must be at least 3");
  o.kappa = get_or<double>(cfg, "kappa", o.kappa);
  o.gap = get_or<double>(cfg, "gap", o.gap);
  if (auto w = get_opt<std::string>(cfg, "wavelet")) o.wavelet = WaveletChoice::parse(*w);
  o.a_N = get_opt<double>(cfg, "a_n");
  o.v_N = get_opt<double>(cfg, "v_n");
  o.min_len = get_opt<double>(cfg, "min_len");
  o.stride = get_opt<double>(cfg, "stride");
  o.f_min = get_or<double>(cfg, "f_min", o.f_min);
  o.f_max = get_or<double>(cfg, "f_max", o.f_max);
  o.trim = get_or<double>(cfg, "trim", o.trim);
  o.ci_level = get_or<double>(cfg, "ci_level", o.ci_level);
  o.max_margin_fraction = get_or<double>(cfg, "max_margin_fraction", o.max_margin_fraction);
  return o;
}

json matrix_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(row);
  }
  return rows;
}

json estimate_json(Family family, const ThetaEstimate& est,
                   const std::array<ConfidenceInterval, 2>& ci) {
  return json{{"alpha", est.alpha},
              {"log_beta", est.log_beta},
              {"exponent", exponent_from_alpha(family, est.alpha)},
              {"hurst", hurst_from_alpha(family, est.alpha)},
              {"cov", matrix_json(est.cov)},
              {"ci_alpha", {ci[0].lo, ci[0].hi}},
              {"ci_log_beta", {ci[1].lo, ci[1].hi}},
              {"fallback_to_ols", est.fallback}};
}

json report_json(const AnalysisReport& r, const json& cfg, const std::string& hash,
                 const std::string& input_hash, double ci_level) {
  json segs = json::array();
  for (std::size_t j = 0; j < r.segments.size(); ++j) {
    const SegmentFit& s = r.segments[j];
    segs.push_back(json{{"index", j},
                        {"lo", s.segment.lo},
                        {"hi", s.segment.hi},
                        {"window_lo", s.window.lo},
                        {"window_hi", s.window.hi},
                        {"n_eff", s.Y.n_eff},
                        {"log_scale", std::vector<double>(s.log_scales.data(),
                                                          s.log_scales.data() + s.log_scales.size())},
                        {"log_variance",
                         std::vector<double>(s.Y.Y.data(), s.Y.Y.data() + s.Y.Y.size())},
                        {"ols", estimate_json(r.family, s.ols, s.ci_ols)},
                        {"fgls", estimate_json(r.family, s.fgls, s.ci_fgls)},
                        {"gof", {{"T", s.gof.T}, {"df", s.gof.df}, {"p_value", s.gof.p_value}}},
                        {"plugin_clamped", s.plugin_clamped}});
  }
  json seed = cfg.contains("seed") ? cfg.at("seed") : json(nullptr);
  return json{
      {"schema", kResultSchema},
      {"config_hash", hash},
      {"seed", seed},
      {"config", hashed_view(cfg)},
      {"input", {{"N", r.N}, {"delta", r.delta}, {"content_hash", input_hash}}},
      {"family", to_string(r.family)},
      {"exponent_symbol", exponent_symbol(r.family)},
      {"wavelet", r.wavelet},
      {"grid", {{"base", r.grid.base}, {"ratios", r.grid.ratios}, {"trim", r.grid.trim}}},
      {"a_N", r.a_N},
      {"v_N", r.v_N},
      {"margin", r.margin},
      {"margin_capped", r.margin_capped},
      {"constraints",
       {{"m", r.constraints.m},
        {"min_len", r.constraints.min_len},
        {"stride", r.constraints.stride}}},
      {"candidates", r.changes.candidates},
      {"G_min", r.changes.G_min},
      {"k_hat", r.changes.k_hat},
      {"tau_hat", r.changes.tau_hat},
      {"ci_level", ci_level},
      {"segments", segs},
      {"warnings", r.warnings},
      {"numerics",
       {{"lag_sum_relative_tolerance", 1e-10},
        {"ridge_relative", 1e-8},
        {"kernel_gauss_legendre_orders", {10, 20, 30}},
        {"band_gauss_legendre_order", 16},
        {"band_panels", 48}}}};
}

std::string plot_csv(const AnalysisReport& r, const std::string& hash, const json& seed) {
  std::ostringstream os;
  os << "# config_hash=" << hash << "\n# seed=" << (seed.is_null() ? "none" : seed.dump())
     << "\nsegment,scale_index,log_scale,log_variance,fitted\n";
  for (std::size_t j = 0; j < r.segments.size(); ++j) {
    const SegmentFit& s = r.segments[j];
    for (Eigen::Index i = 0; i < s.Y.Y.size(); ++i) {
      const double x = s.log_scales(i);
      const double fit = s.fgls.alpha * x + s.fgls.log_beta;
      os << j << ',' << i << ',' << format17(x) << ',' << format17(s.Y.Y(i)) << ','
         << format17(fit) << '\n';
    }
  }
  return os.str();
}

std::string header_comments(const std::string& tool, const std::string& hash,
                            const json& seed) {
  std::ostringstream os;
  os << "# fracseg " << tool << "\n# config_hash=" << hash
     << "\n# seed=" << (seed.is_null() ? "none" : seed.dump()) << '\n';
  return os.str();
}

int cmd_simulate(const json& cfg, std::ostream& out) {
  const PiecewiseSpec spec = spec_from_config(cfg);
  const std::size_t N = n_from_config(cfg);
  const double delta = delta_from_config(cfg, spec.family, N);
  const auto seed = static_cast<std::uint64_t>(get_or<long long>(cfg, "seed", 1));
  const auto path_out = get_opt<std::string>(cfg, "out");
  if (!path_out) throw DomainError("--out is required for simulate");

  SampledPath path = simulate_piecewise(spec, N, delta, seed);
  if (auto trend = get_opt<std::vector<double>>(cfg, "trend")) {
    path = add_polynomial_trend(std::move(path), *trend);
  }
  json full = cfg;
  full["seed"] = seed;
  const std::string hash = config_hash(full);

  std::ostringstream csv;
  csv << header_comments("simulate", hash, full["seed"]) << "t,x\n";
  for (std::size_t i = 0; i < path.values.size(); ++i) {
    csv << format17(static_cast<double>(i) * delta) << ',' << format17(path.values[i]) << '\n';
  }
  write_file(*path_out, csv.str());

  const json sidecar{{"schema", kSimulateSchema},
                     {"config_hash", hash},
                     {"seed", seed},
                     {"config", hashed_view(full)},
                     {"family", to_string(spec.family)},
                     {"N", N},
                     {"delta", delta},
                     {"tau", spec.tau_stars},
                     {"exponents", spec.exponents},
                     {"sigmas", spec.sigmas},
                     {"f_min", spec.f_min},
                     {"f_max", spec.f_max},
                     {"rows", path.values.size()}};
  write_file(*path_out + ".json", sidecar.dump(2) + "\n");
  out << "wrote " << path.values.size() << " rows to " << *path_out << '\n';
  return kExitOk;
}

int cmd_detect(const json& cfg, std::ostream& out) {
  const auto input = get_opt<std::string>(cfg, "input");
  if (!input) throw DomainError("--input is required for detect");
  const std::string content = read_file(*input);
  std::istringstream in(content);
  SampledPath path;
  try {
    path = read_series_csv(in, get_opt<double>(cfg, "delta"));
  } catch (const IoError& e) {
    throw IoError(*input + ": " + e.what());
  }
  const Family family = parse_family(get_or<std::string>(cfg, "family", "fgn"));
  if (auto n = get_opt<long>(cfg, "n"); n && static_cast<std::size_t>(*n) != path.last_index()) {
    throw DomainError("--n=" + std::to_string(*n) + " but the input holds N=" +
                      std::to_string(path.last_index()) + " (N+1 rows)");
  }
  const AnalysisOptions options = options_from_config(cfg, family);
  const AnalysisReport report = analyze(path, options);
  const std::string hash = config_hash(cfg);
  const json seed = cfg.contains("seed") ? cfg.at("seed") : json(nullptr);
  const std::string result =
      report_json(report, cfg, hash, fnv1a_hex(content), options.ci_level).dump(2) + "\n";
  if (auto dest = get_opt<std::string>(cfg, "out")) {
    write_file(*dest, result);
  } else {
    out << result;
  }
  if (auto plot = get_opt<std::string>(cfg, "plot")) write_file(*plot, plot_csv(report, hash, seed));
  return kExitOk;
}

int cmd_montecarlo(const json& cfg, std::ostream& out) {
  MonteCarloConfig mc;
  mc.spec = spec_from_config(cfg);
  mc.N = n_from_config(cfg);
  mc.delta = delta_from_config(cfg, mc.spec.family, mc.N);
  mc.reps = static_cast<std::size_t>(std::max(0L, get_or<long>(cfg, "reps", 20)));
  mc.seed = static_cast<std::uint64_t>(get_or<long long>(cfg, "seed", 1));
  mc.threads = static_cast<unsigned>(std::max(0L, get_or<long>(cfg, "threads", 1)));
  json analysis = cfg;
  analysis["m"] = mc.spec.num_changes();
  if (mc.spec.family == Family::FBM && !cfg.contains("gap")) {
    double gap = 0.0;
    for (std::size_t j = 1; j < mc.spec.exponents.size(); ++j) {
      gap = std::max(gap, std::abs(mc.spec.exponents[j] - mc.spec.exponents[j - 1]));
    }
    analysis["gap"] = gap;
  }
  mc.options = options_from_config(analysis, mc.spec.family);
  const MonteCarloResult result = run_montecarlo(mc);

  json full = cfg;
  full["seed"] = mc.seed;
  full["reps"] = mc.reps;
  const std::string hash = config_hash(full);
  std::ostringstream summary;
  summary << header_comments("montecarlo", hash, full["seed"]);
  write_summary_csv(summary, result);
  if (auto dest = get_opt<std::string>(cfg, "out")) {
    write_file(*dest, summary.str());
  } else {
    out << summary.str();
  }
  if (auto dest = get_opt<std::string>(cfg, "replicates_out")) {
    std::ostringstream reps;
    reps << header_comments("montecarlo", hash, full["seed"]);
    write_replicates_csv(reps, result);
    write_file(*dest, reps.str());
  }
  if (result.failures > 0) {
    out << "# " << result.failures << " of " << mc.reps << " replicates failed\n";
  }
  return kExitOk;
}

void add_spec_options(Binder& b, CLI::App* app) {
  b.add<std::string>(app, "--family", "family", "fgn | farima | fbm | locfrac");
  b.add<long>(app, "--m", "m", "number of change points");
  b.add<long>(app, "--n", "n", "N (the path has N+1 samples)");
  b.add<double>(app, "--delta", "delta", "sampling step");
  b.add<std::vector<double>>(app, "--tau", "tau", "change fractions in (0,1)")->delimiter(',');
  b.add<std::vector<double>>(app, "--exponents", "exponents",
                             "per-segment D (fgn, farima) or H (fbm, locfrac)")
      ->delimiter(',');
  b.add<std::vector<double>>(app, "--sigmas", "sigmas", "per-segment scale (default 1)")
      ->delimiter(',');
  b.add<long long>(app, "--seed", "seed", "random seed");
  b.add<double>(app, "--f-min", "f_min", "lower frequency of the locally fractional band");
  b.add<double>(app, "--f-max", "f_max", "upper frequency of the locally fractional band");
}

void add_analysis_options(Binder& b, CLI::App* app, bool with_m) {
  if (with_m) {
    b.add<std::string>(app, "--family", "family", "fgn | farima | fbm | locfrac");
    b.add<long>(app, "--m", "m", "known number of change points");
    b.add<long>(app, "--n", "n", "expected N; checked against the input");
    b.add<double>(app, "--delta", "delta", "sampling step for one-column input");
    b.add<long long>(app, "--seed", "seed", "recorded in the outputs");
    b.add<double>(app, "--f-min", "f_min", "lower frequency of the locally fractional band");
    b.add<double>(app, "--f-max", "f_max", "upper frequency of the locally fractional band");
  }
  b.add<long>(app, "--ell", "ell", "number of scales (default max(3, 0.0015 N))");
  b.add<double>(app, "--kappa", "kappa", "rate exponent of the default schedules");
  b.add<std::string>(app, "--wavelet", "wavelet", "poly:Q or band:LAMBDA,MU");
  b.add<double>(app, "--a-n", "a_n", "base scale in samples");
  b.add<double>(app, "--v-n", "v_n", "margin rate: windows shrink by N delta / v_N");
  b.add<double>(app, "--gap", "gap", "largest Hurst gap A between segments (fbm)");
  b.add<double>(app, "--min-len", "min_len", "minimal segment length (time units)");
  b.add<double>(app, "--stride", "stride", "candidate grid step (time units)");
  b.add<double>(app, "--trim", "trim", "trim fraction for band-limited wavelets");
  b.add<double>(app, "--ci-level", "ci_level", "confidence level");
  b.add<double>(app, "--max-margin-fraction", "max_margin_fraction",
                "cap of the margin relative to the shortest segment");
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SampledPath read_series_csv(std::istream& in, std::optional<double> delta) {
  if (delta && (!(*delta > 0.0) || !std::isfinite(*delta))) {
    throw DomainError("delta must be positive");
  }
  std::vector<double> t;
  std::vector<double> x;
  std::vector<std::size_t> rows;
  std::size_t columns = 0;
  bool seen_data = false;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const std::string stripped = trim_ws(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(stripped);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim_ws(cell));
    if (stripped.back() == ',') cells.emplace_back();
    if (cells.size() > 2) {
      throw IoError("row " + std::to_string(row) + ": expected 1 or 2 columns, found " +
                    std::to_string(cells.size()));
    }
    std::vector<std::optional<double>> nums;
    for (const auto& c : cells) nums.push_back(parse_number(c));
    const bool all_text = std::none_of(nums.begin(), nums.end(), [](const auto& v) { return v; });
    if (!seen_data && columns == 0 && all_text) {
      columns = cells.size();
      continue;
    }
    if (columns == 0) columns = cells.size();
    if (cells.size() != columns) {
      throw IoError("row " + std::to_string(row) + ": expected " + std::to_string(columns) +
                    " columns, found " + std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!nums[c] || !std::isfinite(*nums[c])) {
        throw IoError("row " + std::to_string(row) + ", column " + std::to_string(c + 1) +
                      ": '" + cells[c] + "' is not a finite number");
      }
    }
    seen_data = true;
    rows.push_back(row);
    if (columns == 2) {
      t.push_back(*nums[0]);
      x.push_back(*nums[1]);
    } else {
      x.push_back(*nums[0]);
    }
  }
  if (in.bad()) throw IoError("read failure");
  if (x.size() < 3) throw IoError("need at least 3 samples, found " + std::to_string(x.size()));

  SampledPath path;
  path.values = std::move(x);
  if (columns == 2) {
    const std::size_t N = t.size() - 1;
    const double step = (t.back() - t.front()) / static_cast<double>(N);
    if (!(step > 0.0)) throw IoError("time column must be increasing");
    for (std::size_t i = 1; i < t.size(); ++i) {
      const double tol = kSpacingTol * step + 4.0 * kRoundoff * std::abs(t[i]);
      if (std::abs((t[i] - t[i - 1]) - step) > tol) {
        throw IoError("row " + std::to_string(rows[i]) + ", column 1: spacing " +
                      format17(t[i] - t[i - 1]) + " differs from the mean step " + format17(step));
      }
    }
    if (delta && std::abs(*delta - step) > kSpacingTol * step) {
      throw DomainError("--delta " + format17(*delta) + " disagrees with the time column step " +
                        format17(step));
    }
    path.delta = step;
  } else {
    path.delta = delta.value_or(1.0);
  }
  path.validate();
  return path;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Change points in the scaling exponent of Gaussian time series", "fracseg"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file with option values; flags override it");

  Binder sim_b;
  Binder det_b;
  Binder mc_b;
  CLI::App* sim = app.add_subcommand("simulate", "simulate a piecewise path to CSV");
  add_spec_options(sim_b, sim);
  sim_b.add<std::string>(sim, "--out", "out", "output CSV (a .json sidecar is written next to it)");
  sim_b.add<std::vector<double>>(sim, "--trend", "trend", "polynomial trend coefficients")
      ->delimiter(',');
  sim->add_option("--config", config_path, "JSON config");

  CLI::App* det = app.add_subcommand("detect", "detect change points in a CSV series");
  add_analysis_options(det_b, det, true);
  det_b.add<std::string>(det, "--input", "input", "input CSV: x per line, or t,x");
  det_b.add<std::string>(det, "--out", "out", "result JSON (stdout when absent)");
  det_b.add<std::string>(det, "--plot", "plot", "plot CSV of the log-log regressions");
  det->add_option("--config", config_path, "JSON config");

  CLI::App* mc = app.add_subcommand("montecarlo", "replicate simulate + detect and summarize");
  add_spec_options(mc_b, mc);
  add_analysis_options(mc_b, mc, false);
  mc_b.add<long>(mc, "--reps", "reps", "number of replicates (>= 2)");
  mc_b.add<long>(mc, "--threads", "threads", "worker threads (0 = all cores)");
  mc_b.add<std::string>(mc, "--out", "out", "summary CSV (stdout when absent)");
  mc_b.add<std::string>(mc, "--replicates-out", "replicates_out", "per-replicate CSV");
  mc->add_option("--config", config_path, "JSON config");

  std::vector<std::string> rev(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rev.begin(), rev.end());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    json cfg = config_path.empty() ? json::object() : load_config(config_path);
    if (sim->parsed()) {
      sim_b.apply(cfg);
      return cmd_simulate(cfg, out);
    }
    if (det->parsed()) {
      det_b.apply(cfg);
      return cmd_detect(cfg, out);
    }
    mc_b.apply(cfg);
    return cmd_montecarlo(cfg, out);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace fracseg
