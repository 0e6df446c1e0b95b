#include "fracseg/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "fracseg/errors.hpp"

namespace fracseg {

namespace {

ReplicateResult run_one(const MonteCarloConfig& config, std::size_t index) {
  ReplicateResult r;
  r.index = index;
  r.seed = config.seed + index;
  try {
    const SampledPath path = simulate_piecewise(config.spec, config.N, config.delta, r.seed);
    const AnalysisReport report = analyze(path, config.options);
    r.tau_hat = report.changes.tau_hat;
    for (const auto& seg : report.segments) {
      r.exponent_ols.push_back(seg.exponent_ols);
      r.exponent_fgls.push_back(seg.exponent_fgls);
      r.gof_T.push_back(seg.gof.T);
      r.gof_p.push_back(seg.gof.p_value);
    }
    r.ok = true;
  } catch (const Error& e) {
    r.error = e.what();
  }
  return r;
}

SummaryRow summarize(const std::string& name, double truth, const std::vector<double>& xs) {
  SummaryRow row;
  row.quantity = name;
  row.truth = truth;
  row.count = xs.size();
  if (xs.empty()) {
    row.mean = row.sigma_hat = row.sqrt_mse = std::nan("");
    return row;
  }
  const double n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  row.mean = sum / n;
  double ss = 0.0;
  double se = 0.0;
  for (double x : xs) {
    ss += (x - row.mean) * (x - row.mean);
    se += (x - truth) * (x - truth);
  }
  row.sigma_hat = std::sqrt(ss / n);
  row.sqrt_mse = std::isfinite(truth) ? std::sqrt(se / n) : std::nan("");
  return row;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace

std::string exponent_symbol(Family family) { return is_long_memory(family) ? "D" : "H"; }

MonteCarloResult run_montecarlo(const MonteCarloConfig& config) {
  config.spec.validate();
  if (config.reps < 2) throw DomainError("Monte Carlo needs at least 2 replicates");
  if (config.options.m != config.spec.num_changes()) {
    throw DomainError("analysis m differs from the number of simulated change points");
  }
  MonteCarloResult result;
  result.replicates.resize(config.reps);
  unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                         : config.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, config.reps));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < config.reps; i = next++) {
      result.replicates[i] = run_one(config, i);
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  const std::size_t m = config.spec.num_changes();
  const std::string sym = exponent_symbol(config.spec.family);
  std::vector<std::vector<double>> tau(m);
  std::vector<std::vector<double>> ols(m + 1);
  std::vector<std::vector<double>> fgls(m + 1);
  std::vector<std::vector<double>> T(m + 1);
  for (const auto& r : result.replicates) {
    if (!r.ok) {
      ++result.failures;
      continue;
    }
    for (std::size_t j = 0; j < m; ++j) tau[j].push_back(r.tau_hat[j]);
    for (std::size_t j = 0; j <= m; ++j) {
      ols[j].push_back(r.exponent_ols[j]);
      fgls[j].push_back(r.exponent_fgls[j]);
      T[j].push_back(r.gof_T[j]);
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    result.summary.push_back(
        summarize("tau_" + std::to_string(j + 1), config.spec.tau_stars[j], tau[j]));
  }
  for (std::size_t j = 0; j <= m; ++j) {
    const double truth = config.spec.exponents[j];
    result.summary.push_back(summarize(sym + "_ols_" + std::to_string(j), truth, ols[j]));
    result.summary.push_back(summarize(sym + "_fgls_" + std::to_string(j), truth, fgls[j]));
  }
  for (std::size_t j = 0; j <= m; ++j) {
    result.summary.push_back(summarize("gof_T_" + std::to_string(j), std::nan(""), T[j]));
  }
  return result;
}

void write_summary_csv(std::ostream& os, const MonteCarloResult& result) {
  os << "quantity,truth,mean,sigma_hat,sqrt_mse,count\n";
  for (const auto& row : result.summary) {
    os << row.quantity << ',' << fmt(row.truth) << ',' << fmt(row.mean) << ','
       << fmt(row.sigma_hat) << ',' << fmt(row.sqrt_mse) << ',' << row.count << '\n';
  }
}

void write_replicates_csv(std::ostream& os, const MonteCarloResult& result) {
  std::size_t m = 0;
  std::size_t segs = 0;
  for (const auto& r : result.replicates) {
    if (r.ok) {
      m = r.tau_hat.size();
      segs = r.exponent_ols.size();
      break;
    }
  }
  os << "replicate,seed,ok";
  for (std::size_t j = 0; j < m; ++j) os << ",tau_" << j + 1;
  for (std::size_t j = 0; j < segs; ++j) {
    os << ",ols_" << j << ",fgls_" << j << ",T_" << j << ",p_" << j;
  }
  os << ",error\n";
  for (const auto& r : result.replicates) {
    os << r.index << ',' << r.seed << ',' << (r.ok ? 1 : 0);
    for (std::size_t j = 0; j < m; ++j) os << ',' << (r.ok ? fmt(r.tau_hat[j]) : "");
    for (std::size_t j = 0; j < segs; ++j) {
      if (r.ok) {
        os << ',' << fmt(r.exponent_ols[j]) << ',' << fmt(r.exponent_fgls[j]) << ','
           << fmt(r.gof_T[j]) << ',' << fmt(r.gof_p[j]);
      } else {
        os << ",,,,";
      }
    }
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    os << ',' << err << '\n';
  }
}

}  // namespace fracseg
