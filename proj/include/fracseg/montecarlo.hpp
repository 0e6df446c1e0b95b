#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "fracseg/pipeline.hpp"
#include "fracseg/synth.hpp"

namespace fracseg {

struct MonteCarloConfig {
  PiecewiseSpec spec;
  std::size_t N = 1000;
  double delta = 1.0;
  std::size_t reps = 2;
  std::uint64_t seed = 1;
  /// 0 uses the hardware concurrency.
  unsigned threads = 1;
  AnalysisOptions options;
};

struct ReplicateResult {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::vector<double> tau_hat;
  std::vector<double> exponent_ols;
  std::vector<double> exponent_fgls;
  std::vector<double> gof_T;
  std::vector<double> gof_p;
};

struct SummaryRow {
  std::string quantity;
  double truth = 0.0;
  double mean = 0.0;
  /// Empirical standard deviation (divisor n).
  double sigma_hat = 0.0;
  double sqrt_mse = 0.0;
  std::size_t count = 0;
};

struct MonteCarloResult {
  std::vector<ReplicateResult> replicates;
  std::vector<SummaryRow> summary;
  std::size_t failures = 0;
};

/// Replicate i uses seed + i, so results do not depend on the thread count.
MonteCarloResult run_montecarlo(const MonteCarloConfig& config);

/// quantity,truth,mean,sigma_hat,sqrt_mse,count
void write_summary_csv(std::ostream& os, const MonteCarloResult& result);
void write_replicates_csv(std::ostream& os, const MonteCarloResult& result);

/// Name of the exponent column: "D" for long memory, "H" otherwise.
std::string exponent_symbol(Family family);

}  // namespace fracseg
