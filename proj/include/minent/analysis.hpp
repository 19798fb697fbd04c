#pragma once

// Monte-Carlo harness: seeded trial batches, bias and variance sweeps, bound
// curves, the exact small-l expectation oracle and the v-bar check.
//
// Trial i of a batch uses seed derive_seed(base_seed, i). Trials run on a
// thread pool and are aggregated by trial index, so results do not depend on
// the thread count.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "minent/estimators.hpp"
#include "minent/sources.hpp"

namespace minent {

/// One estimator with its configuration.
struct EstimatorSetup {
  EstimatorKind kind = EstimatorKind::improved;
  EstimatorConfig cfg;
};

/// "lrs", "improved", or "generalized_a<alpha>".
std::string estimator_label(const EstimatorSetup& setup);

struct TrialOptions {
  std::size_t n_trials = 100;
  std::uint64_t base_seed = 1;
  /// 0 picks the hardware concurrency.
  unsigned threads = 0;
  /// Estimate on the MSB-first binary expansion and scale the per-bit
  /// result by log2(k). Only meaningful for k > 2.
  bool binarize = false;
};

/// Per-estimator outcome of a batch. Failed trials (EstimationError) are
/// excluded from the statistics and counted.
struct TrialReport {
  SourceSpec spec;
  EstimatorSetup setup;
  std::uint64_t base_seed = 0;
  bool binarized = false;
  /// Successful trials; equals estimates.size().
  std::size_t n_trials = 0;
  std::size_t failed = 0;
  std::vector<double> estimates;
  /// theta-hat per trial, per bit when binarized.
  std::vector<double> theta_hats;
  double mean = 0.0;
  double sample_variance = 0.0;
  double theta_mean = 0.0;
  double theta_variance = 0.0;
  /// Theoretical min-entropy (rate) per original symbol.
  double reference = 0.0;
  double reference_collision = 0.0;
};

unsigned resolve_threads(unsigned requested);

/// Runs every setup on the same generated sequences (one index per trial).
std::vector<TrialReport> run_trials(const SourceSpec& spec, const std::vector<EstimatorSetup>& setups,
                                    const TrialOptions& options);
TrialReport run_trials(const SourceSpec& spec, const EstimatorSetup& setup,
                       const TrialOptions& options);

/// Column-named numeric table. NaN marks a cell with no value.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  [[nodiscard]] std::size_t column(const std::string& name) const;
  [[nodiscard]] double at(std::size_t row, const std::string& name) const;
};

void write_csv(const Table& table, std::ostream& out);
/// {"columns": [...], "rows": [{column: value, ...}, ...]} with null for NaN.
std::string table_to_json(const Table& table);

/// Per grid value: theoretical h_min and h_collision, then
/// <label>_mean, <label>_std, <label>_var_theta, <label>_failed per setup.
/// `base` supplies family, k, length and (for Markov) the initial state.
Table bias_sweep(const SourceSpec& base, const std::vector<double>& grid,
                 const std::vector<EstimatorSetup>& setups, const TrialOptions& options);

/// Generalized estimator at each order on shared sequences. Columns: alpha,
/// mean_h, var_h, var_theta, failed, ratio_next (Var theta at alpha+1 over
/// alpha; NaN on the last row), predicted_ratio.
Table variance_sweep(const SourceSpec& spec, const std::vector<int>& alphas,
                     const EstimatorConfig& cfg, const TrialOptions& options);

/// Columns pc, theta_hat, psi, h_from_theta_hat, h_from_psi, h_collision.
/// Every pc must lie in [1/k, 1].
Table bound_curves(const std::vector<double>& pc_grid, std::size_t k);

/// Exact E[M^_{alpha,1}] over all 2^l binary sequences under Bernoulli(p),
/// summed in 50-digit decimal arithmetic. Requires alpha <= l <= 14.
double exact_expectation_oracle(double p, std::size_t l, unsigned alpha);

/// Columns alpha, v_mean, v_predicted, ratio_empirical, ratio_predicted.
/// The ratios compare alpha+1 to alpha (NaN on the last row). Requires an
/// i.i.d. source whose power sums are below 1.
Table v_bar_check(const SourceSpec& spec, const std::vector<int>& alphas,
                  const TrialOptions& options);

/// n evenly spaced points from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, std::size_t n);

}  // namespace minent
