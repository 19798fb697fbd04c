#pragma once

// The LRS estimator family.
//
//   lrs_nist          NIST SP 800-90B LRS: max over w of the per-symbol w-tuple
//                     collision probability, confidence-adjusted, reported as
//                     -log2 (a collision-entropy estimate).
//   improved_lrs      Same statistic mapped through the sharp upper bound on
//                     the most likely probability, giving a min-entropy estimate.
//   generalized_lrs   Order-alpha power sums in place of collision counts,
//                     inverted by bisection.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "minent/tuple_stats.hpp"

namespace minent {

enum class EstimatorKind { lrs_nist, improved, generalized };

const char* to_string(EstimatorKind kind);
EstimatorKind estimator_kind_from_string(const std::string& name);

struct EstimatorConfig {
  static constexpr int kMaxDefaultAlpha = 8;

  int alpha = 2;
  std::uint64_t cutoff = 35;
  double confidence_z = 2.576;
  TupleMode mode = TupleMode::overlapping;
  double bisect_tol = 1e-12;
  bool apply_confidence = true;
  /// Permit alpha above kMaxDefaultAlpha.
  bool allow_high_alpha = false;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;

  friend bool operator==(const EstimatorConfig&, const EstimatorConfig&) = default;
};

struct PerWValue {
  std::size_t w;
  double value;  // normalized statistic, P~_w or M~_{alpha,w}
};

/// Result of one estimator run.
///
/// For lrs_nist, theta_hat and theta_tilde hold the collision probability
/// p^_c and its confidence-adjusted p~_c. In every case
/// h_estimate == -log2(theta_tilde).
struct MinEntropyEstimate {
  EstimatorKind kind = EstimatorKind::improved;
  int alpha = 2;
  double h_estimate = 0.0;
  double theta_hat = 0.0;
  double theta_tilde = 0.0;
  /// Max over w of the normalized statistic (p^_c, or M~_alpha).
  double m_tilde = 0.0;
  std::size_t u = 0;
  std::size_t v = 0;
  std::size_t winning_w = 0;
  std::vector<PerWValue> per_w;
  /// True when the statistic did not exceed the uniform floor and theta_hat
  /// was set to 1/k.
  bool clamped_uniform = false;
  std::size_t length = 0;
  std::size_t k = 0;
};

/// min(1, x + z sqrt(x(1-x)/(L-1))).
double confidence_adjust(double x, std::size_t length, double z);

/// Normalized per-w statistics over {u, ..., v} plus the range itself.
struct TupleStatistics {
  std::size_t u = 0;
  std::size_t v = 0;
  int alpha = 2;
  std::size_t length = 0;
  std::size_t k = 0;
  std::vector<PerWValue> per_w;
};

/// Steps shared by all three estimators: find u and v, then the normalized
/// alpha-wise collision estimate for every w in range. Throws EstimationError
/// when v cannot be found or v < u.
TupleStatistics collect_statistics(const TupleIndex& index, const EstimatorConfig& cfg);

// Final steps given precomputed statistics. Feeding the same statistics to
// several finishers compares estimators on identical counts.
MinEntropyEstimate finish_lrs_nist(const TupleStatistics& stats, const EstimatorConfig& cfg);
MinEntropyEstimate finish_improved(const TupleStatistics& stats, const EstimatorConfig& cfg);
MinEntropyEstimate finish_generalized(const TupleStatistics& stats, const EstimatorConfig& cfg);

MinEntropyEstimate lrs_nist(const TupleIndex& index, EstimatorConfig cfg);
MinEntropyEstimate improved_lrs(const TupleIndex& index, EstimatorConfig cfg);
MinEntropyEstimate generalized_lrs(const TupleIndex& index, const EstimatorConfig& cfg);

MinEntropyEstimate lrs_nist(const SymbolSequence& s, const EstimatorConfig& cfg = {});
MinEntropyEstimate improved_lrs(const SymbolSequence& s, const EstimatorConfig& cfg = {});
MinEntropyEstimate generalized_lrs(const SymbolSequence& s, const EstimatorConfig& cfg = {});

/// Dispatch on kind. lrs_nist and improved always run at order 2.
MinEntropyEstimate run_estimator(EstimatorKind kind, const TupleIndex& index,
                                 const EstimatorConfig& cfg);

}  // namespace minent
