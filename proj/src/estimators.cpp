#include "minent/estimators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "minent/entropy_core.hpp"

namespace minent {

const char* to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::lrs_nist:
      return "lrs";
    case EstimatorKind::improved:
      return "improved";
    case EstimatorKind::generalized:
      return "generalized";
  }
  return "unknown";
}

EstimatorKind estimator_kind_from_string(const std::string& name) {
  if (name == "lrs" || name == "lrs_nist") return EstimatorKind::lrs_nist;
  if (name == "improved") return EstimatorKind::improved;
  if (name == "generalized") return EstimatorKind::generalized;
  throw std::invalid_argument("unknown estimator '" + name + "'");
}

void EstimatorConfig::validate() const {
  if (alpha < 2) throw std::invalid_argument("config: alpha must be at least 2");
  if (alpha > kMaxDefaultAlpha && !allow_high_alpha) {
    throw std::invalid_argument("config: alpha above " + std::to_string(kMaxDefaultAlpha) +
                                " needs the high-alpha override");
  }
  if (cutoff < 2) throw std::invalid_argument("config: cutoff must be at least 2");
  if (!(confidence_z >= 0.0) || !std::isfinite(confidence_z)) {
    throw std::invalid_argument("config: confidence z must be finite and non-negative");
  }
  if (!(bisect_tol > 0.0)) throw std::invalid_argument("config: bisection tolerance must be positive");
}

double confidence_adjust(double x, std::size_t length, double z) {
  if (length < 2) throw std::invalid_argument("confidence_adjust: need at least 2 samples");
  if (!(x >= 0.0) || x > 1.0) throw std::domain_error("confidence_adjust: x must lie in [0, 1]");
  const double margin = z * std::sqrt(x * (1.0 - x) / static_cast<double>(length - 1));
  return std::min(1.0, x + margin);
}

TupleStatistics collect_statistics(const TupleIndex& index, const EstimatorConfig& cfg) {
  cfg.validate();
  const SymbolSequence& s = index.sequence();
  if (s.k() < 2) throw std::invalid_argument("estimator: alphabet size must be at least 2");

  TupleStatistics stats;
  stats.alpha = cfg.alpha;
  stats.length = s.size();
  stats.k = s.k();
  stats.u = index.find_u(cfg.cutoff);
  try {
    stats.v = index.find_v(static_cast<unsigned>(cfg.alpha));
  } catch (const EstimationError& e) {
    throw EstimationError(e.code(), e.what(), stats.u, 0);
  }
  if (stats.v < stats.u) {
    throw EstimationError(EstimationErrc::range_empty,
                          "tuple-length range is empty: u = " + std::to_string(stats.u) +
                              " exceeds v = " + std::to_string(stats.v),
                          stats.u, stats.v);
  }

  const auto alpha = static_cast<unsigned>(cfg.alpha);
  stats.per_w.reserve(stats.v - stats.u + 1);
  for (std::size_t w = stats.u; w <= stats.v; ++w) {
    const CollisionTally tally = index.tally(w, alpha, cfg.mode);
    if (tally.total < alpha) {
      throw EstimationError(EstimationErrc::sequence_too_short,
                            "only " + std::to_string(tally.total) + " " + std::to_string(w) +
                                "-tuples for order " + std::to_string(alpha),
                            stats.u, stats.v);
    }
    stats.per_w.push_back({w, normalize_per_sample(estimate_power_sum(tally, alpha), w)});
  }
  return stats;
}

namespace {

MinEntropyEstimate start_estimate(EstimatorKind kind, const TupleStatistics& stats) {
  if (stats.per_w.empty()) throw std::invalid_argument("estimator: no per-w statistics");
  MinEntropyEstimate est;
  est.kind = kind;
  est.alpha = stats.alpha;
  est.u = stats.u;
  est.v = stats.v;
  est.per_w = stats.per_w;
  est.length = stats.length;
  est.k = stats.k;
  // Smallest w attaining the maximum.
  est.winning_w = stats.per_w.front().w;
  est.m_tilde = stats.per_w.front().value;
  for (const auto& pw : stats.per_w) {
    if (pw.value > est.m_tilde) {
      est.m_tilde = pw.value;
      est.winning_w = pw.w;
    }
  }
  return est;
}

void finish_with_theta(MinEntropyEstimate& est, double theta_hat, const EstimatorConfig& cfg) {
  est.theta_hat = theta_hat;
  est.theta_tilde =
      cfg.apply_confidence ? confidence_adjust(theta_hat, est.length, cfg.confidence_z) : theta_hat;
  est.h_estimate = 0.0 - std::log2(est.theta_tilde);
}

void require_order_two(const TupleStatistics& stats, const char* who) {
  if (stats.alpha != 2) {
    throw std::invalid_argument(std::string(who) + ": needs order-2 statistics");
  }
}

}  // namespace

MinEntropyEstimate finish_lrs_nist(const TupleStatistics& stats, const EstimatorConfig& cfg) {
  require_order_two(stats, "lrs_nist");
  MinEntropyEstimate est = start_estimate(EstimatorKind::lrs_nist, stats);
  finish_with_theta(est, est.m_tilde, cfg);
  return est;
}

MinEntropyEstimate finish_improved(const TupleStatistics& stats, const EstimatorConfig& cfg) {
  require_order_two(stats, "improved_lrs");
  MinEntropyEstimate est = start_estimate(EstimatorKind::improved, stats);
  const double uniform = 1.0 / static_cast<double>(stats.k);
  double theta_hat = uniform;
  if (est.m_tilde > uniform) {
    theta_hat = theta_upper_bound(est.m_tilde, stats.k);
  } else {
    est.clamped_uniform = true;
  }
  finish_with_theta(est, theta_hat, cfg);
  return est;
}

MinEntropyEstimate finish_generalized(const TupleStatistics& stats, const EstimatorConfig& cfg) {
  MinEntropyEstimate est = start_estimate(EstimatorKind::generalized, stats);
  const auto k = static_cast<double>(stats.k);
  // 1/k^(alpha-1); at alpha == 2 this is exactly the improved estimator's 1/k.
  const double floor = 1.0 / std::pow(k, stats.alpha - 1);
  double theta_hat = 1.0 / k;
  if (est.m_tilde > floor) {
    theta_hat = stats.alpha == 2 ? theta_upper_bound(est.m_tilde, stats.k)
                                 : solve_theta_from_power_sum(est.m_tilde, stats.alpha, stats.k,
                                                              cfg.bisect_tol);
  } else {
    est.clamped_uniform = true;
  }
  finish_with_theta(est, theta_hat, cfg);
  return est;
}

MinEntropyEstimate lrs_nist(const TupleIndex& index, EstimatorConfig cfg) {
  cfg.alpha = 2;
  return finish_lrs_nist(collect_statistics(index, cfg), cfg);
}

MinEntropyEstimate improved_lrs(const TupleIndex& index, EstimatorConfig cfg) {
  cfg.alpha = 2;
  return finish_improved(collect_statistics(index, cfg), cfg);
}

MinEntropyEstimate generalized_lrs(const TupleIndex& index, const EstimatorConfig& cfg) {
  return finish_generalized(collect_statistics(index, cfg), cfg);
}

MinEntropyEstimate lrs_nist(const SymbolSequence& s, const EstimatorConfig& cfg) {
  return lrs_nist(TupleIndex(s), cfg);
}

MinEntropyEstimate improved_lrs(const SymbolSequence& s, const EstimatorConfig& cfg) {
  return improved_lrs(TupleIndex(s), cfg);
}

MinEntropyEstimate generalized_lrs(const SymbolSequence& s, const EstimatorConfig& cfg) {
  return generalized_lrs(TupleIndex(s), cfg);
}

MinEntropyEstimate run_estimator(EstimatorKind kind, const TupleIndex& index,
                                 const EstimatorConfig& cfg) {
  switch (kind) {
    case EstimatorKind::lrs_nist:
      return lrs_nist(index, cfg);
    case EstimatorKind::improved:
      return improved_lrs(index, cfg);
    case EstimatorKind::generalized:
      return generalized_lrs(index, cfg);
  }
  throw std::invalid_argument("run_estimator: unknown estimator");
}

}  // namespace minent
