#pragma once

// Entropy and power-sum math on explicit distributions, the extremal
// distributions that bound the most likely probability for a given power sum,
// and the inversion used by the order-alpha estimator.

#include <cstddef>
#include <span>
#include <vector>

namespace minent {

/// Probability vector over an alphabet of size k = probs().size().
///
/// Construction validates: k >= 1, every p_i >= 0, sum within 1e-12 of one.
/// Inputs are renormalized only when explicitly asked for.
class Distribution {
 public:
  static constexpr double kSumTolerance = 1e-12;

  explicit Distribution(std::vector<double> probs, bool normalize = false);

  [[nodiscard]] std::span<const double> probs() const noexcept { return probs_; }
  [[nodiscard]] std::size_t k() const noexcept { return probs_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return probs_[i]; }

  /// Largest probability (theta).
  [[nodiscard]] double max() const noexcept;

 private:
  std::vector<double> probs_;
};

double shannon_entropy(const Distribution& d);

/// (1/(1-alpha)) log2 sum p_i^alpha. Rejects alpha == 1 and alpha <= 0.
/// Evaluated relative to the largest mass so large orders do not underflow.
double renyi_entropy(const Distribution& d, double alpha);

double min_entropy(const Distribution& d);

/// sum p_i^alpha for alpha > 0.
double power_sum(const Distribution& d, double alpha);

/// theta on the first symbol, (1-theta)/(k-1) on each of the rest.
Distribution near_uniform(double theta, std::size_t k);

/// floor(1/psi) masses of psi, one residual 1 - floor(1/psi) psi, zeros after.
Distribution inverted_near_uniform(double psi, std::size_t k);

/// Power sum of order alpha of near_uniform(theta, k), evaluated in log space
/// for the tail term: theta^alpha + (1-theta)^alpha / (k-1)^(alpha-1).
double near_uniform_power_sum(double theta, double alpha, std::size_t k);

/// Sharp upper bound on theta given the collision probability pc:
/// (sqrt((k-1)(pc k - 1)) + 1) / k. Requires pc >= 1/k.
double theta_upper_bound(double pc, std::size_t k);

/// Sharp lower bound on theta given the collision probability pc, attained by
/// the inverted near-uniform distribution. Independent of k.
double theta_lower_bound(double pc);

/// theta_upper_bound(pc, k) - theta_lower_bound(pc).
double estimation_gap(double pc, std::size_t k);

inline constexpr double kDefaultBisectTolerance = 1e-12;
inline constexpr int kBisectMaxIterations = 200;

/// Solves near_uniform_power_sum(theta, alpha, k) == m_tilde for theta in
/// [1/k, 1] by bisection. The left side is non-decreasing on that interval so
/// the root is unique. Values at or below the uniform power sum 1/k^(alpha-1)
/// map to 1/k. Throws std::domain_error for m_tilde > 1 or NaN, and
/// std::runtime_error if the bracket does not shrink to tol.
double solve_theta_from_power_sum(double m_tilde, int alpha, std::size_t k,
                                  double tol = kDefaultBisectTolerance);

/// Predicted Var(theta_{alpha+1}) / Var(theta_alpha) on uniform sources:
/// (alpha/(alpha+1))^4.
double variance_ratio_prediction(int alpha);

/// Expected largest tuple length with an alpha-fold repeat:
/// log_{1/m_alpha} binomial(l, alpha).
double v_bar_prediction(double m_alpha, std::size_t l, int alpha);

/// Natural log of binomial(n, r) via lgamma.
double log_binomial(double n, double r);

}  // namespace minent
