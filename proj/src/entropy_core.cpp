#include "minent/entropy_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace minent {

namespace {

// Slack for bound arguments that arrive from floating-point computations
// sitting exactly on an interval endpoint (pc == 1/k, theta == 1, ...).
constexpr double kEdgeSlack = 1e-12;

void require_alphabet(std::size_t k, std::size_t min_k, const char* what) {
  if (k < min_k) {
    throw std::invalid_argument(std::string(what) + ": alphabet size must be at least " +
                                std::to_string(min_k));
  }
}

}  // namespace

Distribution::Distribution(std::vector<double> probs, bool normalize) : probs_(std::move(probs)) {
  if (probs_.empty()) {
    throw std::invalid_argument("distribution: empty probability vector");
  }
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) {
      throw std::invalid_argument("distribution: probabilities must be finite and non-negative");
    }
  }
  const double sum = std::accumulate(probs_.begin(), probs_.end(), 0.0);
  if (normalize) {
    if (!(sum > 0.0)) {
      throw std::invalid_argument("distribution: cannot normalize a zero vector");
    }
    for (double& p : probs_) p /= sum;
    return;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw std::invalid_argument("distribution: probabilities sum to " + std::to_string(sum) +
                                ", not 1");
  }
}

double Distribution::max() const noexcept {
  return *std::max_element(probs_.begin(), probs_.end());
}

double shannon_entropy(const Distribution& d) {
  double h = 0.0;
  for (double p : d.probs()) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h + 0.0;
}

double renyi_entropy(const Distribution& d, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("renyi_entropy: order must be positive and finite");
  }
  if (alpha == 1.0) {
    throw std::invalid_argument("renyi_entropy: order 1 is the Shannon entropy");
  }
  // log2 sum p^a = a log2(theta) + log2 sum (p/theta)^a; the scaled sum is in [1, k].
  const double theta = d.max();
  double scaled = 0.0;
  for (double p : d.probs()) {
    if (p > 0.0) scaled += std::pow(p / theta, alpha);
  }
  const double log_sum = alpha * std::log2(theta) + std::log2(scaled);
  return std::max(0.0, log_sum / (1.0 - alpha));
}

double min_entropy(const Distribution& d) { return 0.0 - std::log2(d.max()); }

double power_sum(const Distribution& d, double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("power_sum: order must be positive");
  }
  double sum = 0.0;
  for (double p : d.probs()) {
    if (p > 0.0) sum += std::pow(p, alpha);
  }
  return sum;
}

Distribution near_uniform(double theta, std::size_t k) {
  require_alphabet(k, 2, "near_uniform");
  const double floor = 1.0 / static_cast<double>(k);
  if (!(theta >= floor - kEdgeSlack) || !(theta <= 1.0 + kEdgeSlack)) {
    throw std::domain_error("near_uniform: theta must lie in [1/k, 1]");
  }
  theta = std::clamp(theta, floor, 1.0);
  std::vector<double> probs(k, (1.0 - theta) / static_cast<double>(k - 1));
  probs[0] = theta;
  return Distribution(std::move(probs));
}

Distribution inverted_near_uniform(double psi, std::size_t k) {
  require_alphabet(k, 1, "inverted_near_uniform");
  const double floor = 1.0 / static_cast<double>(k);
  if (!(psi >= floor - kEdgeSlack) || !(psi <= 1.0 + kEdgeSlack)) {
    throw std::domain_error("inverted_near_uniform: psi must lie in [1/k, 1]");
  }
  psi = std::clamp(psi, floor, 1.0);

  // floor(1/psi), corrected for 1/psi landing a rounding error off an integer.
  auto full = static_cast<std::size_t>(std::floor(1.0 / psi));
  while (full > 1 && static_cast<double>(full) * psi > 1.0 + kEdgeSlack) --full;
  while (static_cast<double>(full + 1) * psi <= 1.0 + kEdgeSlack) ++full;

  double residual = 1.0 - static_cast<double>(full) * psi;
  if (residual < kEdgeSlack) residual = 0.0;
  const std::size_t used = full + (residual > 0.0 ? 1 : 0);
  if (used > k) {
    throw std::domain_error("inverted_near_uniform: alphabet of size " + std::to_string(k) +
                            " cannot hold " + std::to_string(used) + " masses");
  }
  std::vector<double> probs(k, 0.0);
  std::fill_n(probs.begin(), full, psi);
  if (residual > 0.0) probs[full] = residual;
  return Distribution(std::move(probs));
}

double near_uniform_power_sum(double theta, double alpha, std::size_t k) {
  require_alphabet(k, 2, "near_uniform_power_sum");
  const double head = std::pow(theta, alpha);
  if (theta >= 1.0) return head;
  const double log_tail =
      alpha * std::log1p(-theta) - (alpha - 1.0) * std::log(static_cast<double>(k - 1));
  return head + std::exp(log_tail);
}

double theta_upper_bound(double pc, std::size_t k) {
  require_alphabet(k, 2, "theta_upper_bound");
  const auto kd = static_cast<double>(k);
  if (!(pc >= 1.0 / kd - kEdgeSlack) || !(pc <= 1.0 + kEdgeSlack)) {
    throw std::domain_error("theta_upper_bound: collision probability must lie in [1/k, 1]");
  }
  const double radicand = std::max(0.0, (kd - 1.0) * (pc * kd - 1.0));
  return std::min(1.0, (std::sqrt(radicand) + 1.0) / kd);
}

double theta_lower_bound(double pc) {
  if (!(pc > 0.0) || !(pc <= 1.0 + kEdgeSlack)) {
    throw std::domain_error("theta_lower_bound: collision probability must lie in (0, 1]");
  }
  pc = std::min(pc, 1.0);
  const double n = std::floor(1.0 / pc);
  const double radicand = std::max(0.0, n * (pc * (n + 1.0) - 1.0));
  return std::min(1.0, (std::sqrt(radicand) + n) / (n * (n + 1.0)));
}

double estimation_gap(double pc, std::size_t k) {
  return theta_upper_bound(pc, k) - theta_lower_bound(pc);
}

double solve_theta_from_power_sum(double m_tilde, int alpha, std::size_t k, double tol) {
  require_alphabet(k, 2, "solve_theta_from_power_sum");
  if (alpha < 2) {
    throw std::invalid_argument("solve_theta_from_power_sum: order must be at least 2");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("solve_theta_from_power_sum: tolerance must be positive");
  }
  if (std::isnan(m_tilde)) {
    throw std::domain_error("solve_theta_from_power_sum: power sum is NaN");
  }
  if (m_tilde > 1.0 + kEdgeSlack) {
    throw std::domain_error("solve_theta_from_power_sum: power sum exceeds 1");
  }

  double lo = 1.0 / static_cast<double>(k);
  double hi = 1.0;
  const auto a = static_cast<double>(alpha);
  if (m_tilde <= near_uniform_power_sum(lo, a, k)) return lo;
  if (m_tilde >= 1.0) return hi;

  for (int iter = 0; iter < kBisectMaxIterations; ++iter) {
    if (hi - lo <= tol) return 0.5 * (lo + hi);
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) return mid;  // bracket at double resolution
    const double f = near_uniform_power_sum(mid, a, k);
    if (std::isnan(f)) break;
    if (f < m_tilde) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw std::runtime_error("solve_theta_from_power_sum: bisection did not converge");
}

double variance_ratio_prediction(int alpha) {
  if (alpha < 2) {
    throw std::invalid_argument("variance_ratio_prediction: order must be at least 2");
  }
  const double r = static_cast<double>(alpha) / static_cast<double>(alpha + 1);
  return r * r * r * r;
}

double log_binomial(double n, double r) {
  return std::lgamma(n + 1.0) - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0);
}

double v_bar_prediction(double m_alpha, std::size_t l, int alpha) {
  if (!(m_alpha > 0.0) || !(m_alpha < 1.0)) {
    throw std::domain_error("v_bar_prediction: power sum must lie strictly inside (0, 1)");
  }
  if (alpha < 2 || l <= static_cast<std::size_t>(alpha)) {
    throw std::invalid_argument("v_bar_prediction: need l > alpha >= 2");
  }
  return log_binomial(static_cast<double>(l), alpha) / -std::log(m_alpha);
}

}  // namespace minent
