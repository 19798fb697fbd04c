#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace minent {

enum class EstimationErrc {
  /// No tuple repeats often enough to define v for the requested order.
  sequence_too_short,
  /// The tuple-length range {u, ..., v} is empty (v < u).
  range_empty,
};

const char* to_string(EstimationErrc code);

/// A data-insufficiency condition: the sequence cannot support the requested
/// estimate. Carries u and v when they were computed (0 otherwise).
class EstimationError : public std::runtime_error {
 public:
  EstimationError(EstimationErrc code, const std::string& what, std::size_t u = 0,
                  std::size_t v = 0)
      : std::runtime_error(what), code_(code), u_(u), v_(v) {}

  [[nodiscard]] EstimationErrc code() const noexcept { return code_; }
  [[nodiscard]] std::size_t u() const noexcept { return u_; }
  [[nodiscard]] std::size_t v() const noexcept { return v_; }

 private:
  EstimationErrc code_;
  std::size_t u_;
  std::size_t v_;
};

}  // namespace minent
