#pragma once

// Seeded simulated sources: binary memoryless (BMS), symmetric first-order
// Markov, near-uniform and inverted near-uniform over k symbols.
//
// Random numbers come from CounterRng, a SplitMix64 counter generator:
//
//   output_i = mix(key + i * 0x9E3779B97F4A7C15),  i = 1, 2, ...
//   mix(z):  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//            z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//            z ^ (z >> 31)
//
// Uniform doubles are (output >> 11) * 2^-53. Bernoulli(p) emits 1 when the
// uniform is below p; categorical draws invert the cumulative distribution.
// Everything is integer or exactly rounded, so sequences replay bit-for-bit.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "minent/entropy_core.hpp"
#include "minent/tuple_stats.hpp"

namespace minent {

class CounterRng {
 public:
  using result_type = std::uint64_t;
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept { return mix(key_ + (++counter_) * kGamma); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Independent stream key for trial `index` under `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

enum class SourceFamily { bms, markov, near_uniform, inverted_near_uniform };

const char* to_string(SourceFamily family);
SourceFamily source_family_from_string(const std::string& name);

struct SourceSpec {
  SourceFamily family = SourceFamily::bms;
  /// p for BMS (P(1)) and Markov (flip probability), theta for near-uniform,
  /// psi for inverted near-uniform.
  double param = 0.5;
  std::size_t k = 2;
  std::size_t length = 100000;
  std::uint64_t seed = 0;
  /// Markov only. Unset draws the first state from the stationary
  /// distribution, which is uniform for the symmetric chain.
  std::optional<int> initial_state;

  void validate() const;
  [[nodiscard]] bool is_iid() const noexcept { return family != SourceFamily::markov; }
  /// Per-symbol distribution of the i.i.d. families; for Markov the
  /// stationary-rate equivalent Bernoulli(p).
  [[nodiscard]] Distribution distribution() const;
};

SymbolSequence generate(const SourceSpec& spec);

enum class EntropyKind { min, collision };

/// Min-entropy or collision entropy per symbol (entropy rate for Markov).
double theoretical_entropy(const SourceSpec& spec, EntropyKind kind);

/// Expands each symbol of a power-of-two alphabet to log2(k) bits, most
/// significant bit first.
SymbolSequence binarize(const SymbolSequence& s);

/// Inverse of binarize for the given alphabet size.
SymbolSequence debinarize(const SymbolSequence& bits, std::size_t k);

/// log2(k) for a power of two k >= 2; throws otherwise.
unsigned bits_per_symbol(std::size_t k);

}  // namespace minent
