#pragma once

// Tuple statistics over a symbol sequence: w-tuple occurrence counts in both
// overlapping and non-overlapping layouts, the u/v tuple-length search, and
// the unbiased alpha-wise collision estimator of the w-tuple power sum.
//
// Everything is answered from one suffix array + LCP index, so tuple identity
// is decided by exact comparison and never by hashing.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "minent/errors.hpp"

namespace minent {

using Symbol = std::uint16_t;

/// Wide unsigned integer for exact collision counts; binomial(l, 8) for
/// l near 2^32 still fits.
using BigCount = boost::multiprecision::uint256_t;

/// Observed sequence over the alphabet {0, ..., k-1}.
class SymbolSequence {
 public:
  static constexpr std::size_t kMaxAlphabet = std::size_t{1} << 16;

  SymbolSequence(std::vector<Symbol> symbols, std::size_t k);

  [[nodiscard]] std::span<const Symbol> symbols() const noexcept { return symbols_; }
  [[nodiscard]] std::size_t k() const noexcept { return k_; }
  [[nodiscard]] std::size_t size() const noexcept { return symbols_.size(); }
  [[nodiscard]] Symbol operator[](std::size_t i) const { return symbols_[i]; }

  friend bool operator==(const SymbolSequence&, const SymbolSequence&) = default;

 private:
  std::vector<Symbol> symbols_;
  std::size_t k_;
};

enum class TupleMode { overlapping, non_overlapping };

const char* to_string(TupleMode mode);

/// One distinct w-tuple: its first start position in the sequence and its
/// occurrence count.
struct TupleClass {
  std::size_t first_position;
  std::uint64_t count;
};

/// Occurrence counts of every distinct w-tuple. Classes are ordered by first
/// position; counts sum to total.
struct TupleCountTable {
  std::size_t w = 0;
  TupleMode mode = TupleMode::overlapping;
  std::vector<TupleClass> classes;
  std::uint64_t total = 0;
};

/// sum_i binomial(C_i, alpha) and the tuple total for one (w, mode), gathered
/// without materializing the table.
struct CollisionTally {
  BigCount collisions = 0;
  std::uint64_t total = 0;
};

/// Suffix array and LCP array over one sequence.
///
/// Construction is O(L log L) prefix doubling with early exit once all
/// ranks are distinct, followed by Kasai's LCP. Queries are read-only.
class TupleIndex {
 public:
  explicit TupleIndex(SymbolSequence sequence);

  [[nodiscard]] const SymbolSequence& sequence() const noexcept { return seq_; }
  [[nodiscard]] std::span<const std::uint32_t> suffix_array() const noexcept { return sa_; }
  /// lcp()[i] is the common prefix length of suffixes sa[i-1] and sa[i]; lcp()[0] = 0.
  [[nodiscard]] std::span<const std::uint32_t> lcp() const noexcept { return lcp_; }

  /// Occurrence count of the most common overlapping w-tuple, 0 if w > L.
  [[nodiscard]] std::uint64_t max_count(std::size_t w) const;

  /// Smallest u whose most common overlapping u-tuple occurs fewer than
  /// cutoff times.
  [[nodiscard]] std::size_t find_u(std::uint64_t cutoff) const;

  /// Largest v such that some overlapping v-tuple occurs at least alpha
  /// times. Throws EstimationError when no symbol occurs alpha times.
  [[nodiscard]] std::size_t find_v(unsigned alpha) const;

  [[nodiscard]] TupleCountTable count(std::size_t w, TupleMode mode) const;

  /// sum_i binomial(C_i, alpha) and the tuple total for length w.
  [[nodiscard]] CollisionTally tally(std::size_t w, unsigned alpha, TupleMode mode) const;

 private:
  template <typename Visit>
  void for_each_class(std::size_t w, TupleMode mode, Visit&& visit) const;

  SymbolSequence seq_;
  std::vector<std::uint32_t> sa_;
  std::vector<std::uint32_t> lcp_;
};

TupleCountTable count_tuples(const SymbolSequence& s, std::size_t w, TupleMode mode);
std::size_t find_u(const SymbolSequence& s, std::uint64_t cutoff = 35);
std::size_t find_v(const SymbolSequence& s, unsigned alpha);

/// Exact binomial(n, r); zero when n < r.
BigCount binomial(std::uint64_t n, unsigned r);

/// D_{alpha,w} = sum_i binomial(C_i, alpha).
BigCount collision_count(const TupleCountTable& t, unsigned alpha);

/// Unbiased estimate sum_i binomial(C_i, alpha) / binomial(l, alpha) of the
/// w-tuple power sum. Throws EstimationError when l < alpha.
double estimate_power_sum(const CollisionTally& tally, unsigned alpha);
double estimate_power_sum_w(const SymbolSequence& s, std::size_t w, unsigned alpha, TupleMode mode);

/// m_hat^(1/w): the per-symbol value of a w-tuple statistic.
double normalize_per_sample(double m_hat, std::size_t w);

}  // namespace minent
