#include "minent/tuple_stats.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>

namespace minent {

const char* to_string(EstimationErrc code) {
  switch (code) {
    case EstimationErrc::sequence_too_short:
      return "sequence_too_short";
    case EstimationErrc::range_empty:
      return "range_empty";
  }
  return "unknown";
}

const char* to_string(TupleMode mode) {
  return mode == TupleMode::overlapping ? "overlapping" : "non_overlapping";
}

SymbolSequence::SymbolSequence(std::vector<Symbol> symbols, std::size_t k)
    : symbols_(std::move(symbols)), k_(k) {
  if (k_ < 1 || k_ > kMaxAlphabet) {
    throw std::invalid_argument("symbol sequence: alphabet size must lie in [1, 65536]");
  }
  if (symbols_.empty()) {
    throw std::invalid_argument("symbol sequence: empty");
  }
  if (symbols_.size() >= std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("symbol sequence: longer than 2^32 - 2 symbols");
  }
  for (Symbol x : symbols_) {
    if (x >= k_) {
      throw std::invalid_argument("symbol sequence: symbol " + std::to_string(x) +
                                  " outside alphabet of size " + std::to_string(k_));
    }
  }
}

namespace {

// Prefix doubling with two stable counting-sort passes per round. Ranks are
// shifted by one so that 0 stands for "past the end".
std::vector<std::uint32_t> build_suffix_array(std::span<const Symbol> s, std::size_t k) {
  const std::size_t n = s.size();
  std::vector<std::uint32_t> sa(n), rank(n), next_rank(n), by_second(n);
  std::vector<std::uint32_t> bucket(std::max(n, k) + 2);

  for (std::size_t i = 0; i < n; ++i) ++bucket[s[i]];
  for (std::size_t c = 0, sum = 0; c < k; ++c) {
    const std::size_t cnt = bucket[c];
    bucket[c] = static_cast<std::uint32_t>(sum);
    sum += cnt;
  }
  for (std::size_t i = 0; i < n; ++i) sa[bucket[s[i]]++] = static_cast<std::uint32_t>(i);

  std::uint32_t classes = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == 0 || s[sa[j]] != s[sa[j - 1]]) ++classes;
    rank[sa[j]] = classes;
  }

  for (std::size_t h = 1; classes < n; h <<= 1) {
    // Order by second key: suffixes with nothing at +h come first.
    std::size_t pos = 0;
    for (std::size_t i = n - std::min(h, n); i < n; ++i) by_second[pos++] = static_cast<std::uint32_t>(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (sa[j] >= h) by_second[pos++] = static_cast<std::uint32_t>(sa[j] - h);
    }
    // Stable counting sort by first key.
    std::fill(bucket.begin(), bucket.begin() + classes + 2, 0);
    for (std::size_t i = 0; i < n; ++i) ++bucket[rank[i]];
    for (std::size_t c = 0, sum = 0; c <= classes; ++c) {
      const std::size_t cnt = bucket[c];
      bucket[c] = static_cast<std::uint32_t>(sum);
      sum += cnt;
    }
    for (std::size_t j = 0; j < n; ++j) {
      const std::uint32_t i = by_second[j];
      sa[bucket[rank[i]]++] = i;
    }
    auto second = [&](std::uint32_t i) -> std::uint32_t { return i + h < n ? rank[i + h] : 0; };
    std::uint32_t fresh = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == 0 || rank[sa[j]] != rank[sa[j - 1]] || second(sa[j]) != second(sa[j - 1])) ++fresh;
      next_rank[sa[j]] = fresh;
    }
    rank.swap(next_rank);
    classes = fresh;
  }
  return sa;
}

std::vector<std::uint32_t> build_lcp(std::span<const Symbol> s, std::span<const std::uint32_t> sa) {
  const std::size_t n = s.size();
  std::vector<std::uint32_t> inverse(n), lcp(n, 0);
  for (std::size_t j = 0; j < n; ++j) inverse[sa[j]] = static_cast<std::uint32_t>(j);
  std::size_t h = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (inverse[i] == 0) {
      h = 0;
      continue;
    }
    const std::size_t j = sa[inverse[i] - 1];
    while (i + h < n && j + h < n && s[i + h] == s[j + h]) ++h;
    lcp[inverse[i]] = static_cast<std::uint32_t>(h);
    if (h > 0) --h;
  }
  return lcp;
}

}  // namespace

TupleIndex::TupleIndex(SymbolSequence sequence)
    : seq_(std::move(sequence)),
      sa_(build_suffix_array(seq_.symbols(), seq_.k())),
      lcp_(build_lcp(seq_.symbols(), sa_)) {}

// Visits each distinct w-tuple once as (first_position, count). Two kept
// suffixes share a w-tuple iff the minimum LCP between them in suffix order
// is at least w.
template <typename Visit>
void TupleIndex::for_each_class(std::size_t w, TupleMode mode, Visit&& visit) const {
  const std::size_t n = seq_.size();
  if (w == 0 || w > n) return;
  const bool overlapping = mode == TupleMode::overlapping;

  std::uint32_t run_min = 0;
  std::uint64_t count = 0;
  std::size_t first = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j > 0) run_min = std::min(run_min, lcp_[j]);
    const std::size_t pos = sa_[j];
    if (pos + w > n || (!overlapping && pos % w != 0)) continue;
    if (count == 0 || run_min < w) {
      if (count > 0) visit(first, count);
      count = 0;
      first = pos;
    }
    ++count;
    first = std::min(first, pos);
    run_min = std::numeric_limits<std::uint32_t>::max();
  }
  if (count > 0) visit(first, count);
}

std::uint64_t TupleIndex::max_count(std::size_t w) const {
  const std::size_t n = seq_.size();
  if (w == 0) throw std::invalid_argument("max_count: tuple length must be positive");
  if (w > n) return 0;
  // Suffixes shorter than w never sit inside a run of LCP >= w.
  std::uint64_t best = 1;
  std::uint64_t run = 1;
  for (std::size_t j = 1; j < n; ++j) {
    run = lcp_[j] >= w ? run + 1 : 1;
    best = std::max(best, run);
  }
  return best;
}

std::size_t TupleIndex::find_u(std::uint64_t cutoff) const {
  if (cutoff < 2) throw std::invalid_argument("find_u: cutoff must be at least 2");
  // max_count is non-increasing in w and max_count(L) == 1 < cutoff.
  std::size_t lo = 1;
  std::size_t hi = seq_.size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (max_count(mid) < cutoff) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

std::size_t TupleIndex::find_v(unsigned alpha) const {
  if (alpha < 2) throw std::invalid_argument("find_v: order must be at least 2");
  const std::size_t n = seq_.size();
  const std::size_t window = alpha - 1;
  std::size_t best = 0;
  if (n >= alpha) {
    // Max over windows of alpha consecutive suffixes of the window's min LCP.
    std::deque<std::size_t> mins;
    for (std::size_t j = 1; j < n; ++j) {
      while (!mins.empty() && lcp_[mins.back()] >= lcp_[j]) mins.pop_back();
      mins.push_back(j);
      if (mins.front() + window <= j) mins.pop_front();
      if (j >= window) best = std::max<std::size_t>(best, lcp_[mins.front()]);
    }
  }
  if (best == 0) {
    throw EstimationError(EstimationErrc::sequence_too_short,
                          "sequence too short for order " + std::to_string(alpha) +
                              ": no symbol occurs " + std::to_string(alpha) + " times");
  }
  return best;
}

TupleCountTable TupleIndex::count(std::size_t w, TupleMode mode) const {
  if (w == 0 || w > seq_.size()) {
    throw std::invalid_argument("count_tuples: tuple length must lie in [1, L]");
  }
  TupleCountTable table;
  table.w = w;
  table.mode = mode;
  for_each_class(w, mode, [&](std::size_t first, std::uint64_t c) {
    table.classes.push_back({first, c});
    table.total += c;
  });
  std::sort(table.classes.begin(), table.classes.end(),
            [](const TupleClass& a, const TupleClass& b) { return a.first_position < b.first_position; });
  return table;
}

CollisionTally TupleIndex::tally(std::size_t w, unsigned alpha, TupleMode mode) const {
  if (w == 0 || w > seq_.size()) {
    throw std::invalid_argument("tally: tuple length must lie in [1, L]");
  }
  CollisionTally out;
  for_each_class(w, mode, [&](std::size_t, std::uint64_t c) {
    out.total += c;
    if (c >= alpha) out.collisions += binomial(c, alpha);
  });
  return out;
}

TupleCountTable count_tuples(const SymbolSequence& s, std::size_t w, TupleMode mode) {
  return TupleIndex(s).count(w, mode);
}

std::size_t find_u(const SymbolSequence& s, std::uint64_t cutoff) {
  return TupleIndex(s).find_u(cutoff);
}

std::size_t find_v(const SymbolSequence& s, unsigned alpha) { return TupleIndex(s).find_v(alpha); }

BigCount binomial(std::uint64_t n, unsigned r) {
  if (n < r) return 0;
  BigCount result = 1;
  for (unsigned j = 0; j < r; ++j) {
    result *= n - j;
    result /= j + 1;
  }
  return result;
}

BigCount collision_count(const TupleCountTable& t, unsigned alpha) {
  BigCount sum = 0;
  for (const auto& c : t.classes) {
    if (c.count >= alpha) sum += binomial(c.count, alpha);
  }
  return sum;
}

double estimate_power_sum(const CollisionTally& tally, unsigned alpha) {
  if (alpha < 1) throw std::invalid_argument("estimate_power_sum: order must be positive");
  if (tally.total < alpha) {
    throw EstimationError(EstimationErrc::sequence_too_short,
                          "only " + std::to_string(tally.total) + " tuples for order " +
                              std::to_string(alpha));
  }
  return tally.collisions.convert_to<double>() / binomial(tally.total, alpha).convert_to<double>();
}

double estimate_power_sum_w(const SymbolSequence& s, std::size_t w, unsigned alpha, TupleMode mode) {
  const auto table = count_tuples(s, w, mode);
  return estimate_power_sum(CollisionTally{collision_count(table, alpha), table.total}, alpha);
}

double normalize_per_sample(double m_hat, std::size_t w) {
  if (w == 0) throw std::invalid_argument("normalize_per_sample: tuple length must be positive");
  if (!(m_hat >= 0.0) || m_hat > 1.0) {
    throw std::domain_error("normalize_per_sample: statistic must lie in [0, 1]");
  }
  if (w == 1) return m_hat;
  return std::pow(m_hat, 1.0 / static_cast<double>(w));
}

}  // namespace minent
