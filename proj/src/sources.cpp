#include "minent/sources.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace minent {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return CounterRng::mix(CounterRng::mix(base) + (index + 1) * 0xD1B54A32D192ED03ULL);
}

const char* to_string(SourceFamily family) {
  switch (family) {
    case SourceFamily::bms:
      return "bms";
    case SourceFamily::markov:
      return "markov";
    case SourceFamily::near_uniform:
      return "near-uniform";
    case SourceFamily::inverted_near_uniform:
      return "inverted-near-uniform";
  }
  return "unknown";
}

SourceFamily source_family_from_string(const std::string& name) {
  if (name == "bms") return SourceFamily::bms;
  if (name == "markov") return SourceFamily::markov;
  if (name == "near-uniform" || name == "near_uniform") return SourceFamily::near_uniform;
  if (name == "inverted-near-uniform" || name == "inverted_near_uniform") {
    return SourceFamily::inverted_near_uniform;
  }
  throw std::invalid_argument("unknown source family '" + name + "'");
}

void SourceSpec::validate() const {
  if (length < 1) throw std::invalid_argument("source: length must be at least 1");
  switch (family) {
    case SourceFamily::bms:
    case SourceFamily::markov:
      if (k != 2) throw std::invalid_argument("source: binary families need k = 2");
      if (!(param >= 0.0 && param <= 1.0)) {
        throw std::invalid_argument("source: p must lie in [0, 1]");
      }
      if (initial_state && (*initial_state < 0 || *initial_state > 1)) {
        throw std::invalid_argument("source: initial state must be 0 or 1");
      }
      break;
    case SourceFamily::near_uniform:
    case SourceFamily::inverted_near_uniform:
      if (k < 2 || k > SymbolSequence::kMaxAlphabet) {
        throw std::invalid_argument("source: k must lie in [2, 65536]");
      }
      try {
        (void)distribution();
      } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("source: ") + e.what());
      }
      break;
  }
}

Distribution SourceSpec::distribution() const {
  switch (family) {
    case SourceFamily::bms:
    case SourceFamily::markov:
      return Distribution({1.0 - param, param});
    case SourceFamily::near_uniform:
      return near_uniform(param, k);
    case SourceFamily::inverted_near_uniform:
      return inverted_near_uniform(param, k);
  }
  throw std::invalid_argument("source: unknown family");
}

namespace {

std::vector<Symbol> draw_categorical(const Distribution& d, std::size_t length, CounterRng& rng) {
  const auto probs = d.probs();
  std::vector<double> cdf(probs.size());
  double running = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    running += probs[i];
    cdf[i] = running;
    if (probs[i] > 0.0) last_positive = i;
  }
  std::fill(cdf.begin() + static_cast<std::ptrdiff_t>(last_positive), cdf.end(), 1.0);

  std::vector<Symbol> out(length);
  for (auto& x : out) {
    const double u = rng.uniform();
    x = static_cast<Symbol>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  }
  return out;
}

}  // namespace

SymbolSequence generate(const SourceSpec& spec) {
  spec.validate();
  CounterRng rng(spec.seed);
  std::vector<Symbol> out(spec.length);
  switch (spec.family) {
    case SourceFamily::bms:
      for (auto& x : out) x = rng.uniform() < spec.param ? 1 : 0;
      break;
    case SourceFamily::markov: {
      Symbol state = spec.initial_state ? static_cast<Symbol>(*spec.initial_state)
                                        : static_cast<Symbol>(rng.uniform() < 0.5 ? 0 : 1);
      out[0] = state;
      for (std::size_t i = 1; i < out.size(); ++i) {
        if (rng.uniform() < spec.param) state ^= 1;
        out[i] = state;
      }
      break;
    }
    case SourceFamily::near_uniform:
    case SourceFamily::inverted_near_uniform:
      out = draw_categorical(spec.distribution(), spec.length, rng);
      break;
  }
  return SymbolSequence(std::move(out), spec.k);
}

double theoretical_entropy(const SourceSpec& spec, EntropyKind kind) {
  spec.validate();
  // The symmetric Markov chain has the same min- and collision-entropy rates
  // as a BMS with the same p.
  const Distribution d = spec.distribution();
  return kind == EntropyKind::min ? min_entropy(d) : renyi_entropy(d, 2.0);
}

unsigned bits_per_symbol(std::size_t k) {
  if (k < 2 || !std::has_single_bit(k)) {
    throw std::invalid_argument("alphabet size " + std::to_string(k) + " is not a power of two");
  }
  return static_cast<unsigned>(std::countr_zero(k));
}

SymbolSequence binarize(const SymbolSequence& s) {
  const unsigned bits = bits_per_symbol(s.k());
  std::vector<Symbol> out;
  out.reserve(s.size() * bits);
  for (Symbol x : s.symbols()) {
    for (unsigned b = bits; b-- > 0;) out.push_back(static_cast<Symbol>((x >> b) & 1U));
  }
  return SymbolSequence(std::move(out), 2);
}

SymbolSequence debinarize(const SymbolSequence& bits, std::size_t k) {
  const unsigned width = bits_per_symbol(k);
  if (bits.k() != 2) throw std::invalid_argument("debinarize: input is not binary");
  if (bits.size() % width != 0) {
    throw std::invalid_argument("debinarize: length is not a multiple of log2(k)");
  }
  std::vector<Symbol> out(bits.size() / width);
  for (std::size_t i = 0; i < out.size(); ++i) {
    unsigned value = 0;
    for (unsigned b = 0; b < width; ++b) value = (value << 1) | bits[i * width + b];
    out[i] = static_cast<Symbol>(value);
  }
  return SymbolSequence(std::move(out), k);
}

}  // namespace minent
