#include "minent/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>

#include <openssl/evp.h>

namespace minent {

const char* to_string(InputFormat format) {
  switch (format) {
    case InputFormat::raw_bitpacked:
      return "raw_bitpacked";
    case InputFormat::bytes_one_symbol:
      return "bytes_one_symbol";
    case InputFormat::text_symbols:
      return "text_symbols";
  }
  return "unknown";
}

InputFormat input_format_from_string(const std::string& name) {
  if (name == "raw_bitpacked" || name == "bits") return InputFormat::raw_bitpacked;
  if (name == "bytes_one_symbol" || name == "bytes") return InputFormat::bytes_one_symbol;
  if (name == "text_symbols" || name == "text") return InputFormat::text_symbols;
  throw std::invalid_argument("unknown input format '" + name + "'");
}

const char* InputError::code() const noexcept { return kind_ == Kind::io ? "io_error" : "parse_error"; }

void InputDescriptor::validate() const {
  if (bits_per_symbol < 1 || bits_per_symbol > 16) {
    throw std::invalid_argument("bits per symbol must lie in [1, 16]");
  }
  if (format == InputFormat::bytes_one_symbol && bits_per_symbol > 8) {
    throw std::invalid_argument("bytes_one_symbol holds at most 8 bits per symbol");
  }
  if (max_symbols && *max_symbols == 0) throw std::invalid_argument("max symbols must be positive");
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(InputError::Kind::io, "cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw InputError(InputError::Kind::io, "read failed for '" + path + "'");
  return bytes;
}

void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(InputError::Kind::io, "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError(InputError::Kind::io, "write failed for '" + path + "'");
}

namespace {

void check_width(unsigned bps) {
  if (bps < 1 || bps > 16) throw std::invalid_argument("bits per symbol must lie in [1, 16]");
}

std::vector<Symbol> decode_bitpacked(std::span<const std::uint8_t> bytes, unsigned bps, std::size_t cap) {
  const std::size_t n = std::min(bytes.size() * 8 / bps, cap);
  std::vector<Symbol> out(n);
  std::size_t bit = 0;
  for (auto& x : out) {
    unsigned value = 0;
    for (unsigned b = 0; b < bps; ++b, ++bit) {
      value = (value << 1) | ((bytes[bit / 8] >> (7 - bit % 8)) & 1U);
    }
    x = static_cast<Symbol>(value);
  }
  return out;
}

std::vector<Symbol> decode_text(std::span<const std::uint8_t> bytes, unsigned bps, std::size_t cap) {
  const unsigned long limit = 1UL << bps;
  std::vector<Symbol> out;
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < bytes.size() && out.size() < cap) {
    const char c = static_cast<char>(bytes[i]);
    if (c == '\n') ++line;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < bytes.size() && !std::isspace(bytes[j])) ++j;
    const char* first = reinterpret_cast<const char*>(bytes.data() + i);
    const char* last = reinterpret_cast<const char*>(bytes.data() + j);
    unsigned long value = 0;
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last) {
      throw InputError(InputError::Kind::parse, "line " + std::to_string(line) + ": '" +
                                                    std::string(first, last) + "' is not a decimal symbol");
    }
    if (value >= limit) {
      throw InputError(InputError::Kind::parse, "line " + std::to_string(line) + ": symbol " +
                                                    std::to_string(value) + " does not fit in " +
                                                    std::to_string(bps) + " bits");
    }
    out.push_back(static_cast<Symbol>(value));
    i = j;
  }
  return out;
}

}  // namespace

SymbolSequence decode_symbols(std::span<const std::uint8_t> bytes, InputFormat format, unsigned bps,
                              std::optional<std::size_t> max_symbols) {
  check_width(bps);
  const std::size_t cap = max_symbols.value_or(static_cast<std::size_t>(-1));
  std::vector<Symbol> symbols;
  switch (format) {
    case InputFormat::raw_bitpacked:
      symbols = decode_bitpacked(bytes, bps, cap);
      break;
    case InputFormat::bytes_one_symbol: {
      if (bps > 8) throw std::invalid_argument("bytes_one_symbol holds at most 8 bits per symbol");
      const std::size_t n = std::min(bytes.size(), cap);
      symbols.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (bytes[i] >> bps) {
          throw InputError(InputError::Kind::parse, "byte " + std::to_string(i) + " holds " +
                                                        std::to_string(bytes[i]) + ", wider than " +
                                                        std::to_string(bps) + " bits");
        }
        symbols[i] = bytes[i];
      }
      break;
    }
    case InputFormat::text_symbols:
      symbols = decode_text(bytes, bps, cap);
      break;
  }
  if (symbols.empty()) throw InputError(InputError::Kind::parse, "input holds no symbols");
  try {
    return SymbolSequence(std::move(symbols), std::size_t{1} << bps);
  } catch (const std::invalid_argument& e) {
    throw InputError(InputError::Kind::parse, e.what());
  }
}

std::vector<std::uint8_t> encode_symbols(const SymbolSequence& s, InputFormat format, unsigned bps) {
  check_width(bps);
  if (s.k() > (std::size_t{1} << bps)) {
    throw std::invalid_argument("alphabet of size " + std::to_string(s.k()) + " does not fit in " +
                                std::to_string(bps) + " bits");
  }
  std::vector<std::uint8_t> out;
  switch (format) {
    case InputFormat::raw_bitpacked: {
      out.assign((s.size() * bps + 7) / 8, 0);
      std::size_t bit = 0;
      for (Symbol x : s.symbols()) {
        for (unsigned b = bps; b-- > 0; ++bit) {
          if ((x >> b) & 1U) out[bit / 8] |= static_cast<std::uint8_t>(0x80U >> (bit % 8));
        }
      }
      break;
    }
    case InputFormat::bytes_one_symbol:
      if (bps > 8) throw std::invalid_argument("bytes_one_symbol holds at most 8 bits per symbol");
      out.assign(s.symbols().begin(), s.symbols().end());
      break;
    case InputFormat::text_symbols:
      for (Symbol x : s.symbols()) {
        const std::string line = std::to_string(x) + "\n";
        out.insert(out.end(), line.begin(), line.end());
      }
      break;
  }
  return out;
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

LoadedInput load_input(const InputDescriptor& input) {
  input.validate();
  const auto bytes = read_file_bytes(input.path);
  return {decode_symbols(bytes, input.format, input.bits_per_symbol, input.max_symbols), sha256_hex(bytes),
          bytes.size()};
}

nlohmann::ordered_json config_to_json(const EstimatorConfig& cfg) {
  nlohmann::ordered_json j;
  j["alpha"] = cfg.alpha;
  j["cutoff"] = cfg.cutoff;
  j["confidence_z"] = cfg.confidence_z;
  j["mode"] = to_string(cfg.mode);
  j["bisect_tol"] = cfg.bisect_tol;
  j["apply_confidence"] = cfg.apply_confidence;
  j["allow_high_alpha"] = cfg.allow_high_alpha;
  return j;
}

EstimatorConfig config_from_json(const nlohmann::json& j) {
  EstimatorConfig cfg;
  cfg.alpha = j.value("alpha", cfg.alpha);
  cfg.cutoff = j.value("cutoff", cfg.cutoff);
  cfg.confidence_z = j.value("confidence_z", cfg.confidence_z);
  const std::string mode = j.value("mode", std::string(to_string(cfg.mode)));
  if (mode == "overlapping") {
    cfg.mode = TupleMode::overlapping;
  } else if (mode == "non_overlapping") {
    cfg.mode = TupleMode::non_overlapping;
  } else {
    throw std::invalid_argument("unknown tuple mode '" + mode + "'");
  }
  cfg.bisect_tol = j.value("bisect_tol", cfg.bisect_tol);
  cfg.apply_confidence = j.value("apply_confidence", cfg.apply_confidence);
  cfg.allow_high_alpha = j.value("allow_high_alpha", cfg.allow_high_alpha);
  return cfg;
}

nlohmann::ordered_json estimate_to_json(const MinEntropyEstimate& est) {
  nlohmann::ordered_json j;
  j["estimator"] = to_string(est.kind);
  j["alpha"] = est.alpha;
  j["h_estimate"] = est.h_estimate;
  j["theta_hat"] = est.theta_hat;
  j["theta_tilde"] = est.theta_tilde;
  j["m_tilde"] = est.m_tilde;
  j["u"] = est.u;
  j["v"] = est.v;
  j["winning_w"] = est.winning_w;
  j["clamped_uniform"] = est.clamped_uniform;
  j["length"] = est.length;
  j["k"] = est.k;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& pw : est.per_w) rows.push_back({{"w", pw.w}, {"value", pw.value}});
  j["per_w"] = std::move(rows);
  return j;
}

nlohmann::ordered_json result_to_json(const ResultDocument& doc) {
  nlohmann::ordered_json j;
  j["tool"] = "minent";
  j["version"] = doc.tool_version;
  j["input"] = {{"path", doc.input.path},
                {"format", to_string(doc.input.format)},
                {"bits_per_symbol", doc.input.bits_per_symbol},
                {"symbols", doc.input_symbols},
                {"sha256", doc.input_sha256}};
  j["estimator"] = to_string(doc.kind);
  j["config"] = config_to_json(doc.cfg);
  j["binarized"] = doc.binarized;
  const double scale = doc.binarized ? static_cast<double>(doc.input.bits_per_symbol) : 1.0;
  j["h_per_symbol"] = doc.estimate.h_estimate * scale;
  j["result"] = estimate_to_json(doc.estimate);
  j["duration_seconds"] = doc.duration_seconds;
  return j;
}

}  // namespace minent
