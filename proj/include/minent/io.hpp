#pragma once

// Sequence files and result documents.
//
// Formats:
//   raw_bitpacked     symbols of bits_per_symbol bits each, concatenated
//                     MSB-first within every byte; the last byte is padded
//                     with zero bits. Decoding yields floor(8 * bytes / bps)
//                     symbols, so padding can show up as trailing zero
//                     symbols; pass max_symbols to drop them.
//   bytes_one_symbol  one byte per symbol, bits_per_symbol <= 8.
//   text_symbols      ASCII decimal symbols separated by whitespace (written
//                     one per line).
// The decoded alphabet size is always 2^bits_per_symbol.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "minent/estimators.hpp"
#include "minent/tuple_stats.hpp"

namespace minent {

inline constexpr const char* kToolVersion = "0.1.0";

enum class InputFormat { raw_bitpacked, bytes_one_symbol, text_symbols };

const char* to_string(InputFormat format);
InputFormat input_format_from_string(const std::string& name);

/// Unreadable file or malformed content.
class InputError : public std::runtime_error {
 public:
  enum class Kind { io, parse };
  InputError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  /// "io_error" or "parse_error".
  [[nodiscard]] const char* code() const noexcept;

 private:
  Kind kind_;
};

struct InputDescriptor {
  std::string path;
  InputFormat format = InputFormat::raw_bitpacked;
  unsigned bits_per_symbol = 1;
  std::optional<std::size_t> max_symbols;

  /// bits_per_symbol in [1, 16], at most 8 for bytes_one_symbol.
  void validate() const;
};

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes);

SymbolSequence decode_symbols(std::span<const std::uint8_t> bytes, InputFormat format,
                              unsigned bits_per_symbol,
                              std::optional<std::size_t> max_symbols = std::nullopt);
/// The sequence's alphabet must fit in bits_per_symbol bits.
std::vector<std::uint8_t> encode_symbols(const SymbolSequence& s, InputFormat format,
                                         unsigned bits_per_symbol);

/// Lower-case hex SHA-256.
std::string sha256_hex(std::span<const std::uint8_t> bytes);

struct LoadedInput {
  SymbolSequence sequence;
  std::string sha256;
  std::size_t bytes = 0;
};

LoadedInput load_input(const InputDescriptor& input);

nlohmann::ordered_json config_to_json(const EstimatorConfig& cfg);
/// Inverse of config_to_json; missing keys keep their defaults.
EstimatorConfig config_from_json(const nlohmann::json& j);

nlohmann::ordered_json estimate_to_json(const MinEntropyEstimate& est);

/// Everything needed to audit one estimate.
struct ResultDocument {
  std::string tool_version = kToolVersion;
  InputDescriptor input;
  std::string input_sha256;
  std::size_t input_symbols = 0;
  EstimatorKind kind = EstimatorKind::improved;
  EstimatorConfig cfg;
  /// Estimated on the binary expansion, h scaled by bits_per_symbol.
  bool binarized = false;
  MinEntropyEstimate estimate;
  double duration_seconds = 0.0;
};

nlohmann::ordered_json result_to_json(const ResultDocument& doc);

}  // namespace minent
