#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "minent/io.hpp"
#include "minent/sources.hpp"
#include "schema_check.hpp"

using namespace minent;

namespace {

std::string data_file(const std::string& name) { return std::string(MINENT_TEST_DATA_DIR) + "/" + name; }

std::vector<std::uint8_t> as_bytes(const std::string& s) { return {s.begin(), s.end()}; }

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("minent_test_io_" + name)).string();
}

}  // namespace

TEST_CASE("bit-packed golden files") {
  const auto bits = read_file_bytes(data_file("bits_1_0_1_1_0_0_1_0_1.bin"));
  CHECK(bits == std::vector<std::uint8_t>{0xB2, 0x80});
  const SymbolSequence nine({1, 0, 1, 1, 0, 0, 1, 0, 1}, 2);
  CHECK(encode_symbols(nine, InputFormat::raw_bitpacked, 1) == bits);
  CHECK(decode_symbols(bits, InputFormat::raw_bitpacked, 1, 9) == nine);
  // Without a cap the seven padding bits decode as zeros.
  CHECK(decode_symbols(bits, InputFormat::raw_bitpacked, 1).size() == 16);

  const auto packed3 = read_file_bytes(data_file("bps3_5_3_7.bin"));
  CHECK(packed3 == std::vector<std::uint8_t>{0xAF, 0x80});
  const SymbolSequence three({5, 3, 7}, 8);
  CHECK(encode_symbols(three, InputFormat::raw_bitpacked, 3) == packed3);
  CHECK(decode_symbols(packed3, InputFormat::raw_bitpacked, 3, 3) == three);
  CHECK(decode_symbols(packed3, InputFormat::raw_bitpacked, 3) == SymbolSequence({5, 3, 7, 0, 0}, 8));
}

TEST_CASE("byte and text golden files") {
  CHECK(decode_symbols(read_file_bytes(data_file("bytes_bps2.bin")), InputFormat::bytes_one_symbol, 2) ==
        SymbolSequence({3, 0, 2, 1, 1}, 4));
  CHECK(decode_symbols(read_file_bytes(data_file("symbols.txt")), InputFormat::text_symbols, 2) ==
        SymbolSequence({3, 0, 2, 1, 1}, 4));
  CHECK(encode_symbols(SymbolSequence({3, 0, 2}, 4), InputFormat::text_symbols, 2) == as_bytes("3\n0\n2\n"));
  CHECK(decode_symbols(as_bytes("1\n0\n1\n1\n"), InputFormat::text_symbols, 1, 2) == SymbolSequence({1, 0}, 2));
}

TEST_CASE("malformed input") {
  try {
    (void)decode_symbols(read_file_bytes(data_file("bad_token.txt")), InputFormat::text_symbols, 1);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(e.kind() == InputError::Kind::parse);
    CHECK(std::string(e.code()) == "parse_error");
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(decode_symbols(as_bytes("2\n"), InputFormat::text_symbols, 1), InputError);
  CHECK_THROWS_AS(decode_symbols(as_bytes("-1\n"), InputFormat::text_symbols, 1), InputError);
  CHECK_THROWS_AS(decode_symbols(std::vector<std::uint8_t>{4}, InputFormat::bytes_one_symbol, 2), InputError);
  CHECK_THROWS_AS(decode_symbols({}, InputFormat::raw_bitpacked, 1), InputError);
  CHECK_THROWS_AS(decode_symbols(as_bytes(" \n"), InputFormat::text_symbols, 1), InputError);
  CHECK_THROWS_AS(decode_symbols(std::vector<std::uint8_t>{0xFF}, InputFormat::raw_bitpacked, 9), InputError);
  CHECK_THROWS_AS(decode_symbols(std::vector<std::uint8_t>{1}, InputFormat::bytes_one_symbol, 9),
                  std::invalid_argument);
  CHECK_THROWS_AS(encode_symbols(SymbolSequence({5}, 8), InputFormat::raw_bitpacked, 2), std::invalid_argument);
  try {
    (void)read_file_bytes(data_file("does_not_exist.bin"));
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(e.kind() == InputError::Kind::io);
  }
  InputDescriptor d;
  d.bits_per_symbol = 17;
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  d.bits_per_symbol = 9;
  d.format = InputFormat::bytes_one_symbol;
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  CHECK(input_format_from_string("text") == InputFormat::text_symbols);
  CHECK_THROWS_AS(input_format_from_string("hex"), std::invalid_argument);
}

TEST_CASE("format round trips") {
  std::mt19937_64 rng(6);
  for (unsigned bps = 1; bps <= 16; ++bps) {
    const std::size_t k = std::size_t{1} << bps;
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    for (std::size_t len : {1u, 7u, 8u, 9u, 1000u}) {
      std::vector<Symbol> v(len);
      for (auto& x : v) x = static_cast<Symbol>(pick(rng));
      const SymbolSequence s(v, k);
      for (auto format : {InputFormat::raw_bitpacked, InputFormat::bytes_one_symbol, InputFormat::text_symbols}) {
        if (format == InputFormat::bytes_one_symbol && bps > 8) continue;
        const auto bytes = encode_symbols(s, format, bps);
        CHECK(decode_symbols(bytes, format, bps, len) == s);
      }
    }
  }
  // Through the file system as well.
  SourceSpec spec;
  spec.param = 0.3;
  spec.length = 12345;
  const auto s = generate(spec);
  const std::string path = temp_path("roundtrip.bin");
  write_file_bytes(path, encode_symbols(s, InputFormat::raw_bitpacked, 1));
  InputDescriptor d;
  d.path = path;
  d.max_symbols = s.size();
  const auto loaded = load_input(d);
  CHECK(loaded.sequence == s);
  CHECK(loaded.bytes == (s.size() + 7) / 8);
  std::remove(path.c_str());
}

TEST_CASE("sha256") {
  CHECK(sha256_hex(as_bytes("abc")) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex({}) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("config echo round trips") {
  EstimatorConfig cfg;
  CHECK(config_from_json(config_to_json(cfg)) == cfg);
  cfg.alpha = 11;
  cfg.allow_high_alpha = true;
  cfg.cutoff = 20;
  cfg.confidence_z = 1.96;
  cfg.mode = TupleMode::non_overlapping;
  cfg.bisect_tol = 1e-9;
  cfg.apply_confidence = false;
  CHECK(config_from_json(nlohmann::json::parse(config_to_json(cfg).dump())) == cfg);
  CHECK(config_from_json(nlohmann::json::object()) == EstimatorConfig{});
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"mode", "sliding"}}), std::invalid_argument);
}

TEST_CASE("result documents match the schema") {
  SourceSpec spec;
  spec.param = 0.3;
  spec.length = 20000;
  const auto s = generate(spec);
  for (auto kind : {EstimatorKind::lrs_nist, EstimatorKind::improved, EstimatorKind::generalized}) {
    ResultDocument doc;
    doc.kind = kind;
    doc.cfg.alpha = kind == EstimatorKind::generalized ? 4 : 2;
    doc.input.path = "in.bin";
    doc.input_sha256 = sha256_hex(encode_symbols(s, InputFormat::raw_bitpacked, 1));
    doc.input_symbols = s.size();
    doc.estimate = run_estimator(kind, TupleIndex(s), doc.cfg);
    doc.duration_seconds = 0.25;
    const auto j = nlohmann::json::parse(result_to_json(doc).dump());
    const auto errors = schema_check::errors_for(j, "result.schema.json");
    CHECK_MESSAGE(errors.empty(), (errors.empty() ? "" : errors.front()));
    CHECK(config_from_json(j["config"]) == doc.cfg);
    CHECK(j["result"]["h_estimate"] == doc.estimate.h_estimate);
    CHECK(j["h_per_symbol"] == doc.estimate.h_estimate);

    auto broken = j;
    broken["result"].erase("theta_tilde");
    broken["extra"] = 1;
    CHECK(schema_check::errors_for(broken, "result.schema.json").size() == 2);
  }
}
