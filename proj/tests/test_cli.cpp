#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "minent/cli.hpp"
#include "minent/io.hpp"
#include "schema_check.hpp"

using namespace minent;
using nlohmann::json;

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "minent");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("minent_test_cli_" + name)).string();
}

std::string data_file(const std::string& name) { return std::string(MINENT_TEST_DATA_DIR) + "/" + name; }

void check_schema(const json& doc, const std::string& schema) {
  const auto errors = schema_check::errors_for(doc, schema);
  CHECK_MESSAGE(errors.empty(), (errors.empty() ? "" : errors.front()));
}

json estimate_json(const std::vector<std::string>& args) {
  const Run r = run(args);
  REQUIRE_MESSAGE(r.status == 0, r.err);
  const json doc = json::parse(r.out);
  check_schema(doc, "result.schema.json");
  return doc;
}

}  // namespace

TEST_CASE("parse lists") {
  CHECK(parse_int_list("2..6") == std::vector<int>{2, 3, 4, 5, 6});
  CHECK(parse_int_list("2,4") == std::vector<int>{2, 4});
  CHECK_THROWS_AS(parse_int_list("6..2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_int_list("2,x"), std::invalid_argument);
  CHECK(parse_double_list("0.1,0.5") == std::vector<double>{0.1, 0.5});
  CHECK_THROWS_AS(parse_double_list("0.1;0.5"), std::invalid_argument);
}

TEST_CASE("estimate an all-zero file") {
  const std::string path = temp_path("zeros.bin");
  write_file_bytes(path, std::vector<std::uint8_t>(1 << 20, 0));
  const json doc = estimate_json({"estimate", path});
  CHECK(doc["result"]["h_estimate"] == 0.0);
  CHECK(doc["input"]["symbols"] == 8 << 20);
  CHECK(doc["input"]["sha256"] == "30e14955ebf1352266dc2ff8067e68104607e750abb9d3b36582b8af909fcb58");
  std::remove(path.c_str());
}

TEST_CASE("simulate then estimate a fair coin") {
  const std::string path = temp_path("coin.bin");
  const Run sim = run({"simulate", "--family", "bms", "--p", "0.5", "-L", "100000", "--seed", "11", "--out", path});
  REQUIRE(sim.status == 0);
  check_schema(json::parse(sim.out), "simulate.schema.json");

  const json improved = estimate_json({"estimate", path, "--estimator", "improved"});
  const double h = improved["h_per_symbol"];
  CHECK(h >= 0.6);
  CHECK(h <= 1.0);
  const json generalized = estimate_json({"estimate", path, "--estimator", "generalized", "--alpha", "2"});
  CHECK(generalized["result"]["h_estimate"] == improved["result"]["h_estimate"]);
  const json lrs = estimate_json({"estimate", path, "--estimator", "lrs", "--alpha", "5"});
  CHECK(lrs["config"]["alpha"] == 2);
  CHECK(lrs["result"]["h_estimate"] >= h);
  const json raw = estimate_json({"estimate", path, "--no-confidence", "--mode", "non_overlapping"});
  CHECK(raw["config"]["apply_confidence"] == false);
  CHECK(raw["result"]["theta_tilde"] == raw["result"]["theta_hat"]);
  std::remove(path.c_str());
}

TEST_CASE("simulate is replayable") {
  const std::string a = temp_path("a.bin");
  const std::string b = temp_path("b.bin");
  const Run ra = run({"simulate", "--family", "bms", "--p", "0.3", "-L", "100000", "--seed", "7", "--out", a});
  const Run rb = run({"simulate", "--family", "bms", "--p", "0.3", "-L", "100000", "--seed", "7", "--out", b});
  REQUIRE(ra.status == 0);
  REQUIRE(rb.status == 0);
  CHECK(json::parse(ra.out)["sha256"] == json::parse(rb.out)["sha256"]);
  CHECK(read_file_bytes(a) == read_file_bytes(b));
  CHECK(read_file_bytes(a).size() == 12500);
  std::remove(a.c_str());
  std::remove(b.c_str());

  const std::string m = temp_path("markov.txt");
  const Run rm = run({"simulate", "--family", "markov", "--p", "1", "-L", "4", "--seed", "3", "--initial", "0",
                      "--format", "text_symbols", "--out", m});
  REQUIRE(rm.status == 0);
  const auto bytes = read_file_bytes(m);
  CHECK(std::string(bytes.begin(), bytes.end()) == "0\n1\n0\n1\n");
  std::remove(m.c_str());

  const std::string nu = temp_path("nu.bin");
  Run rn = run({"simulate", "--family", "near-uniform", "--theta", "0.5", "--k", "64", "-L", "10000", "--out", nu});
  REQUIRE(rn.status == 0);
  CHECK(json::parse(rn.out)["symbols"] == 10000);
  CHECK(json::parse(rn.out)["bits_per_symbol"] == 6);
  const json per_symbol = estimate_json({"estimate", nu, "--bits-per-symbol", "6", "--max-symbols", "10000"});
  CHECK(per_symbol["input"]["symbols"] == 10000);
  CHECK(per_symbol["result"]["k"] == 64);
  const json per_bit = estimate_json({"estimate", nu, "--bits-per-symbol", "6", "--binarize"});
  CHECK(per_bit["binarized"] == true);
  CHECK(per_bit["result"]["length"] == 60000);
  CHECK(per_bit["h_per_symbol"].get<double>() == doctest::Approx(6.0 * per_bit["result"]["h_estimate"].get<double>()));

  rn = run({"simulate", "--family", "near-uniform", "--theta", "0.5", "--k", "64", "-L", "10000", "--binarize",
            "--out", nu});
  REQUIRE(rn.status == 0);
  CHECK(json::parse(rn.out)["symbols"] == 60000);
  CHECK(read_file_bytes(nu).size() == 7500);
  std::remove(nu.c_str());
}

TEST_CASE("table commands") {
  Run r = run({"bounds", "--k", "2", "--steps", "11", "--format", "json"});
  REQUIRE(r.status == 0);
  json t = json::parse(r.out);
  check_schema(t, "table.schema.json");
  REQUIRE(t["rows"].size() == 11);
  for (const auto& row : t["rows"]) CHECK(row["theta_hat"] == row["psi"]);

  r = run({"bounds", "--k", "8", "--grid", "0.125,0.5,1"});
  REQUIRE(r.status == 0);
  CHECK(r.out.rfind("pc,theta_hat,psi,h_from_theta_hat,h_from_psi,h_collision\n", 0) == 0);
  CHECK(run({"bounds", "--k", "8", "--grid", "0.05"}).status == kExitUsage);

  r = run({"sweep", "--family", "bms", "--grid", "0.3", "--trials", "4", "-L", "20000", "--estimators",
           "lrs,improved,generalized:3", "--threads", "1"});
  REQUIRE_MESSAGE(r.status == 0, r.err);
  CHECK(r.out.rfind("param,h_min,h_collision,lrs_mean,lrs_std,lrs_var_theta,lrs_failed,improved_mean", 0) == 0);
  CHECK(r.out.find("generalized_a3_mean") != std::string::npos);

  // The thread knob never changes results.
#ifndef _WIN32
  setenv("MINENT_THREADS", "3", 1);
  const Run threaded = run({"sweep", "--family", "bms", "--grid", "0.3", "--trials", "4", "-L", "20000",
                            "--estimators", "lrs,improved,generalized:3"});
  unsetenv("MINENT_THREADS");
  CHECK(threaded.out == r.out);
#endif

  r = run({"variance", "--alphas", "2..4", "--trials", "6", "-L", "20000", "--format", "json"});
  REQUIRE_MESSAGE(r.status == 0, r.err);
  t = json::parse(r.out);
  check_schema(t, "table.schema.json");
  CHECK(t["columns"] == json({"alpha", "mean_h", "var_h", "var_theta", "failed", "ratio_next", "predicted_ratio"}));
  CHECK(t["rows"][0]["predicted_ratio"].get<double>() == doctest::Approx(16.0 / 81.0));
  CHECK(t["rows"][2]["ratio_next"].is_null());

  r = run({"vbar", "--alphas", "2..3", "--trials", "3", "-L", "20000"});
  REQUIRE_MESSAGE(r.status == 0, r.err);
  CHECK(r.out.rfind("alpha,v_mean,v_predicted,ratio_empirical,ratio_predicted\n", 0) == 0);

  r = run({"oracle", "--p", "0.3", "--l", "6", "--alpha", "2"});
  REQUIRE(r.status == 0);
  CHECK(std::abs(json::parse(r.out)["expectation"].get<double>() - 0.58) < 1e-12);
}

TEST_CASE("--out writes the document to a file") {
  const std::string path = temp_path("bounds.csv");
  const Run r = run({"bounds", "--k", "4", "--steps", "3", "--out", path});
  REQUIRE(r.status == 0);
  CHECK(r.out.empty());
  const auto bytes = read_file_bytes(path);
  CHECK(std::string(bytes.begin(), bytes.end()).rfind("pc,", 0) == 0);
  std::remove(path.c_str());
  CHECK(run({"bounds", "--out", "/nonexistent-dir/x.csv"}).status == kExitInput);
}

TEST_CASE("exit codes and error documents") {
  Run r = run({"estimate", data_file("does_not_exist.bin")});
  CHECK(r.status == kExitInput);
  json e = json::parse(r.err);
  check_schema(e, "error.schema.json");
  CHECK(e["error"]["code"] == "io_error");

  r = run({"estimate", data_file("bad_token.txt"), "--format", "text_symbols"});
  CHECK(r.status == kExitInput);
  CHECK(json::parse(r.err)["error"]["code"] == "parse_error");

  // Nine bits: no symbol repeats 8 times.
  r = run({"estimate", data_file("bits_1_0_1_1_0_0_1_0_1.bin"), "--max-symbols", "9", "--estimator",
           "generalized", "--alpha", "8"});
  CHECK(r.status == kExitEstimation);
  e = json::parse(r.err);
  check_schema(e, "error.schema.json");
  CHECK(e["error"]["code"] == "sequence_too_short");
  CHECK(e["error"]["message"].get<std::string>().find("order 8") != std::string::npos);

  const std::string path = temp_path("const.txt");
  write_file_bytes(path, std::vector<std::uint8_t>{'0', '\n', '0', '\n', '0', '\n', '0', '\n', '0', '\n'});
  r = run({"estimate", path, "--format", "text", "--estimator", "generalized", "--alpha", "3", "--cutoff", "3"});
  CHECK(r.status == kExitEstimation);
  e = json::parse(r.err);
  check_schema(e, "error.schema.json");
  CHECK(e["error"]["code"] == "range_empty");
  CHECK(e["error"]["u"] == 4);
  CHECK(e["error"]["v"] == 3);
  std::remove(path.c_str());

  CHECK(run({}).status == kExitUsage);
  CHECK(run({"estimate"}).status == kExitUsage);
  CHECK(run({"estimate", "x", "--estimator", "tuple"}).status == kExitUsage);
  CHECK(run({"frobnicate"}).status == kExitUsage);
  CHECK(run({"estimate", "x", "--alpha", "9", "--estimator", "generalized"}).status == kExitUsage);
  r = run({"simulate", "--family", "bms", "--p", "2", "--out", temp_path("never.bin")});
  CHECK(r.status == kExitUsage);
  check_schema(json::parse(r.err), "error.schema.json");
  CHECK(run({"simulate", "--family", "bms", "--out", temp_path("never.bin")}).status == kExitUsage);
  CHECK(run({"--help"}).status == kExitOk);
  CHECK(run({"estimate", "--help"}).status == kExitOk);
}
