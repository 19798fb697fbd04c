#include "minent/cli.hpp"

#include <bit>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "minent/analysis.hpp"
#include "minent/entropy_core.hpp"
#include "minent/estimators.hpp"
#include "minent/io.hpp"
#include "minent/sources.hpp"

namespace minent {

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  const auto dots = text.find("..");
  try {
    if (dots != std::string::npos) {
      std::size_t used = 0;
      const int lo = std::stoi(text.substr(0, dots), &used);
      if (used != dots) throw std::invalid_argument(text);
      const std::string rest = text.substr(dots + 2);
      const int hi = std::stoi(rest, &used);
      if (used != rest.size() || hi < lo) throw std::invalid_argument(text);
      for (int a = lo; a <= hi; ++a) out.push_back(a);
      return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(text);
    }
  } catch (const std::logic_error&) {
    throw std::invalid_argument("cannot parse integer list '" + text + "'");
  }
  if (out.empty()) throw std::invalid_argument("empty integer list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  try {
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(text);
    }
  } catch (const std::logic_error&) {
    throw std::invalid_argument("cannot parse number list '" + text + "'");
  }
  if (out.empty()) throw std::invalid_argument("empty number list");
  return out;
}

namespace {

struct ConfigFlags {
  EstimatorConfig cfg;
  std::string mode = "overlapping";
  bool no_confidence = false;

  void attach(CLI::App* sub) {
    sub->add_option("--alpha", cfg.alpha, "Renyi order for the generalized estimator")->capture_default_str();
    sub->add_option("--cutoff", cfg.cutoff, "Count threshold that fixes u")->capture_default_str();
    sub->add_option("--z", cfg.confidence_z, "Confidence multiplier")->capture_default_str();
    sub->add_option("--mode", mode, "Tuple layout for collision counts")
        ->check(CLI::IsMember({"overlapping", "non_overlapping"}))
        ->capture_default_str();
    sub->add_option("--bisect-tol", cfg.bisect_tol, "Bisection tolerance")->capture_default_str();
    sub->add_flag("--no-confidence", no_confidence, "Report theta-hat without the confidence margin");
    sub->add_flag("--allow-high-alpha", cfg.allow_high_alpha, "Permit alpha above 8");
  }

  EstimatorConfig resolve() const {
    EstimatorConfig out = cfg;
    out.mode = mode == "overlapping" ? TupleMode::overlapping : TupleMode::non_overlapping;
    out.apply_confidence = !no_confidence;
    out.validate();
    return out;
  }
};

struct SourceFlags {
  std::string family = "bms";
  std::optional<double> param;
  std::optional<std::size_t> k;
  std::optional<std::size_t> length;
  std::uint64_t seed = 1;
  std::optional<int> initial;

  void attach(CLI::App* sub, bool with_param) {
    sub->add_option("--family", family, "bms, markov, near-uniform or inverted-near-uniform")
        ->capture_default_str();
    if (with_param) sub->add_option("--p,--theta,--psi", param, "Family parameter");
    sub->add_option("--k", k, "Alphabet size (default 2, or 64 for the non-binary families)");
    sub->add_option("-L,--length", length, "Sequence length in symbols");
    sub->add_option("--seed", seed, "Seed")->capture_default_str();
    sub->add_option("--initial", initial, "Markov initial state; default is a uniform draw");
  }

  SourceSpec resolve() const {
    SourceSpec spec;
    spec.family = source_family_from_string(family);
    const bool binary = spec.family == SourceFamily::bms || spec.family == SourceFamily::markov;
    spec.k = k.value_or(binary ? 2 : 64);
    spec.length = length.value_or(binary ? 100000 : 10000);
    spec.seed = seed;
    spec.initial_state = initial;
    if (param) spec.param = *param;
    return spec;
  }
};

struct TrialFlags {
  std::size_t trials = 100;
  std::optional<unsigned> threads;
  bool binarize = false;

  void attach(CLI::App* sub, std::size_t default_trials) {
    trials = default_trials;
    sub->add_option("--trials", trials, "Number of simulated sequences")->capture_default_str();
    sub->add_option("--threads", threads, "Worker threads (default: MINENT_THREADS or all cores)");
    sub->add_flag("--binarize", binarize, "Estimate on the binary expansion, scaled by log2 k");
  }

  TrialOptions resolve(std::uint64_t seed) const {
    TrialOptions o;
    o.n_trials = trials;
    o.base_seed = seed;
    o.binarize = binarize;
    if (threads) {
      o.threads = *threads;
    } else if (const char* env = std::getenv("MINENT_THREADS")) {
      try {
        o.threads = static_cast<unsigned>(std::stoul(env));
      } catch (const std::logic_error&) {
        throw std::invalid_argument("MINENT_THREADS must be a non-negative integer");
      }
    }
    return o;
  }
};

struct GridFlags {
  std::string grid;
  std::optional<double> from;
  std::optional<double> to;
  std::size_t steps = 0;

  void attach(CLI::App* sub) {
    sub->add_option("--grid", grid, "Comma-separated parameter values");
    sub->add_option("--from", from, "First grid value");
    sub->add_option("--to", to, "Last grid value");
    sub->add_option("--steps", steps, "Number of evenly spaced grid values");
  }

  std::vector<double> resolve(double lo, double hi, std::size_t n) const {
    if (!grid.empty()) return parse_double_list(grid);
    return linear_grid(from.value_or(lo), to.value_or(hi), steps ? steps : n);
  }
};

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw InputError(InputError::Kind::io, "cannot open '" + path + "' for writing");
  file << text;
  if (!file) throw InputError(InputError::Kind::io, "write failed for '" + path + "'");
}

std::string render(const Table& t, const std::string& format) {
  if (format == "json") return table_to_json(t) + "\n";
  std::ostringstream ss;
  write_csv(t, ss);
  return ss.str();
}

std::vector<EstimatorSetup> parse_estimators(const std::string& text, const EstimatorConfig& base) {
  std::vector<EstimatorSetup> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    EstimatorSetup s;
    s.cfg = base;
    const auto colon = item.find(':');
    s.kind = estimator_kind_from_string(item.substr(0, colon));
    if (colon != std::string::npos) {
      if (s.kind != EstimatorKind::generalized) {
        throw std::invalid_argument("only the generalized estimator takes an order: '" + item + "'");
      }
      s.cfg.alpha = parse_int_list(item.substr(colon + 1)).front();
    }
    out.push_back(s);
  }
  if (out.empty()) throw std::invalid_argument("no estimators given");
  return out;
}

unsigned bits_for_alphabet(std::size_t k) {
  return std::max(1U, static_cast<unsigned>(std::bit_width(k - 1)));
}

int fail(std::ostream& err, int status, const std::string& code, const std::string& message,
         nlohmann::ordered_json extra = nlohmann::ordered_json::object()) {
  nlohmann::ordered_json body;
  body["code"] = code;
  body["message"] = message;
  for (auto& [key, value] : extra.items()) body[key] = value;
  nlohmann::ordered_json doc;
  doc["error"] = std::move(body);
  err << doc.dump() << '\n';
  return status;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Min-entropy estimation with the LRS estimator family", "minent"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::function<void()> action;

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Estimate the min-entropy of a sequence file");
  InputDescriptor input;
  std::string input_format = "raw_bitpacked";
  std::string estimator_name = "improved";
  std::string out_path;
  bool estimate_binarize = false;
  ConfigFlags estimate_cfg;
  estimate->add_option("input", input.path, "Sequence file")->required();
  estimate->add_option("--format", input_format, "raw_bitpacked, bytes_one_symbol or text_symbols")
      ->capture_default_str();
  estimate->add_option("--bits-per-symbol", input.bits_per_symbol, "Bits per symbol, 1 to 16")
      ->capture_default_str();
  estimate->add_option("--max-symbols", input.max_symbols, "Read at most this many symbols");
  estimate->add_option("--estimator", estimator_name, "lrs, improved or generalized")
      ->check(CLI::IsMember({"lrs", "improved", "generalized"}))
      ->capture_default_str();
  estimate->add_flag("--binarize", estimate_binarize, "Estimate per bit and scale by bits per symbol");
  estimate->add_option("--out", out_path, "Write the JSON document here instead of stdout");
  estimate_cfg.attach(estimate);
  estimate->callback([&] {
    action = [&] {
      const auto start = std::chrono::steady_clock::now();
      input.format = input_format_from_string(input_format);
      ResultDocument doc;
      doc.kind = estimator_kind_from_string(estimator_name);
      doc.cfg = estimate_cfg.resolve();
      if (doc.kind != EstimatorKind::generalized) doc.cfg.alpha = 2;
      LoadedInput loaded = load_input(input);
      doc.input = input;
      doc.input_sha256 = loaded.sha256;
      doc.input_symbols = loaded.sequence.size();
      doc.binarized = estimate_binarize && input.bits_per_symbol > 1;
      const TupleIndex index(doc.binarized ? binarize(loaded.sequence) : std::move(loaded.sequence));
      doc.estimate = run_estimator(doc.kind, index, doc.cfg);
      doc.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      emit(result_to_json(doc).dump(2) + "\n", out_path, out);
    };
  });

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Write a simulated source sequence to a file");
  SourceFlags sim_source;
  std::string sim_format = "raw_bitpacked";
  std::string sim_out;
  std::optional<unsigned> sim_bps;
  bool sim_binarize = false;
  sim_source.attach(simulate, true);
  simulate->add_option("--format", sim_format, "raw_bitpacked, bytes_one_symbol or text_symbols")
      ->capture_default_str();
  simulate->add_option("--bits-per-symbol", sim_bps, "Bits per written symbol (default: smallest fit)");
  simulate->add_flag("--binarize", sim_binarize, "Write the MSB-first binary expansion");
  simulate->add_option("--out", sim_out, "Output file")->required();
  simulate->callback([&] {
    action = [&] {
      if (!sim_source.param) throw std::invalid_argument("simulate needs --p, --theta or --psi");
      const SourceSpec spec = sim_source.resolve();
      SymbolSequence seq = generate(spec);
      if (sim_binarize) seq = binarize(seq);
      const unsigned bps = sim_bps.value_or(bits_for_alphabet(seq.k()));
      const InputFormat format = input_format_from_string(sim_format);
      const auto bytes = encode_symbols(seq, format, bps);
      write_file_bytes(sim_out, bytes);
      nlohmann::ordered_json doc;
      doc["family"] = to_string(spec.family);
      doc["param"] = spec.param;
      doc["k"] = spec.k;
      doc["length"] = spec.length;
      doc["seed"] = spec.seed;
      doc["initial_state"] = spec.initial_state ? nlohmann::ordered_json(*spec.initial_state) : nullptr;
      doc["binarized"] = sim_binarize;
      doc["path"] = sim_out;
      doc["format"] = to_string(format);
      doc["bits_per_symbol"] = bps;
      doc["symbols"] = seq.size();
      doc["sha256"] = sha256_hex(bytes);
      out << doc.dump(2) << '\n';
    };
  });

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Bias sweep of estimators over a source parameter grid");
  SourceFlags sweep_source;
  GridFlags sweep_grid;
  TrialFlags sweep_trials;
  ConfigFlags sweep_cfg;
  std::string sweep_estimators = "lrs,improved";
  std::string sweep_format = "csv";
  std::string sweep_out;
  sweep_source.attach(sweep, false);
  sweep_grid.attach(sweep);
  sweep_trials.attach(sweep, 100);
  sweep_cfg.attach(sweep);
  sweep->add_option("--estimators", sweep_estimators, "e.g. lrs,improved,generalized:3")
      ->capture_default_str();
  sweep->add_option("--format", sweep_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sweep->add_option("--out", sweep_out, "Write the table here instead of stdout");
  sweep->callback([&] {
    action = [&] {
      SourceSpec base = sweep_source.resolve();
      double lo = 0.05, hi = 0.5;
      if (base.family == SourceFamily::near_uniform || base.family == SourceFamily::inverted_near_uniform) {
        lo = 1.0 / static_cast<double>(base.k);
        hi = 1.0;
      }
      base.param = lo;
      const auto grid = sweep_grid.resolve(lo, hi, 10);
      const auto setups = parse_estimators(sweep_estimators, sweep_cfg.resolve());
      const Table t = bias_sweep(base, grid, setups, sweep_trials.resolve(sweep_source.seed));
      emit(render(t, sweep_format), sweep_out, out);
    };
  });

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Sharp bounds on the max probability against pc");
  std::size_t bounds_k = 2;
  GridFlags bounds_grid;
  std::string bounds_format = "csv";
  std::string bounds_out;
  bounds->add_option("--k", bounds_k, "Alphabet size")->capture_default_str();
  bounds_grid.attach(bounds);
  bounds->add_option("--format", bounds_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  bounds->add_option("--out", bounds_out, "Write the table here instead of stdout");
  bounds->callback([&] {
    action = [&] {
      if (bounds_k < 2) throw std::invalid_argument("--k must be at least 2");
      const auto grid = bounds_grid.resolve(1.0 / static_cast<double>(bounds_k), 1.0, 51);
      emit(render(bound_curves(grid, bounds_k), bounds_format), bounds_out, out);
    };
  });

  // variance
  auto* variance = app.add_subcommand("variance", "Variance of theta-hat across orders");
  SourceFlags var_source;
  TrialFlags var_trials;
  ConfigFlags var_cfg;
  var_cfg.mode = "non_overlapping";
  std::string var_alphas = "2..6";
  std::string var_format = "csv";
  std::string var_out;
  var_source.param = 0.5;
  var_source.attach(variance, true);
  var_trials.attach(variance, 200);
  var_cfg.attach(variance);
  variance->add_option("--alphas", var_alphas, "Orders, e.g. 2..6 or 2,4,6")->capture_default_str();
  variance->add_option("--format", var_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  variance->add_option("--out", var_out, "Write the table here instead of stdout");
  variance->callback([&] {
    action = [&] {
      const Table t = variance_sweep(var_source.resolve(), parse_int_list(var_alphas), var_cfg.resolve(),
                                     var_trials.resolve(var_source.seed));
      emit(render(t, var_format), var_out, out);
    };
  });

  // vbar
  auto* vbar = app.add_subcommand("vbar", "Mean v per order against the predicted v-bar");
  SourceFlags vbar_source;
  TrialFlags vbar_trials;
  std::string vbar_alphas = "2..5";
  std::string vbar_format = "csv";
  std::string vbar_out;
  vbar_source.param = 0.5;
  vbar_source.attach(vbar, true);
  vbar_trials.attach(vbar, 20);
  vbar->add_option("--alphas", vbar_alphas, "Orders, e.g. 2..5")->capture_default_str();
  vbar->add_option("--format", vbar_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  vbar->add_option("--out", vbar_out, "Write the table here instead of stdout");
  vbar->callback([&] {
    action = [&] {
      const Table t = v_bar_check(vbar_source.resolve(), parse_int_list(vbar_alphas),
                                  vbar_trials.resolve(vbar_source.seed));
      emit(render(t, vbar_format), vbar_out, out);
    };
  });

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Exact expectation of the order-alpha estimate, small l");
  double oracle_p = 0.5;
  std::size_t oracle_l = 6;
  unsigned oracle_alpha = 2;
  oracle->add_option("--p", oracle_p, "Bernoulli parameter")->capture_default_str();
  oracle->add_option("--l", oracle_l, "Sequence length, at most 14")->capture_default_str();
  oracle->add_option("--alpha", oracle_alpha, "Order")->capture_default_str();
  oracle->callback([&] {
    action = [&] {
      nlohmann::ordered_json doc;
      doc["p"] = oracle_p;
      doc["l"] = oracle_l;
      doc["alpha"] = oracle_alpha;
      doc["expectation"] = exact_expectation_oracle(oracle_p, oracle_l, oracle_alpha);
      doc["power_sum"] = std::pow(oracle_p, oracle_alpha) + std::pow(1.0 - oracle_p, oracle_alpha);
      out << doc.dump(2) << '\n';
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    action();
  } catch (const InputError& e) {
    return fail(err, kExitInput, e.code(), e.what());
  } catch (const EstimationError& e) {
    return fail(err, kExitEstimation, to_string(e.code()), e.what(), {{"u", e.u()}, {"v", e.v()}});
  } catch (const std::invalid_argument& e) {
    return fail(err, kExitUsage, "invalid_argument", e.what());
  } catch (const std::domain_error& e) {
    return fail(err, kExitUsage, "invalid_argument", e.what());
  } catch (const std::exception& e) {
    return fail(err, 1, "internal_error", e.what());
  }
  return kExitOk;
}

}  // namespace minent
