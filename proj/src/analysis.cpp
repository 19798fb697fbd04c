#include "minent/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "json.hpp"
#include "minent/entropy_core.hpp"

namespace minent {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs fn(i) for i in [0, n) on up to `threads` workers. The first exception
// thrown by any job is rethrown after all workers stop.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), n));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
}

struct Moments {
  double mean = kNaN;
  double variance = kNaN;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  if (xs.empty()) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return m;
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  m.variance = ss / static_cast<double>(xs.size() - 1);
  return m;
}

struct Outcome {
  bool ok = false;
  double h = 0.0;
  double theta = 0.0;
};

EstimatorConfig effective_config(const EstimatorSetup& setup) {
  EstimatorConfig cfg = setup.cfg;
  if (setup.kind != EstimatorKind::generalized) cfg.alpha = 2;
  return cfg;
}

MinEntropyEstimate finish(EstimatorKind kind, const TupleStatistics& stats, const EstimatorConfig& cfg) {
  switch (kind) {
    case EstimatorKind::lrs_nist:
      return finish_lrs_nist(stats, cfg);
    case EstimatorKind::improved:
      return finish_improved(stats, cfg);
    case EstimatorKind::generalized:
      return finish_generalized(stats, cfg);
  }
  throw std::invalid_argument("unknown estimator");
}

// Every setup on one index. Setups that agree on order, mode and cutoff
// share one pass over the tuple counts.
std::vector<Outcome> estimate_all(const TupleIndex& index, const std::vector<EstimatorSetup>& setups,
                                  double scale) {
  struct Cached {
    EstimatorConfig cfg;
    std::optional<TupleStatistics> stats;
  };
  std::vector<Cached> cache;
  std::vector<Outcome> out(setups.size());
  for (std::size_t j = 0; j < setups.size(); ++j) {
    const EstimatorConfig cfg = effective_config(setups[j]);
    auto hit = std::find_if(cache.begin(), cache.end(), [&](const Cached& c) {
      return c.cfg.alpha == cfg.alpha && c.cfg.mode == cfg.mode && c.cfg.cutoff == cfg.cutoff;
    });
    if (hit == cache.end()) {
      Cached fresh{cfg, std::nullopt};
      try {
        fresh.stats = collect_statistics(index, cfg);
      } catch (const EstimationError&) {
      }
      cache.push_back(std::move(fresh));
      hit = cache.end() - 1;
    }
    if (!hit->stats) continue;
    const MinEntropyEstimate est = finish(setups[j].kind, *hit->stats, cfg);
    out[j] = {true, est.h_estimate * scale, est.theta_hat};
  }
  return out;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string estimator_label(const EstimatorSetup& setup) {
  if (setup.kind == EstimatorKind::generalized) {
    return "generalized_a" + std::to_string(setup.cfg.alpha);
  }
  return to_string(setup.kind);
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1U, std::thread::hardware_concurrency());
}

std::vector<TrialReport> run_trials(const SourceSpec& spec, const std::vector<EstimatorSetup>& setups,
                                    const TrialOptions& options) {
  spec.validate();
  if (options.n_trials < 2) throw std::invalid_argument("run_trials: need at least 2 trials");
  if (setups.empty()) throw std::invalid_argument("run_trials: no estimators");
  for (const auto& s : setups) effective_config(s).validate();
  const bool binarized = options.binarize && spec.k > 2;
  const double scale = binarized ? static_cast<double>(bits_per_symbol(spec.k)) : 1.0;

  std::vector<std::vector<Outcome>> outcomes(options.n_trials);
  parallel_for(options.n_trials, options.threads, [&](std::size_t i) {
    SourceSpec trial = spec;
    trial.seed = derive_seed(options.base_seed, i);
    SymbolSequence seq = generate(trial);
    if (binarized) seq = binarize(seq);
    outcomes[i] = estimate_all(TupleIndex(std::move(seq)), setups, scale);
  });

  std::vector<TrialReport> reports;
  reports.reserve(setups.size());
  for (std::size_t j = 0; j < setups.size(); ++j) {
    TrialReport r;
    r.spec = spec;
    r.setup = setups[j];
    r.setup.cfg = effective_config(setups[j]);
    r.base_seed = options.base_seed;
    r.binarized = binarized;
    for (const auto& trial : outcomes) {
      if (!trial[j].ok) {
        ++r.failed;
        continue;
      }
      r.estimates.push_back(trial[j].h);
      r.theta_hats.push_back(trial[j].theta);
    }
    r.n_trials = r.estimates.size();
    const Moments h = moments(r.estimates);
    const Moments t = moments(r.theta_hats);
    r.mean = h.mean;
    r.sample_variance = h.variance;
    r.theta_mean = t.mean;
    r.theta_variance = t.variance;
    r.reference = theoretical_entropy(spec, EntropyKind::min);
    r.reference_collision = theoretical_entropy(spec, EntropyKind::collision);
    reports.push_back(std::move(r));
  }
  return reports;
}

TrialReport run_trials(const SourceSpec& spec, const EstimatorSetup& setup, const TrialOptions& options) {
  return run_trials(spec, std::vector<EstimatorSetup>{setup}, options).front();
}

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::invalid_argument("table has no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

double Table::at(std::size_t row, const std::string& name) const { return rows.at(row).at(column(name)); }

void write_csv(const Table& table, std::ostream& out) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c ? "," : "") << table.columns[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
    out << '\n';
  }
}

std::string table_to_json(const Table& table) {
  nlohmann::ordered_json doc;
  doc["columns"] = table.columns;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (std::isnan(row[c])) {
        obj[table.columns[c]] = nullptr;
      } else {
        obj[table.columns[c]] = row[c];
      }
    }
    doc["rows"].push_back(std::move(obj));
  }
  return doc.dump(2);
}

Table bias_sweep(const SourceSpec& base, const std::vector<double>& grid,
                 const std::vector<EstimatorSetup>& setups, const TrialOptions& options) {
  if (grid.empty()) throw std::invalid_argument("bias_sweep: empty grid");
  Table t;
  t.columns = {"param", "h_min", "h_collision"};
  for (const auto& s : setups) {
    const std::string label = estimator_label(s);
    for (const char* suffix : {"_mean", "_std", "_var_theta", "_failed"}) t.columns.push_back(label + suffix);
  }
  for (double param : grid) {
    SourceSpec spec = base;
    spec.param = param;
    const auto reports = run_trials(spec, setups, options);
    std::vector<double> row = {param, reports.front().reference, reports.front().reference_collision};
    for (const auto& r : reports) {
      row.push_back(r.mean);
      row.push_back(std::sqrt(r.sample_variance));
      row.push_back(r.theta_variance);
      row.push_back(static_cast<double>(r.failed));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table variance_sweep(const SourceSpec& spec, const std::vector<int>& alphas, const EstimatorConfig& cfg,
                     const TrialOptions& options) {
  if (alphas.empty()) throw std::invalid_argument("variance_sweep: empty order grid");
  std::vector<EstimatorSetup> setups;
  for (int alpha : alphas) {
    EstimatorSetup s{EstimatorKind::generalized, cfg};
    s.cfg.alpha = alpha;
    setups.push_back(s);
  }
  const auto reports = run_trials(spec, setups, options);
  Table t;
  t.columns = {"alpha", "mean_h", "var_h", "var_theta", "failed", "ratio_next", "predicted_ratio"};
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    const int alpha = alphas[i];
    const bool has_next = i + 1 < reports.size() && alphas[i + 1] == alpha + 1;
    t.rows.push_back({static_cast<double>(alpha), r.mean, r.sample_variance, r.theta_variance,
                      static_cast<double>(r.failed),
                      has_next ? reports[i + 1].theta_variance / r.theta_variance : kNaN,
                      variance_ratio_prediction(alpha)});
  }
  return t;
}

Table bound_curves(const std::vector<double>& pc_grid, std::size_t k) {
  if (k < 2) throw std::invalid_argument("bound_curves: k must be at least 2");
  const double floor = 1.0 / static_cast<double>(k);
  Table t;
  t.columns = {"pc", "theta_hat", "psi", "h_from_theta_hat", "h_from_psi", "h_collision"};
  for (double pc : pc_grid) {
    if (!(pc >= floor - 1e-12 && pc <= 1.0)) {
      throw std::domain_error("bound_curves: pc must lie in [1/k, 1]");
    }
    const double hi = theta_upper_bound(pc, k);
    const double lo = theta_lower_bound(pc);
    t.rows.push_back({pc, hi, lo, 0.0 - std::log2(hi), 0.0 - std::log2(lo), 0.0 - std::log2(pc)});
  }
  return t;
}

double exact_expectation_oracle(double p, std::size_t l, unsigned alpha) {
  using Dec = boost::multiprecision::cpp_dec_float_50;
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("oracle: p must lie in [0, 1]");
  if (alpha < 2) throw std::invalid_argument("oracle: order must be at least 2");
  if (l > 14) throw std::invalid_argument("oracle: l above 14 is too large to enumerate");
  if (l < alpha) throw std::invalid_argument("oracle: need l >= alpha");

  const Dec one_p(p);
  const Dec zero_p = Dec(1) - one_p;
  Dec expectation = 0;
  std::vector<Symbol> bits(l);
  for (std::uint32_t mask = 0; mask < (1U << l); ++mask) {
    unsigned ones = 0;
    for (std::size_t i = 0; i < l; ++i) {
      bits[i] = static_cast<Symbol>((mask >> i) & 1U);
      ones += bits[i];
    }
    const Dec weight = pow(one_p, ones) * pow(zero_p, static_cast<unsigned>(l - ones));
    if (weight == 0) continue;
    const double m_hat = estimate_power_sum_w(SymbolSequence(bits, 2), 1, alpha, TupleMode::non_overlapping);
    expectation += weight * Dec(m_hat);
  }
  return expectation.convert_to<double>();
}

Table v_bar_check(const SourceSpec& spec, const std::vector<int>& alphas, const TrialOptions& options) {
  spec.validate();
  if (!spec.is_iid()) throw std::invalid_argument("v_bar_check: needs an i.i.d. source");
  if (alphas.empty()) throw std::invalid_argument("v_bar_check: empty order grid");
  if (options.n_trials < 1) throw std::invalid_argument("v_bar_check: need at least one trial");
  const Distribution d = spec.distribution();
  for (int alpha : alphas) {
    if (alpha < 2) throw std::invalid_argument("v_bar_check: order must be at least 2");
    if (!(power_sum(d, alpha) < 1.0)) {
      throw std::invalid_argument("v_bar_check: power sum is 1, prediction does not apply");
    }
  }

  std::vector<std::vector<double>> vs(options.n_trials, std::vector<double>(alphas.size(), kNaN));
  parallel_for(options.n_trials, options.threads, [&](std::size_t i) {
    SourceSpec trial = spec;
    trial.seed = derive_seed(options.base_seed, i);
    const TupleIndex index(generate(trial));
    for (std::size_t j = 0; j < alphas.size(); ++j) {
      try {
        vs[i][j] = static_cast<double>(index.find_v(static_cast<unsigned>(alphas[j])));
      } catch (const EstimationError&) {
      }
    }
  });

  Table t;
  t.columns = {"alpha", "v_mean", "v_predicted", "ratio_empirical", "ratio_predicted"};
  std::vector<double> means(alphas.size());
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    std::vector<double> col;
    for (const auto& trial : vs) {
      if (!std::isnan(trial[j])) col.push_back(trial[j]);
    }
    means[j] = moments(col).mean;
  }
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    const int alpha = alphas[j];
    const bool has_next = j + 1 < alphas.size() && alphas[j + 1] == alpha + 1;
    const double a = alpha;
    t.rows.push_back({a, means[j], v_bar_prediction(power_sum(d, alpha), spec.length, alpha),
                      has_next ? means[j + 1] / means[j] : kNaN, (a * a - 1.0) / (a * a)});
  }
  return t;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  if (n == 0) throw std::invalid_argument("linear_grid: need at least one point");
  if (n == 1) return {lo};
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  out.back() = hi;
  return out;
}

}  // namespace minent
