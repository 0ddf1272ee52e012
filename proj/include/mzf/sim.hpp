#pragma once

// Monte Carlo harness: one channel realization per trial (one coherence
// interval), every detector preprocessed once per realization, and all
// detectors fed the same (channel, symbols, noise) triple at each SNR point.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <limits>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "mzf/alphabet.hpp"
#include "mzf/channel.hpp"
#include "mzf/detect.hpp"
#include "mzf/error.hpp"
#include "mzf/metrics.hpp"
#include "mzf/random.hpp"

namespace mzf {

struct DetectorConfig {
  std::string id;
  DetectorSpec spec;
};

/// "zf", "lmmse", "ml", "lar", "mzf[:solver[:lmmse]]", "mzf-ext1", "mzf-ext2", "mzf-ext3".
inline DetectorConfig parse_detector(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ':');) parts.push_back(tok);
  if (parts.empty() || parts[0].empty()) throw ConfigError("detectors: empty detector name");

  static const std::map<std::string, DetectorKind> kinds = {
      {"zf", DetectorKind::zf},           {"lmmse", DetectorKind::lmmse},        {"ml", DetectorKind::ml},
      {"lar", DetectorKind::lar},         {"mzf", DetectorKind::mzf},            {"mzf-ext1", DetectorKind::mzf_ext1},
      {"mzf-ext2", DetectorKind::mzf_ext2}, {"mzf-ext3", DetectorKind::mzf_ext3}};
  static const std::map<std::string, SolverKind> solvers = {
      {"sd", SolverKind::sd}, {"lll", SolverKind::lll}, {"brute", SolverKind::brute}};

  const auto kind = kinds.find(parts[0]);
  if (kind == kinds.end()) throw ConfigError("detectors: unknown detector '" + parts[0] + "'");
  DetectorConfig cfg{text, {kind->second, EqualizerKind::zf, SolverKind::sd}};
  if (parts.size() > 1) {
    if (!is_modulus_kind(cfg.spec.kind))
      throw ConfigError("detectors: '" + parts[0] + "' takes no solver or equalizer suffix");
    const auto s = solvers.find(parts[1]);
    if (s == solvers.end()) throw ConfigError("detectors: unknown solver '" + parts[1] + "' in '" + text + "'");
    cfg.spec.solver = s->second;
  }
  if (parts.size() > 2) {
    if (parts[2] == "lmmse") cfg.spec.equalizer = EqualizerKind::lmmse;
    else if (parts[2] == "zf") cfg.spec.equalizer = EqualizerKind::zf;
    else throw ConfigError("detectors: unknown equalizer '" + parts[2] + "' in '" + text + "'");
  }
  if (parts.size() > 3) throw ConfigError("detectors: too many ':' fields in '" + text + "'");
  return cfg;
}

struct SimConfig {
  int kc = 3;           ///< complex antennas per side; real dimension 2 * kc
  int real_k = 0;       ///< > 0: unstructured real i.i.d. K x K channel instead
  int modulation = 16;
  std::vector<double> snr_db;
  int trials = 2000;
  std::vector<DetectorConfig> detectors;
  std::uint64_t seed = 42;
  DetectorOptions options;
  bool timing = false;  ///< wall_time_ms stays 0 unless set, keeping output byte-reproducible
  int threads = 0;      ///< 0: hardware concurrency, capped by MZF_THREADS

  int real_dim() const { return real_k > 0 ? real_k : 2 * kc; }

  void validate() const {
    if (real_k <= 0 && kc < 1) throw ConfigError("kc: must be >= 1");
    if (trials < 1) throw ConfigError("trials: must be >= 1");
    if (snr_db.empty()) throw ConfigError("snr_db: at least one SNR point is required");
    if (detectors.empty()) throw ConfigError("detectors: at least one detector is required");
    if (threads < 0) throw ConfigError("threads: must be >= 0");
    if (options.sd_budget < 1) throw ConfigError("sd_budget: must be >= 1");
    if (options.brute_bound < 0) throw ConfigError("brute_bound: must be >= 0");
    if (!(options.lll_delta > 0.25 && options.lll_delta <= 1.0)) throw ConfigError("lll_delta: must lie in (0.25, 1]");
    make_alphabet(modulation);
  }
};

struct SimRecord {
  std::string detector;
  double snr_db = 0.0;
  std::string bit_layer;  ///< "1".."N" or "all"
  double ber = 0.0;
  double ser = 0.0;
  double mean_gain_db = 0.0;
  long long trials = 0;
  double wall_time_ms = 0.0;
};

/// "a:step:b" (inclusive) or a comma list.
inline std::vector<double> parse_snr_list(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<double> f;
    std::stringstream ss(text);
    for (std::string tok; std::getline(ss, tok, ':');) f.push_back(std::stod(tok));
    if (f.size() != 3 || f[1] <= 0.0) throw ConfigError("snr: expected start:step:stop with step > 0");
    const long n = static_cast<long>(std::floor((f[2] - f[0]) / f[1] + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(f[0] + i * f[1]);
  } else {
    std::stringstream ss(text);
    for (std::string tok; std::getline(ss, tok, ',');)
      if (!tok.empty()) out.push_back(std::stod(tok));
  }
  if (out.empty()) throw ConfigError("snr: empty SNR list");
  return out;
}

inline int resolve_workers(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("MZF_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::max(1, n);
}

/// Runs fn(i) for i in [0, count) over `workers` threads.
template <class Fn>
void parallel_for(int count, int workers, Fn&& fn) {
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline Matrix draw_channel(RandomStream& rng, const SimConfig& cfg) {
  if (cfg.real_k > 0) return generate_real_iid_channel(rng, cfg.real_k);
  return embed_complex(generate_channel(rng, cfg.kc).entries);
}

namespace detail {

struct CellOutcome {
  BerAccumulator acc;
  std::vector<double> gain_sum;  ///< index 0: all layers, n: bit layer n
  std::vector<long long> gain_count;
  double elapsed_ms = 0.0;
  long long inexact_plans = 0;
};

inline void add_gains(CellOutcome& cell, const DetectorState& st, double snr_linear) {
  if (!is_modulus_kind(st.spec.kind)) return;
  const int nbits = st.alphabet.nbits;
  for (const auto& per_layer : st.plans) {
    for (int n = 1; n <= nbits; ++n) {
      const auto& plan = per_layer.size() > 1 ? per_layer[n - 1] : per_layer[0];
      const double g = post_snr(plan, st.channel.hplus, snr_linear).gain_db;
      cell.gain_sum[n] += g;
      ++cell.gain_count[n];
    }
    for (const auto& plan : per_layer) {
      cell.gain_sum[0] += post_snr(plan, st.channel.hplus, snr_linear).gain_db;
      ++cell.gain_count[0];
      if (st.spec.solver == SolverKind::sd && !plan.exact) ++cell.inexact_plans;
    }
  }
}

}  // namespace detail

struct SimResult {
  std::vector<SimRecord> records;
  long long inexact_plans = 0;  ///< SD solves that hit the node budget
};

inline SimResult run_experiment_detailed(const SimConfig& cfg) {
  cfg.validate();
  const PamAlphabet alphabet = make_alphabet(cfg.modulation);
  const int k = cfg.real_dim();
  const int nbits = alphabet.nbits;
  const std::size_t ndet = cfg.detectors.size();
  const std::size_t nsnr = cfg.snr_db.size();

  std::vector<NoiseSpec> noises;
  for (double s : cfg.snr_db) noises.push_back(snr_to_n0(s, alphabet));

  using Clock = std::chrono::steady_clock;
  auto fresh_cell = [&] {
    return detail::CellOutcome{BerAccumulator(nbits), std::vector<double>(nbits + 1, 0.0),
                               std::vector<long long>(nbits + 1, 0), 0.0, 0};
  };
  // outcomes[trial][det * nsnr + snr]
  std::vector<std::vector<detail::CellOutcome>> outcomes(cfg.trials);

  parallel_for(cfg.trials, resolve_workers(cfg.threads), [&](int trial) {
    RandomStream rng(cfg.seed, static_cast<std::uint64_t>(trial));
    const Matrix h = draw_channel(rng, cfg);
    auto& cells = outcomes[trial];
    cells.reserve(ndet * nsnr);
    for (std::size_t i = 0; i < ndet * nsnr; ++i) cells.push_back(fresh_cell());

    std::vector<std::optional<DetectorState>> fixed(ndet);
    std::vector<double> fixed_ms(ndet, 0.0);
    for (std::size_t d = 0; d < ndet; ++d) {
      const auto& spec = cfg.detectors[d].spec;
      const bool per_snr = spec.kind == DetectorKind::lmmse || spec.equalizer == EqualizerKind::lmmse;
      if (per_snr) continue;
      const auto t0 = Clock::now();
      fixed[d] = preprocess(spec, h, alphabet, NoiseSpec{0.0}, cfg.options);
      fixed_ms[d] = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    }

    for (std::size_t s = 0; s < nsnr; ++s) {
      const Vector x = random_symbols(rng, alphabet, k);
      const Vector y = apply_channel(h, x, noises[s], rng);
      std::vector<int> truth(k);
      for (int i = 0; i < k; ++i) truth[i] = static_cast<int>(x(i));
      const double snr_linear = std::pow(10.0, cfg.snr_db[s] / 10.0);

      for (std::size_t d = 0; d < ndet; ++d) {
        auto& cell = cells[d * nsnr + s];
        const auto t0 = Clock::now();
        std::optional<DetectorState> local;
        const DetectorState* st = fixed[d] ? &*fixed[d] : nullptr;
        if (!st) {
          local = preprocess(cfg.detectors[d].spec, h, alphabet, noises[s], cfg.options);
          st = &*local;
        }
        const auto result = detect(*st, y);
        cell.elapsed_ms += std::chrono::duration<double, std::milli>(Clock::now() - t0).count() + fixed_ms[d];
        accumulate(cell.acc, truth, result);
        detail::add_gains(cell, *st, snr_linear);
      }
    }
  });

  SimResult out;
  for (std::size_t d = 0; d < ndet; ++d) {
    for (std::size_t s = 0; s < nsnr; ++s) {
      auto total = fresh_cell();
      for (int t = 0; t < cfg.trials; ++t) {
        const auto& c = outcomes[t][d * nsnr + s];
        total.acc.merge(c.acc);
        for (int n = 0; n <= nbits; ++n) {
          total.gain_sum[n] += c.gain_sum[n];
          total.gain_count[n] += c.gain_count[n];
        }
        total.elapsed_ms += c.elapsed_ms;
        total.inexact_plans += c.inexact_plans;
      }
      out.inexact_plans += total.inexact_plans;
      const double ser = static_cast<double>(total.acc.symbol_errors) / static_cast<double>(total.acc.symbols_counted);
      auto gain = [&](int n) { return total.gain_count[n] ? total.gain_sum[n] / total.gain_count[n] : 0.0; };
      for (int n = 1; n <= nbits + 1; ++n) {
        SimRecord r;
        r.detector = cfg.detectors[d].id;
        r.snr_db = cfg.snr_db[s];
        r.trials = total.acc.trials;
        r.ser = ser;
        r.wall_time_ms = cfg.timing ? total.elapsed_ms : 0.0;
        if (n <= nbits) {
          r.bit_layer = std::to_string(n);
          r.ber = static_cast<double>(total.acc.bit_errors[n - 1]) / static_cast<double>(total.acc.bits_counted[n - 1]);
          r.mean_gain_db = gain(n);
        } else {
          r.bit_layer = "all";
          r.ber = static_cast<double>(total.acc.total_bit_errors()) / static_cast<double>(total.acc.total_bits());
          r.mean_gain_db = gain(0);
        }
        out.records.push_back(std::move(r));
      }
    }
  }
  return out;
}

inline std::vector<SimRecord> run_experiment(const SimConfig& cfg) { return run_experiment_detailed(cfg).records; }

// ---------------------------------------------------------------------------
// Output

inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline const char* kCsvHeader = "detector,snr_db,bit_layer,ber,ser,mean_gain_db,trials,wall_time_ms";

inline std::string to_csv(const std::vector<SimRecord>& records) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : records) {
    out += r.detector + ',' + format_number(r.snr_db) + ',' + r.bit_layer + ',' + format_number(r.ber) + ',' +
           format_number(r.ser) + ',' + format_number(r.mean_gain_db) + ',' + std::to_string(r.trials) + ',' +
           format_number(r.wall_time_ms) + '\n';
  }
  return out;
}

inline nlohmann::json to_json(const std::vector<SimRecord>& records) {
  auto arr = nlohmann::json::array();
  for (const auto& r : records) {
    arr.push_back({{"detector", r.detector},
                   {"snr_db", r.snr_db},
                   {"bit_layer", r.bit_layer},
                   {"ber", r.ber},
                   {"ser", r.ser},
                   {"mean_gain_db", r.mean_gain_db},
                   {"trials", r.trials},
                   {"wall_time_ms", r.wall_time_ms}});
  }
  return arr;
}

inline std::vector<SimRecord> records_from_json(const nlohmann::json& arr) {
  std::vector<SimRecord> out;
  for (const auto& o : arr) {
    SimRecord r;
    r.detector = o.at("detector").get<std::string>();
    r.snr_db = o.at("snr_db").get<double>();
    r.bit_layer = o.at("bit_layer").get<std::string>();
    r.ber = o.at("ber").get<double>();
    r.ser = o.at("ser").get<double>();
    r.mean_gain_db = o.at("mean_gain_db").get<double>();
    r.trials = o.at("trials").get<long long>();
    r.wall_time_ms = o.at("wall_time_ms").get<double>();
    out.push_back(std::move(r));
  }
  return out;
}

enum class OutputFormat { csv, json };

inline void emit(const std::vector<SimRecord>& records, OutputFormat format, const std::string& path) {
  if (records.empty()) throw ConfigError("emit: no records to write");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("emit: cannot open '" + path + "' for writing");
  if (format == OutputFormat::csv) f << to_csv(records);
  else f << to_json(records).dump(2) << '\n';
  if (!f) throw std::runtime_error("emit: write to '" + path + "' failed");
}

/// SNR (dB) where a BER curve crosses `target`, interpolating log10(BER)
/// linearly between grid points. Returns NaN if the curve never gets there.
inline double snr_at_ber(const std::vector<double>& snr_db, const std::vector<double>& ber, double target) {
  for (std::size_t i = 0; i < ber.size(); ++i) {
    if (ber[i] > target) continue;
    if (i == 0) return snr_db[0];
    const double hi = ber[i - 1];
    const double lo = ber[i];
    if (lo <= 0.0) return snr_db[i];  // error-free point: upper bound on the crossing
    const double t = (std::log10(hi) - std::log10(target)) / (std::log10(hi) - std::log10(lo));
    return snr_db[i - 1] + t * (snr_db[i] - snr_db[i - 1]);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

/// Picks the BER curve of one detector and bit layer out of a record list.
inline std::vector<double> ber_curve(const std::vector<SimRecord>& records, const std::string& detector,
                                     const std::string& bit_layer) {
  std::vector<double> out;
  for (const auto& r : records)
    if (r.detector == detector && r.bit_layer == bit_layer) out.push_back(r.ber);
  return out;
}

// ---------------------------------------------------------------------------
// Post-processing SNR gain samples (symbol-wise modulus detector)

struct GainSample {
  int trial = 0;
  int layer = 0;
  double gain_db = 0.0;
};

struct GainConfig {
  int kc = 6;
  int real_k = 0;
  std::vector<int> modulations{4, 16, 64};
  int trials = 2000;
  std::uint64_t seed = 42;
  SolverKind solver = SolverKind::sd;
  DetectorOptions options;
  int threads = 0;
};

/// samples[i] holds the gains for modulations[i]; the same channel draws are
/// used for every modulation.
inline std::vector<std::vector<GainSample>> run_snrgain(const GainConfig& cfg) {
  if (cfg.trials < 1) throw ConfigError("trials: must be >= 1");
  if (cfg.modulations.empty()) throw ConfigError("mod: at least one modulation is required");
  std::vector<PamAlphabet> alphabets;
  for (int m : cfg.modulations) alphabets.push_back(make_alphabet(m));
  SimConfig shape;
  shape.kc = cfg.kc;
  shape.real_k = cfg.real_k;

  std::vector<std::vector<std::vector<GainSample>>> per_trial(cfg.trials);
  parallel_for(cfg.trials, resolve_workers(cfg.threads), [&](int trial) {
    RandomStream rng(cfg.seed, static_cast<std::uint64_t>(trial));
    const Matrix h = draw_channel(rng, shape);
    auto& slot = per_trial[trial];
    slot.resize(alphabets.size());
    for (std::size_t m = 0; m < alphabets.size(); ++m) {
      const auto st = preprocess({DetectorKind::mzf, EqualizerKind::zf, cfg.solver}, h, alphabets[m], {}, cfg.options);
      for (const auto& per_layer : st.plans)
        slot[m].push_back({trial, per_layer[0].layer, post_snr(per_layer[0], st.channel.hplus, 1.0).gain_db});
    }
  });
  std::vector<std::vector<GainSample>> out(alphabets.size());
  for (const auto& slot : per_trial)
    for (std::size_t m = 0; m < slot.size(); ++m) out[m].insert(out[m].end(), slot[m].begin(), slot[m].end());
  return out;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace mzf
