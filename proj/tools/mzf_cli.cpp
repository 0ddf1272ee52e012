// mzf: Monte Carlo BER sweeps, post-processing SNR gain samples, the 4x4
// worked example and a quick property self-test.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mzf/worked_example.hpp"
#include "mzf/selftest.hpp"
#include "mzf/sim.hpp"

namespace {

/// Reads `key = value` lines ('#' starts a comment) and turns them into
/// `--key value` arguments. They are placed before the command-line flags,
/// and every option keeps its last occurrence, so flags win.
std::vector<std::string> config_args(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw mzf::ConfigError("config: cannot open '" + path + "'");
  std::vector<std::string> out;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(f, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw mzf::ConfigError("config: line " + std::to_string(lineno) + " is not key=value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    for (auto& c : key)
      if (c == '_') c = '-';
    if (value == "true" || value == "false") {
      if (value == "true") out.push_back("--" + key);
    } else {
      out.push_back("--" + key);
      out.push_back(value);
    }
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, sep);)
    if (!tok.empty()) out.push_back(tok);
  return out;
}

const std::map<std::string, mzf::ParityMode> kParity = {{"derived", mzf::ParityMode::derived},
                                                        {"always-odd", mzf::ParityMode::always_odd}};
const std::map<std::string, mzf::LarMode> kLar = {{"shifted", mzf::LarMode::shifted},
                                                  {"literal", mzf::LarMode::literal}};
const std::map<std::string, mzf::NoiseWeighting> kWeight = {{"physical", mzf::NoiseWeighting::physical},
                                                            {"verbatim", mzf::NoiseWeighting::verbatim}};
const std::map<std::string, mzf::SolverKind> kSolver = {
    {"sd", mzf::SolverKind::sd}, {"lll", mzf::SolverKind::lll}, {"brute", mzf::SolverKind::brute}};
const std::map<std::string, mzf::OutputFormat> kFormat = {{"csv", mzf::OutputFormat::csv},
                                                          {"json", mzf::OutputFormat::json}};

void add_detector_options(CLI::App* cmd, mzf::DetectorOptions& opts) {
  cmd->add_option("--lll-delta", opts.lll_delta, "Lovasz parameter")->capture_default_str();
  cmd->add_option("--sd-budget", opts.sd_budget, "Sphere decoder node budget per problem")->capture_default_str();
  cmd->add_option("--brute-bound", opts.brute_bound, "Box bound for the brute-force solver")->capture_default_str();
  cmd->add_option("--parity-mode", opts.parity, "Modulus branch rule")
      ->transform(CLI::CheckedTransformer(kParity, CLI::ignore_case));
  cmd->add_option("--lar-mode", opts.lar, "Lattice-reduction-aided mapping")
      ->transform(CLI::CheckedTransformer(kLar, CLI::ignore_case));
  cmd->add_option("--ext4-weight", opts.lmmse_noise_weight, "Noise block weighting for LMMSE-based plans")
      ->transform(CLI::CheckedTransformer(kWeight, CLI::ignore_case));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modulus zero-forcing MIMO detection toolkit"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string config_path;

  // ber
  mzf::SimConfig sim;
  std::string snr_text = "0:2:24";
  std::string detectors_text = "zf,mzf:sd";
  std::string out_path;
  mzf::OutputFormat format = mzf::OutputFormat::csv;
  auto* ber = app.add_subcommand("ber", "Monte Carlo BER / SER sweep");
  ber->add_option("--config", config_path, "key=value file; command-line flags override it");
  ber->add_option("--kc", sim.kc, "Complex antennas per side (real dimension 2*kc)")->capture_default_str();
  ber->add_option("--real-k", sim.real_k, "Use an unstructured real i.i.d. K x K channel instead");
  ber->add_option("--mod", sim.modulation, "QAM order M (power of 4)")->capture_default_str();
  ber->add_option("--snr", snr_text, "SNR grid in dB: start:step:stop or a,b,c")->capture_default_str();
  ber->add_option("--trials", sim.trials, "Channel realizations")->capture_default_str();
  ber->add_option("--detectors", detectors_text, "Comma list, e.g. zf,mzf:sd,mzf-ext2:sd,ml")
      ->capture_default_str();
  ber->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  ber->add_option("--threads", sim.threads, "Worker threads (0 = all cores, capped by MZF_THREADS)");
  ber->add_flag("--timing", sim.timing, "Record wall_time_ms (makes output non-reproducible)");
  ber->add_option("--out", out_path, "Output file (stdout when omitted)");
  ber->add_option("--format", format, "csv or json")->transform(CLI::CheckedTransformer(kFormat, CLI::ignore_case));
  add_detector_options(ber, sim.options);

  // snrgain
  mzf::GainConfig gain;
  std::string mods_text = "4,16,64";
  std::string prefix = "snrgain";
  auto* snrgain = app.add_subcommand("snrgain", "Per-layer post-processing SNR gain samples");
  snrgain->add_option("--config", config_path, "key=value file; command-line flags override it");
  snrgain->add_option("--kc", gain.kc, "Complex antennas per side")->capture_default_str();
  snrgain->add_option("--real-k", gain.real_k, "Use an unstructured real i.i.d. K x K channel instead");
  snrgain->add_option("--mod", mods_text, "Comma list of QAM orders")->capture_default_str();
  snrgain->add_option("--trials", gain.trials, "Channel realizations")->capture_default_str();
  snrgain->add_option("--seed", gain.seed, "Master seed")->capture_default_str();
  snrgain->add_option("--solver", gain.solver, "sd, lll or brute")
      ->transform(CLI::CheckedTransformer(kSolver, CLI::ignore_case));
  snrgain->add_option("--threads", gain.threads, "Worker threads");
  snrgain->add_option("--out-prefix", prefix, "Writes <prefix>_M<M>.csv per modulation")->capture_default_str();
  add_detector_options(snrgain, gain.options);

  // example
  mzf::ParityMode example_parity = mzf::ParityMode::derived;
  auto* example = app.add_subcommand("example", "Run the 4x4 worked example in exact arithmetic");
  example->add_option("--parity-mode", example_parity, "Modulus branch rule")
      ->transform(CLI::CheckedTransformer(kParity, CLI::ignore_case));

  // selftest
  mzf::SelfTestConfig selftest_cfg;
  auto* selftest = app.add_subcommand("selftest", "Quick property checks");
  selftest->add_option("--seed", selftest_cfg.seed, "Seed")->capture_default_str();
  selftest->add_option("--scale", selftest_cfg.scale, "Multiplier on instance counts")->capture_default_str();

  // Splice config-file arguments in front of the user's flags.
  std::vector<std::string> args(argv + 1, argv + argc);
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") {
      try {
        auto extra = config_args(args[i + 1]);
        args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
        const auto sub = args.begin() + 1;  // right after the subcommand name
        args.insert(sub, extra.begin(), extra.end());
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
      }
      break;
    }
  }
  std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector

  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*ber) {
      sim.snr_db = mzf::parse_snr_list(snr_text);
      sim.detectors.clear();
      for (const auto& d : split(detectors_text, ',')) sim.detectors.push_back(mzf::parse_detector(d));
      const auto result = mzf::run_experiment_detailed(sim);
      if (result.inexact_plans > 0)
        std::cerr << "note: " << result.inexact_plans << " plan(s) hit the sphere decoder budget\n";
      if (out_path.empty()) {
        if (format == mzf::OutputFormat::csv) std::cout << mzf::to_csv(result.records);
        else std::cout << mzf::to_json(result.records).dump(2) << '\n';
      } else {
        mzf::emit(result.records, format, out_path);
      }
      return 0;
    }
    if (*snrgain) {
      gain.modulations.clear();
      for (const auto& m : split(mods_text, ',')) gain.modulations.push_back(std::stoi(m));
      const auto samples = mzf::run_snrgain(gain);
      for (std::size_t i = 0; i < samples.size(); ++i) {
        const std::string path = prefix + "_M" + std::to_string(gain.modulations[i]) + ".csv";
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
        f << "trial,layer,gain_db\n";
        std::vector<double> g;
        for (const auto& s : samples[i]) {
          f << s.trial << ',' << (s.layer + 1) << ',' << mzf::format_number(s.gain_db) << '\n';
          g.push_back(s.gain_db);
        }
        std::printf("M=%d  samples=%zu  median_gain_db=%.4f  -> %s\n", gain.modulations[i], g.size(),
                    mzf::median(g), path.c_str());
      }
      return 0;
    }
    if (*example) {
      const auto rep = mzf::run_worked_example(example_parity);
      for (const auto& c : rep.checks)
        std::printf("%-4s %-36s expected %s  obtained %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                    c.expected.c_str(), c.obtained.c_str());
      for (const auto& n : rep.notes) std::printf("note: %s\n", n.c_str());
      return rep.passed() ? 0 : 1;
    }
    if (*selftest) {
      const auto results = mzf::run_selftest(selftest_cfg);
      bool ok = true;
      for (const auto& r : results) {
        std::printf("%-4s %s (%s)\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        ok = ok && r.passed;
      }
      return ok ? 0 : 1;
    }
  } catch (const mzf::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
