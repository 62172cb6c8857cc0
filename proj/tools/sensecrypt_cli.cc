/*
 * Copyright 2026 The SenseCrypt Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sensecrypt/byte_io.h"
#include "sensecrypt/clustering.h"
#include "sensecrypt/format.h"
#include "sensecrypt/mask_opt.h"
#include "sensecrypt/paillier.h"
#include "sensecrypt/scenario_config.h"
#include "sensecrypt/sim_harness.h"

#ifndef SENSECRYPT_PRESET_DIR
#define SENSECRYPT_PRESET_DIR "presets"
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sensecrypt;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr const char* kVersion = "1.0.0";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string ReadText(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

// A JSON list of numbers, or one number per line / comma separated.
std::vector<double> ReadNumbers(const std::string& path) {
  const std::string text = ReadText(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') {
    try {
      return json::parse(text).get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw UsageError(path + ": " + e.what());
    }
  }
  std::vector<double> out;
  std::string cell;
  std::stringstream ss(text);
  std::size_t line = 0;
  std::string row;
  while (std::getline(ss, row)) {
    ++line;
    std::stringstream rs(row);
    while (std::getline(rs, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t\r");
      if (b == std::string::npos) continue;
      const auto e = cell.find_last_not_of(" \t\r");
      const std::string tok = cell.substr(b, e - b + 1);
      double v = 0.0;
      const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (r.ec != std::errc() || r.ptr != tok.data() + tok.size()) {
        throw UsageError(path + ": line " + std::to_string(line) + ": not a number: " + tok);
      }
      out.push_back(v);
    }
  }
  return out;
}

EncryptionMask ToMask(const std::vector<double>& v) {
  EncryptionMask m(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] != 0.0 && v[k] != 1.0) throw UsageError("mask entries must be 0 or 1");
    m.bits[k] = v[k] != 0.0;
  }
  return m;
}

// "a:b:step" inclusive, or a comma list.
std::vector<double> ParseRange(const std::string& spec) {
  std::vector<double> out;
  auto num = [&](const std::string& t) {
    double v = 0.0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size()) {
      throw UsageError("bad number in range: " + t);
    }
    return v;
  };
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string t;
    while (std::getline(ss, t, ':')) parts.push_back(t);
    if (parts.size() != 3) throw UsageError("range must be start:stop:step");
    const double a = num(parts[0]), b = num(parts[1]), step = num(parts[2]);
    if (!(step > 0.0) || b < a) throw UsageError("invalid range " + spec);
    const int count = static_cast<int>(std::floor((b - a) / step + 1e-9)) + 1;
    // Grid points are snapped to 12 significant digits so that 0.1 + 6 * 0.1
    // prints as 0.7.
    for (int i = 0; i < count; ++i) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.12g", a + step * i);
      out.push_back(num(buf));
    }
    return out;
  }
  std::stringstream ss(spec);
  std::string t;
  while (std::getline(ss, t, ',')) out.push_back(num(t));
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::string PresetPath(const std::string& name) {
  const fs::path p = fs::path(SENSECRYPT_PRESET_DIR) / (name + ".json");
  if (!fs::exists(p)) throw UsageError("unknown preset: " + name);
  return p.string();
}

ScenarioConfig LoadConfigOrPreset(const std::string& config, const std::string& preset) {
  if (!config.empty() && !preset.empty()) {
    throw UsageError("give either a config path or --preset, not both");
  }
  if (config.empty() && preset.empty()) throw UsageError("a config path or --preset is required");
  return LoadScenarioConfig(config.empty() ? PresetPath(preset) : config);
}

struct RunArgs {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<int> iterations;
  std::string method;
  std::string out = "sensecrypt_out";
  bool plot = false;
  bool strict = false;
};

int CmdRun(const RunArgs& a) {
  ScenarioConfig cfg = LoadConfigOrPreset(a.config, a.preset);
  if (a.seed) cfg.seed = *a.seed;
  if (a.iterations) {
    if (*a.iterations < 0) throw ConfigError("iterations", "must be >= 0");
    cfg.iterations = *a.iterations;
  }
  if (!a.method.empty()) {
    try {
      cfg.method = ParseMaskPolicy(a.method);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("method", e.what());
    }
  }
  const fs::path out(a.out);
  fs::create_directories(out);
  std::vector<Metrics> runs;
  if (cfg.compute_sweep.empty()) {
    runs.push_back(RunScenario(cfg));
  } else {
    runs = RunComputeSweep(cfg);
  }
  json manifest;
  manifest["config_hash"] = ConfigHash(cfg);
  manifest["seed"] = cfg.seed;
  manifest["artifact_version"] = kVersion;
  manifest["config"] = json::parse(ScenarioConfigToJson(cfg));
  json outputs = json::array();
  json summary = json::array();
  std::size_t infeasible = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const std::string suffix = runs.size() == 1 ? "" : "_round" + std::to_string(r + 1);
    const fs::path csv = out / ("metrics" + suffix + ".csv");
    const fs::path js = out / ("summary" + suffix + ".json");
    WriteText(csv, runs[r].ToCsv());
    WriteText(js, runs[r].ToJson());
    outputs.push_back(csv.string());
    outputs.push_back(js.string());
    infeasible += runs[r].infeasible_rounds;
    summary.push_back({{"scenario", runs[r].scenario},
                       {"method", runs[r].method},
                       {"clusters", runs[r].cluster_count},
                       {"total_wall_clock", runs[r].total_wall_clock},
                       {"final_accuracy", runs[r].final_accuracy},
                       {"infeasible_rounds", runs[r].infeasible_rounds}});
  }
  if (a.plot) {
    const fs::path p = out / "plot_data.json";
    WriteText(p, PlotData(runs));
    outputs.push_back(p.string());
  }
  manifest["outputs"] = outputs;
  WriteText(out / "manifest.json", manifest.dump(2));
  std::cout << summary.dump(2) << "\n";
  if (a.strict && infeasible > 0) {
    std::cerr << "strict: " << infeasible << " client rounds fell back to the top-cap mask\n";
    return kExitInfeasible;
  }
  return kExitOk;
}

int CmdKeygen(unsigned bits, std::uint64_t seed, const std::string& out) {
  if (bits < kMinKeyBits) throw UsageError("--bits must be >= " + std::to_string(kMinKeyBits));
  const auto [pk, sk] = GenerateKeyPair(bits, seed);
  if (!out.empty()) {
    fs::create_directories(out);
    WriteFileBytes((fs::path(out) / "public.key").string(), pk.Serialize());
    WriteFileBytes((fs::path(out) / "private.key").string(), sk.Serialize());
  }
  json j{{"bits", pk.bit_length}, {"key_id", Hex64(pk.key_id)}};
  std::cout << j.dump() << "\n";
  return kExitOk;
}

PointSet ReadPoints(const std::string& path) {
  const std::string text = ReadText(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  PointSet pts;
  if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
    try {
      json j = json::parse(text);
      if (j.is_object()) j = j.at("points");
      pts = j.get<PointSet>();
    } catch (const json::exception& e) {
      throw UsageError(path + ": " + e.what());
    }
  } else {
    std::stringstream ss(text);
    std::string row;
    std::size_t line = 0;
    while (std::getline(ss, row)) {
      ++line;
      if (row.find_first_not_of(" \t\r") == std::string::npos) continue;
      std::vector<double> p;
      std::stringstream rs(row);
      std::string cell;
      while (std::getline(rs, cell, ',')) {
        double v = 0.0;
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        const std::string tok = b == std::string::npos ? "" : cell.substr(b, e - b + 1);
        const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (tok.empty() || r.ec != std::errc() || r.ptr != tok.data() + tok.size()) {
          throw UsageError(path + ": line " + std::to_string(line) + ": not a number");
        }
        p.push_back(v);
      }
      pts.push_back(std::move(p));
    }
  }
  if (pts.empty()) throw UsageError(path + ": no points");
  for (const auto& p : pts) {
    if (p.size() != pts[0].size()) throw UsageError(path + ": ragged point rows");
  }
  return pts;
}

int CmdCluster(const std::string& input, std::optional<double> epsilon, double clip,
               std::uint64_t seed) {
  PointSet pts = ReadPoints(input);
  if (epsilon) {
    if (!(*epsilon > 0.0)) throw UsageError("--epsilon must be > 0");
    const DPParams dp = DPParams::Calibrated(*epsilon, clip);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      pts[i] = DpPerturb(SensitivityVector{pts[i]}, dp, seed + i).gamma;
    }
  }
  const ClusterAssignment a = AffinityPropagation(SimilarityMatrix::FromPoints(pts));
  std::cout << a.ToJson("affinity_propagation", epsilon) << "\n";
  return kExitOk;
}

int CmdSolveMask(const std::string& gamma_path, const std::string& weights_path,
                 double alpha, const SecurityParams& p, int bins) {
  const auto gamma = ReadNumbers(gamma_path);
  const auto w = weights_path.empty() ? gamma : ReadNumbers(weights_path);
  MIEstimatorConfig mi;
  mi.bin_count = bins;
  const MaskSolution s = SolveMask(gamma, alpha, p, w, mi);
  json j{{"status", ToString(s.status)},
         {"feasible", s.feasible()},
         {"popcount", s.mask.Popcount()},
         {"cap", s.cap},
         {"threshold", s.threshold},
         {"objective", s.objective},
         {"coverage", s.coverage},
         {"mutual_information", s.mutual_information},
         {"mask", s.mask.Indices()}};
  std::cout << j.dump() << "\n";
  return s.feasible() ? kExitOk : kExitInfeasible;
}

int CmdMi(const std::string& weights_path, const std::string& mask_path, int bins) {
  const auto w = ReadNumbers(weights_path);
  const auto m = ToMask(ReadNumbers(mask_path));
  if (m.size() != w.size()) throw UsageError("mask and weights differ in length");
  MIEstimatorConfig mi;
  mi.bin_count = bins;
  std::cout << FormatNumber(MaskMutualInformation(w, m, mi)) << "\n";
  return kExitOk;
}

int CmdSweepBc(const std::string& config, const std::string& preset,
               const std::string& b_range, const std::string& c_range, double alpha,
               double eta, const std::string& out) {
  const ScenarioConfig cfg =
      LoadConfigOrPreset(config, preset.empty() && config.empty() ? "stat_het" : preset);
  SecurityParams base = cfg.federation.security;
  base.eta_mi = eta;
  const auto cells = SweepBC(TrainDeskSnapshot(cfg), alpha, ParseRange(b_range),
                             ParseRange(c_range), base, cfg.federation.mi);
  std::ostringstream csv;
  csv << "B,C,encryption_ratio,MI,feasible\n";
  for (const auto& c : cells) {
    csv << FormatNumber(c.B) << ',' << FormatNumber(c.C) << ','
        << FormatNumber(c.encryption_ratio) << ',' << FormatNumber(c.mutual_information)
        << ',' << (c.feasible ? 1 : 0) << '\n';
  }
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    WriteText(out, csv.str());
  }
  return kExitOk;
}

int CmdStrategies(const std::string& config, const std::string& preset,
                  const std::string& ratios, std::uint64_t seed, const std::string& out) {
  const ScenarioConfig cfg =
      LoadConfigOrPreset(config, preset.empty() && config.empty() ? "stat_het" : preset);
  const auto rs = ParseRange(ratios);
  for (double r : rs) {
    if (!(r >= 0.0 && r <= 1.0)) throw UsageError("ratios must lie in [0, 1]");
  }
  const auto rows = StrategyStudy(TrainDeskSnapshot(cfg), rs, seed, cfg.federation.mi);
  std::ostringstream csv;
  csv << "strategy,ratio,MI\n";
  for (const auto& r : rows) {
    csv << ToString(r.strategy) << ',' << FormatNumber(r.ratio) << ','
        << FormatNumber(r.mutual_information) << '\n';
  }
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    WriteText(out, csv.str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  std::locale::global(std::locale::classic());
  CLI::App app{"Selective homomorphic encryption for federated learning"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  RunArgs run;
  std::uint64_t run_seed = 0;
  int run_iterations = 0;
  auto* run_cmd = app.add_subcommand("run", "execute a scenario");
  run_cmd->add_option("config", run.config, "scenario JSON");
  run_cmd->add_option("--preset", run.preset, "shipped preset name");
  auto* seed_opt = run_cmd->add_option("--seed", run_seed, "override the seed");
  auto* it_opt = run_cmd->add_option("--iterations", run_iterations, "override iterations");
  run_cmd->add_option("--method", run.method,
                      "override method (sensecrypt|uniform_mask|full_he|plaintext)");
  run_cmd->add_option("--out", run.out, "output directory");
  run_cmd->add_flag("--emit-plot-data", run.plot, "write plot_data.json");
  run_cmd->add_flag("--strict", run.strict, "exit 3 when any solve is infeasible");

  unsigned bits = 2048;
  std::uint64_t key_seed = 1;
  std::string key_out;
  auto* keygen = app.add_subcommand("keygen", "generate a Paillier key pair");
  keygen->add_option("--bits", bits, "modulus bits");
  keygen->add_option("--seed", key_seed, "seed");
  keygen->add_option("--out", key_out, "directory for public.key and private.key");

  std::string cluster_input;
  double epsilon = 0.0, clip = 1.0;
  std::uint64_t cluster_seed = 0;
  auto* cluster = app.add_subcommand("cluster", "affinity propagation over vectors");
  cluster->add_option("--input", cluster_input, "JSON points or CSV rows")->required();
  auto* eps_opt = cluster->add_option("--epsilon", epsilon, "DP epsilon (omit for none)");
  cluster->add_option("--clip", clip, "DP clip norm");
  cluster->add_option("--seed", cluster_seed, "DP noise seed");

  std::string gamma_path, weights_path;
  double alpha = 1.0;
  SecurityParams sp;
  int bins = 64;
  auto* solve = app.add_subcommand("solve-mask", "solve one mask problem");
  solve->add_option("--gamma", gamma_path, "sensitivities")->required();
  solve->add_option("--weights", weights_path, "parameters for the MI constraint");
  solve->add_option("--alpha", alpha, "encryption budget")->required();
  solve->add_option("--B", sp.B, "B");
  solve->add_option("--C", sp.C, "C");
  solve->add_option("--eta-mi", sp.eta_mi, "MI threshold in bits");
  solve->add_option("--beta1", sp.beta1, "count weight");
  solve->add_option("--beta2", sp.beta2, "coverage weight");
  solve->add_option("--bins", bins, "MI histogram bins");

  std::string mi_weights, mi_mask;
  int mi_bins = 64;
  auto* mi = app.add_subcommand("mi", "mutual information of a mask");
  mi->add_option("--weights", mi_weights, "parameters")->required();
  mi->add_option("--mask", mi_mask, "0/1 mask")->required();
  mi->add_option("--bins", mi_bins, "histogram bins");

  std::string sweep_config, sweep_preset, b_range = "0.5:2.5:0.25",
                                          c_range = "0.1:0.9:0.1", sweep_out;
  double sweep_alpha = 0.1, sweep_eta = 2.0;
  auto* sweep = app.add_subcommand("sweep-bc", "feasibility grid over (B, C)");
  sweep->add_option("config", sweep_config, "scenario providing the desk model");
  sweep->add_option("--preset", sweep_preset, "preset providing the desk model");
  sweep->add_option("--B-range", b_range, "start:stop:step or list");
  sweep->add_option("--C-range", c_range, "start:stop:step or list");
  sweep->add_option("--alpha", sweep_alpha, "encryption budget");
  sweep->add_option("--eta-mi", sweep_eta, "MI threshold");
  sweep->add_option("--out", sweep_out, "CSV path (stdout if omitted)");

  std::string strat_config, strat_preset, ratios = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1",
                                          strat_out;
  std::uint64_t strat_seed = 0;
  auto* strat = app.add_subcommand("strategies", "MI under high/random/low strategies");
  strat->add_option("config", strat_config, "scenario providing the desk model");
  strat->add_option("--preset", strat_preset, "preset providing the desk model");
  strat->add_option("--ratios", ratios, "ratios list or start:stop:step");
  strat->add_option("--seed", strat_seed, "seed for the random strategy");
  strat->add_option("--out", strat_out, "CSV path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) {
      if (*seed_opt) run.seed = run_seed;
      if (*it_opt) run.iterations = run_iterations;
      return CmdRun(run);
    }
    if (*keygen) return CmdKeygen(bits, key_seed, key_out);
    if (*cluster) {
      return CmdCluster(cluster_input,
                        *eps_opt ? std::optional<double>(epsilon) : std::nullopt, clip,
                        cluster_seed);
    }
    if (*solve) return CmdSolveMask(gamma_path, weights_path, alpha, sp, bins);
    if (*mi) return CmdMi(mi_weights, mi_mask, mi_bins);
    if (*sweep) {
      return CmdSweepBc(sweep_config, sweep_preset, b_range, c_range, sweep_alpha,
                        sweep_eta, sweep_out);
    }
    if (*strat) return CmdStrategies(strat_config, strat_preset, ratios, strat_seed, strat_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
