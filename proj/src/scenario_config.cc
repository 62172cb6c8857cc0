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

#include "sensecrypt/scenario_config.h"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sensecrypt/format.h"

namespace sensecrypt {
namespace {

using nlohmann::json;

std::string LineColumn(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(Where(), "expected an object");
  }

  template <typename T>
  void Get(const char* key, T& out) const {
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(Where(key), "expected a boolean");
      } else if constexpr (std::is_arithmetic_v<T>) {
        if (!v.is_number()) throw ConfigError(Where(key), "expected a number");
        if constexpr (std::is_integral_v<T>) {
          if (!v.is_number_integer()) throw ConfigError(Where(key), "expected an integer");
          if constexpr (std::is_unsigned_v<T>) {
            if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
              throw ConfigError(Where(key), "expected a non-negative integer");
            }
          }
        }
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError(Where(key), "expected a string");
      }
      out = v.get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(Where(key), e.what());
    }
  }

  bool Has(const char* key) const { return j_.contains(key); }
  const json& At(const char* key) const { return j_.at(key); }
  Reader Sub(const char* key) const { return Reader(j_.at(key), Where(key)); }
  std::string Where(const std::string& key = "") const {
    if (key.empty()) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  void RejectUnknown(const std::set<std::string>& known) const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!known.count(it.key())) throw ConfigError(Where(it.key()), "unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
};

// Scalar broadcast to every client, or an explicit per-client list.
std::vector<double> PerClient(const Reader& r, const char* key, int count,
                              double fallback) {
  if (!r.Has(key)) return std::vector<double>(count, fallback);
  const json& v = r.At(key);
  if (v.is_number()) return std::vector<double>(count, v.get<double>());
  if (!v.is_array()) throw ConfigError(r.Where(key), "expected a number or a list");
  if (static_cast<int>(v.size()) != count) {
    throw ConfigError(r.Where(key), "expected " + std::to_string(count) + " entries");
  }
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(r.Where(key), "list entries must be numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

template <typename F>
void Checked(const std::string& where, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where, e.what());
  }
}

}  // namespace

ScenarioConfig ParseScenarioConfig(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(LineColumn(text, e.byte > 0 ? e.byte - 1 : 0), "syntax error");
  }
  const Reader r(root, "");
  r.RejectUnknown({"name", "seed", "iterations", "method", "topology", "data",
                   "partition", "clients", "he", "solver", "training", "clustering",
                   "timing", "sweep"});
  ScenarioConfig cfg;
  r.Get("name", cfg.name);
  r.Get("seed", cfg.seed);
  r.Get("iterations", cfg.iterations);
  if (r.Has("method")) {
    std::string m;
    r.Get("method", m);
    Checked(r.Where("method"), [&] { cfg.method = ParseMaskPolicy(m); });
  }
  if (r.Has("topology")) {
    std::string t;
    r.Get("topology", t);
    Checked(r.Where("topology"), [&] { cfg.federation.topology = ParseTopology(t); });
  }
  if (r.Has("data")) {
    const Reader d = r.Sub("data");
    d.RejectUnknown({"class_count", "per_class", "dim", "spread", "center_scale",
                     "test_fraction", "csv"});
    d.Get("class_count", cfg.data.class_count);
    d.Get("per_class", cfg.data.per_class);
    d.Get("dim", cfg.data.dim);
    d.Get("spread", cfg.data.spread);
    d.Get("center_scale", cfg.data.center_scale);
    d.Get("test_fraction", cfg.data.test_fraction);
    d.Get("csv", cfg.data.csv_path);
  }
  if (r.Has("partition")) {
    const Reader p = r.Sub("partition");
    p.RejectUnknown({"mode", "classes_per_client", "one_per_remaining_class"});
    if (p.Has("mode")) {
      std::string mode;
      p.Get("mode", mode);
      Checked(p.Where("mode"), [&] { cfg.partition.mode = ParsePartitionMode(mode); });
    }
    p.Get("classes_per_client", cfg.partition.classes_per_client);
    p.Get("one_per_remaining_class", cfg.partition.one_per_remaining_class);
  }
  if (!r.Has("clients")) throw ConfigError("clients", "required section missing");
  {
    const Reader c = r.Sub("clients");
    c.RejectUnknown({"count", "bandwidth_mbps", "compute_units"});
    int count = 0;
    c.Get("count", count);
    if (count <= 0) throw ConfigError(c.Where("count"), "must be a positive integer");
    cfg.partition.clients = count;
    const auto bw = PerClient(c, "bandwidth_mbps", count, 50.0);
    const auto cu = PerClient(c, "compute_units", count, 32.0);
    for (int i = 0; i < count; ++i) {
      ClientProfile p;
      p.client_id = i;
      p.bandwidth_mbps = bw[i];
      p.compute_units = cu[i];
      if (!(p.bandwidth_mbps > 0.0)) throw ConfigError(c.Where("bandwidth_mbps"), "must be > 0");
      if (!(p.compute_units > 0.0)) throw ConfigError(c.Where("compute_units"), "must be > 0");
      cfg.profiles.push_back(p);
    }
  }
  FederationConfig& f = cfg.federation;
  if (r.Has("he")) {
    const Reader h = r.Sub("he");
    h.RejectUnknown({"key_bits", "scale_bits", "max_magnitude", "server_weighting",
                     "weight_bits"});
    h.Get("key_bits", f.key_bits);
    h.Get("scale_bits", f.scale_bits);
    h.Get("max_magnitude", f.max_magnitude);
    h.Get("server_weighting", f.server_weighting);
    h.Get("weight_bits", f.weight_bits);
    if (f.key_bits < kMinKeyBits) {
      throw ConfigError(h.Where("key_bits"), "must be >= " + std::to_string(kMinKeyBits));
    }
  }
  if (r.Has("solver")) {
    const Reader s = r.Sub("solver");
    s.RejectUnknown({"B", "C", "eta_mi", "beta1", "beta2", "mi_bins", "node_limit"});
    s.Get("B", f.security.B);
    s.Get("C", f.security.C);
    s.Get("eta_mi", f.security.eta_mi);
    s.Get("beta1", f.security.beta1);
    s.Get("beta2", f.security.beta2);
    s.Get("mi_bins", f.mi.bin_count);
    s.Get("node_limit", f.solve.node_limit);
    Checked(s.Where(), [&] { f.security.Validate(); });
  }
  if (r.Has("training")) {
    const Reader t = r.Sub("training");
    t.RejectUnknown({"epochs", "lr", "batch_size", "sensitivity_epochs", "hidden",
                     "gradient"});
    t.Get("epochs", f.train.epochs);
    t.Get("lr", f.train.lr);
    t.Get("batch_size", f.train.batch_size);
    t.Get("sensitivity_epochs", f.sensitivity_epochs);
    t.Get("hidden", f.hidden);
    if (t.Has("gradient")) {
      std::string g;
      t.Get("gradient", g);
      if (g == "full_data") {
        f.train.gradient = GradientSource::kFullData;
      } else if (g == "last_batch") {
        f.train.gradient = GradientSource::kLastBatch;
      } else {
        throw ConfigError(t.Where("gradient"), "expected full_data or last_batch");
      }
    }
    if (f.train.epochs < 1) throw ConfigError(t.Where("epochs"), "must be >= 1");
    if (f.train.batch_size == 0) throw ConfigError(t.Where("batch_size"), "must be >= 1");
    if (f.hidden == 0) throw ConfigError(t.Where("hidden"), "must be >= 1");
  }
  if (r.Has("clustering")) {
    const Reader c = r.Sub("clustering");
    c.RejectUnknown({"enabled", "dp_epsilon", "dp_delta", "dp_clip", "damping",
                     "max_iter", "convergence_window"});
    c.Get("enabled", f.cluster_clients);
    if (c.Has("dp_epsilon") && !c.At("dp_epsilon").is_null()) {
      double eps = 0.0;
      c.Get("dp_epsilon", eps);
      if (!(eps > 0.0)) throw ConfigError(c.Where("dp_epsilon"), "must be > 0");
      f.dp_epsilon = eps;
    }
    c.Get("dp_delta", f.dp_delta);
    c.Get("dp_clip", f.dp_clip);
    c.Get("damping", f.affinity.damping);
    c.Get("max_iter", f.affinity.max_iter);
    c.Get("convergence_window", f.affinity.convergence_window);
  }
  if (r.Has("timing")) {
    const Reader t = r.Sub("timing");
    t.RejectUnknown({"enc_seconds_per_param_per_unit", "dec_seconds_per_param_per_unit",
                     "train_seconds_per_sample_per_unit",
                     "aggregate_seconds_per_ciphertext", "server_compute_units",
                     "ciphertext_bytes", "plaintext_bytes"});
    TimingModel& tm = cfg.timing;
    t.Get("enc_seconds_per_param_per_unit", tm.enc_seconds_per_param_per_unit);
    t.Get("dec_seconds_per_param_per_unit", tm.dec_seconds_per_param_per_unit);
    t.Get("train_seconds_per_sample_per_unit", tm.train_seconds_per_sample_per_unit);
    t.Get("aggregate_seconds_per_ciphertext", tm.aggregate_seconds_per_ciphertext);
    t.Get("server_compute_units", tm.server_compute_units);
    t.Get("ciphertext_bytes", tm.ciphertext_bytes);
    t.Get("plaintext_bytes", tm.plaintext_bytes);
    Checked(t.Where(), [&] { tm.Validate(); });
  }
  if (r.Has("sweep")) {
    const Reader s = r.Sub("sweep");
    s.RejectUnknown({"compute_units"});
    if (s.Has("compute_units")) {
      const json& lists = s.At("compute_units");
      if (!lists.is_array()) throw ConfigError(s.Where("compute_units"), "expected a list");
      for (std::size_t i = 0; i < lists.size(); ++i) {
        const std::string where = s.Where("compute_units") + "[" + std::to_string(i) + "]";
        if (!lists[i].is_array() ||
            lists[i].size() != static_cast<std::size_t>(cfg.partition.clients)) {
          throw ConfigError(where, "expected one entry per client");
        }
        std::vector<double> row;
        for (const auto& x : lists[i]) {
          if (!x.is_number() || !(x.get<double>() > 0.0)) {
            throw ConfigError(where, "entries must be positive numbers");
          }
          row.push_back(x.get<double>());
        }
        cfg.compute_sweep.push_back(std::move(row));
      }
    }
  }
  if (cfg.iterations < 0) throw ConfigError("iterations", "must be >= 0");
  Checked("partition", [&] { cfg.partition.Validate(cfg.data.class_count); });
  Checked("<root>", [&] { cfg.Validate(); });
  return cfg;
}

ScenarioConfig LoadScenarioConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseScenarioConfig(ss.str());
}

std::string ScenarioConfigToJson(const ScenarioConfig& cfg) {
  const FederationConfig& f = cfg.federation;
  json j;
  j["name"] = cfg.name;
  j["seed"] = cfg.seed;
  j["iterations"] = cfg.iterations;
  j["method"] = ToString(cfg.method);
  j["topology"] = ToString(f.topology);
  j["data"] = {{"class_count", cfg.data.class_count},
               {"per_class", cfg.data.per_class},
               {"dim", cfg.data.dim},
               {"spread", cfg.data.spread},
               {"center_scale", cfg.data.center_scale},
               {"test_fraction", cfg.data.test_fraction},
               {"csv", cfg.data.csv_path}};
  j["partition"] = {{"mode", ToString(cfg.partition.mode)},
                    {"classes_per_client", cfg.partition.classes_per_client},
                    {"one_per_remaining_class", cfg.partition.one_per_remaining_class}};
  std::vector<double> bw, cu;
  for (const auto& p : cfg.profiles) {
    bw.push_back(p.bandwidth_mbps);
    cu.push_back(p.compute_units);
  }
  j["clients"] = {{"count", cfg.profiles.size()}, {"bandwidth_mbps", bw},
                  {"compute_units", cu}};
  j["he"] = {{"key_bits", f.key_bits},
             {"scale_bits", f.scale_bits},
             {"max_magnitude", f.max_magnitude},
             {"server_weighting", f.server_weighting},
             {"weight_bits", f.weight_bits}};
  j["solver"] = {{"B", f.security.B},         {"C", f.security.C},
                 {"eta_mi", f.security.eta_mi}, {"beta1", f.security.beta1},
                 {"beta2", f.security.beta2}, {"mi_bins", f.mi.bin_count},
                 {"node_limit", f.solve.node_limit}};
  j["training"] = {{"epochs", f.train.epochs},
                   {"lr", f.train.lr},
                   {"batch_size", f.train.batch_size},
                   {"sensitivity_epochs", f.sensitivity_epochs},
                   {"hidden", f.hidden},
                   {"gradient", f.train.gradient == GradientSource::kFullData
                                    ? "full_data"
                                    : "last_batch"}};
  j["clustering"] = {{"enabled", f.cluster_clients},
                     {"dp_epsilon", f.dp_epsilon ? json(*f.dp_epsilon) : json(nullptr)},
                     {"dp_delta", f.dp_delta},
                     {"dp_clip", f.dp_clip},
                     {"damping", f.affinity.damping},
                     {"max_iter", f.affinity.max_iter},
                     {"convergence_window", f.affinity.convergence_window}};
  const TimingModel& tm = cfg.timing;
  j["timing"] = {{"enc_seconds_per_param_per_unit", tm.enc_seconds_per_param_per_unit},
                 {"dec_seconds_per_param_per_unit", tm.dec_seconds_per_param_per_unit},
                 {"train_seconds_per_sample_per_unit", tm.train_seconds_per_sample_per_unit},
                 {"aggregate_seconds_per_ciphertext", tm.aggregate_seconds_per_ciphertext},
                 {"server_compute_units", tm.server_compute_units},
                 {"ciphertext_bytes", tm.ciphertext_bytes},
                 {"plaintext_bytes", tm.plaintext_bytes}};
  if (!cfg.compute_sweep.empty()) j["sweep"] = {{"compute_units", cfg.compute_sweep}};
  return j.dump(2);
}

std::string ConfigHash(const ScenarioConfig& cfg) {
  return Hex64(Fnv1a64(ScenarioConfigToJson(cfg)));
}

}  // namespace sensecrypt
