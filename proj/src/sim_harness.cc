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

#include "sensecrypt/sim_harness.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "sensecrypt/format.h"

namespace sensecrypt {
namespace {

constexpr double kBytesPerMegabyte = 1e6;

std::uint64_t DataSeed(std::uint64_t seed) {
  std::uint64_t x = seed + 0x5bd1e995ULL;
  x = (x ^ (x >> 33)) * 0xff51afd7ed558ccdULL;
  return x ^ (x >> 33);
}

}  // namespace

void TimingModel::Validate() const {
  if (!(enc_seconds_per_param_per_unit > 0.0) ||
      !(dec_seconds_per_param_per_unit > 0.0) ||
      !(train_seconds_per_sample_per_unit > 0.0) ||
      !(aggregate_seconds_per_ciphertext > 0.0) || !(server_compute_units > 0.0)) {
    throw std::invalid_argument("timing coefficients must be > 0");
  }
  if (ciphertext_bytes <= plaintext_bytes || plaintext_bytes == 0) {
    throw std::invalid_argument("ciphertext_bytes must exceed plaintext_bytes > 0");
  }
}

ClientTime EstimateClientTime(const ClientProfile& profile,
                              std::size_t mask_popcount, std::size_t model_size,
                              const TimingModel& tm, std::size_t samples) {
  if (!(profile.compute_units > 0.0) || !(profile.bandwidth_mbps > 0.0)) {
    throw std::invalid_argument("client capabilities must be > 0");
  }
  if (model_size == 0 || mask_popcount > model_size) {
    throw std::invalid_argument("invalid model size or popcount");
  }
  ClientTime t;
  t.train = static_cast<double>(samples) * tm.train_seconds_per_sample_per_unit /
            profile.compute_units;
  t.encrypt = static_cast<double>(mask_popcount) * tm.enc_seconds_per_param_per_unit /
              profile.compute_units;
  t.upload = static_cast<double>(tm.sizes().VectorBytes(mask_popcount, model_size)) /
             (profile.bandwidth_mbps * kBytesPerMegabyte);
  return t;
}

void ScenarioConfig::Validate() const {
  if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  if (static_cast<int>(profiles.size()) != partition.clients) {
    throw std::invalid_argument("profile count must equal partition.clients");
  }
  for (const auto& p : profiles) {
    if (!(p.compute_units > 0.0) || !(p.bandwidth_mbps > 0.0)) {
      throw std::invalid_argument("client capabilities must be > 0");
    }
  }
  if (data.csv_path.empty() &&
      (data.class_count <= 0 || data.per_class <= 0 || data.dim == 0)) {
    throw std::invalid_argument("data sizes must be positive");
  }
  if (!(data.test_fraction >= 0.0 && data.test_fraction < 1.0)) {
    throw std::invalid_argument("test_fraction must lie in [0, 1)");
  }
  for (const auto& s : compute_sweep) {
    if (s.size() != profiles.size()) {
      throw std::invalid_argument("compute sweep entries must list every client");
    }
  }
  timing.Validate();
  federation.security.Validate();
}

std::vector<ClientSetup> BuildClients(const ScenarioConfig& cfg) {
  const Dataset all =
      cfg.data.csv_path.empty()
          ? SynthBlobs(cfg.data.class_count, cfg.data.per_class, cfg.data.dim,
                       cfg.data.spread, DataSeed(cfg.seed), cfg.data.center_scale)
          : ReadCsvDataset(cfg.data.csv_path);
  PartitionSpec spec = cfg.partition;
  spec.seed = DataSeed(cfg.seed + 1);
  const auto parts = Partition(all, spec);
  std::mt19937_64 rng(DataSeed(cfg.seed + 2));
  std::vector<ClientSetup> out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    std::vector<std::size_t> order(parts[i].size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t test_n = static_cast<std::size_t>(
        std::floor(cfg.data.test_fraction * static_cast<double>(order.size())));
    test_n = std::min(test_n, order.size() - 1);
    std::vector<std::size_t> test(order.begin(), order.begin() + test_n);
    std::vector<std::size_t> train(order.begin() + test_n, order.end());
    std::sort(test.begin(), test.end());
    std::sort(train.begin(), train.end());
    ClientSetup c;
    c.profile = cfg.profiles[i];
    c.profile.client_id = static_cast<int>(i);
    c.train = parts[i].Subset(train);
    c.test = parts[i].Subset(test);
    c.profile.data_size = c.train.size();
    out.push_back(std::move(c));
  }
  return out;
}

Metrics ComputeMetrics(const ScenarioConfig& cfg, const Federation& fed,
                       const std::vector<RoundRecord>& records,
                       const std::vector<std::size_t>& global_unions,
                       const std::vector<std::vector<std::size_t>>& cluster_unions) {
  const TimingModel& tm = cfg.timing;
  const bool dual = cfg.federation.topology == TopologyMode::kDualServer;
  const auto& clients = fed.clients();
  Metrics m;
  m.scenario = cfg.name;
  m.method = ToString(cfg.method);
  m.param_count = fed.param_count();
  m.cluster_count = fed.cluster_count();
  for (std::size_t i = 0; i < clients.size(); ++i) {
    m.cluster_labels.push_back(fed.cluster_of(i));
    m.alphas.push_back(fed.alpha(i));
    m.client_compute_units.push_back(clients[i].profile.compute_units);
  }
  const double np = static_cast<double>(m.param_count);
  std::map<int, IterationSummary> summaries;
  std::map<int, std::pair<double, double>> round_extremes;
  std::map<int, std::pair<double, std::size_t>> ratio_sums;
  std::map<int, std::pair<double, std::size_t>> union_sums;
  std::map<int, std::pair<double, std::size_t>> acc_sums;
  for (const RoundRecord& rec : records) {
    IterationSummary& s = summaries[rec.iteration];
    s.iteration = rec.iteration;
    auto& ext = round_extremes.try_emplace(rec.iteration,
                                           std::numeric_limits<double>::infinity(),
                                           0.0).first->second;
    double slowest_round = 0.0, slowest_post = 0.0;
    for (const ClientRoundStats& st : rec.clients) {
      const ClientSetup& c = clients[st.client_id];
      const ClientTime t = EstimateClientTime(
          c.profile, st.popcount, rec.param_count, tm,
          c.train.size() * static_cast<std::size_t>(cfg.federation.train.epochs));
      ClientIterationRow row;
      row.iteration = rec.iteration;
      row.client_id = st.client_id;
      row.cluster_id = rec.cluster_id;
      row.alpha = st.alpha;
      row.cap = st.cap;
      row.popcount = st.popcount;
      row.status = ToString(st.status);
      row.fallback = st.fallback;
      row.coverage = st.coverage;
      row.mutual_information = st.mutual_information;
      row.train_s = t.train;
      row.encrypt_s = t.encrypt;
      row.upload_s = t.upload;
      row.round_s = t.total();
      row.download_s = static_cast<double>(st.download_bytes) /
                       (c.profile.bandwidth_mbps * kBytesPerMegabyte);
      row.decrypt_s = dual ? 0.0
                           : static_cast<double>(rec.union_popcount) *
                                 tm.dec_seconds_per_param_per_unit /
                                 c.profile.compute_units;
      row.upload_bytes = st.upload_bytes;
      row.download_bytes = st.download_bytes;
      row.accuracy = st.accuracy;
      if (st.fallback) ++m.infeasible_rounds;
      slowest_round = std::max(slowest_round, row.round_s);
      slowest_post = std::max(slowest_post, row.download_s + row.decrypt_s);
      ext.first = std::min(ext.first, row.round_s);
      ext.second = std::max(ext.second, row.round_s);
      s.upstream_bytes += row.upload_bytes;
      s.downstream_bytes += row.download_bytes;
      auto& rs = ratio_sums[rec.iteration];
      rs.first += static_cast<double>(row.popcount) / np;
      ++rs.second;
      auto& as = acc_sums[rec.iteration];
      as.first += row.accuracy;
      ++as.second;
      m.rows.push_back(std::move(row));
    }
    const double members = static_cast<double>(rec.clients.size());
    const double union_pop = static_cast<double>(rec.union_popcount);
    const double aggregate =
        union_pop * members * tm.aggregate_seconds_per_ciphertext / tm.server_compute_units;
    const double dkms_decrypt =
        dual ? union_pop * tm.dec_seconds_per_param_per_unit / tm.server_compute_units
             : 0.0;
    const double cluster_wall = slowest_round + aggregate + dkms_decrypt + slowest_post;
    s.wall_clock = std::max(s.wall_clock, cluster_wall);
    auto& us = union_sums[rec.iteration];
    us.first += union_pop / np;
    ++us.second;
  }
  std::size_t pos = 0;
  for (auto& [e, s] : summaries) {
    const auto& ext = round_extremes[e];
    s.spread = ext.first > 0.0 ? ext.second / ext.first : 1.0;
    s.mean_encryption_ratio = ratio_sums[e].first / static_cast<double>(ratio_sums[e].second);
    s.union_ratio = union_sums[e].first / static_cast<double>(union_sums[e].second);
    s.mean_accuracy = acc_sums[e].first / static_cast<double>(acc_sums[e].second);
    if (pos < global_unions.size()) {
      s.sensecrypt_global_union_ratio = static_cast<double>(global_unions[pos]) / np;
      double sum = 0.0;
      for (std::size_t u : cluster_unions[pos]) sum += static_cast<double>(u) / np;
      s.sensecrypt_cluster_union_ratio =
          cluster_unions[pos].empty() ? 0.0 : sum / static_cast<double>(cluster_unions[pos].size());
    }
    ++pos;
    m.total_wall_clock += s.wall_clock;
    m.iterations.push_back(s);
  }
  if (!m.iterations.empty()) m.final_accuracy = m.iterations.back().mean_accuracy;
  return m;
}

Metrics RunScenario(const ScenarioConfig& cfg) {
  cfg.Validate();
  FederationConfig fc = cfg.federation;
  fc.policy = cfg.method;
  fc.seed = cfg.seed;
  fc.sizes = cfg.timing.sizes();
  Federation fed(fc, BuildClients(cfg));
  fed.FormClusters();
  std::vector<RoundRecord> records;
  std::vector<std::size_t> global_unions;
  std::vector<std::vector<std::size_t>> cluster_unions;
  for (int e = 1; e <= cfg.iterations; ++e) {
    auto recs = fed.RunIteration(e);
    records.insert(records.end(), recs.begin(), recs.end());
    global_unions.push_back(fed.last_global_sensecrypt_union());
    cluster_unions.push_back(fed.last_cluster_sensecrypt_unions());
  }
  return ComputeMetrics(cfg, fed, records, global_unions, cluster_unions);
}

std::vector<Metrics> RunComputeSweep(const ScenarioConfig& cfg) {
  std::vector<Metrics> out;
  for (std::size_t r = 0; r < cfg.compute_sweep.size(); ++r) {
    ScenarioConfig c = cfg;
    for (std::size_t i = 0; i < c.profiles.size(); ++i) {
      c.profiles[i].compute_units = cfg.compute_sweep[r][i];
    }
    c.compute_sweep.clear();
    c.name = cfg.name + "_round" + std::to_string(r + 1);
    out.push_back(RunScenario(c));
  }
  return out;
}

double StragglerSpread(const Metrics& m) {
  std::map<int, std::pair<double, int>> per_client;
  for (const auto& r : m.rows) {
    auto& p = per_client[r.client_id];
    p.first += r.round_s;
    ++p.second;
  }
  if (per_client.size() < 2) {
    throw std::invalid_argument("straggler spread needs at least two clients");
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& [id, p] : per_client) {
    const double mean = p.first / p.second;
    lo = std::min(lo, mean);
    hi = std::max(hi, mean);
  }
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

std::string Metrics::ToCsv() const {
  std::ostringstream out;
  out << "iteration,client_id,cluster_id,alpha,cap,popcount,status,fallback,"
         "coverage,mutual_information,train_s,encrypt_s,upload_s,round_s,"
         "download_s,decrypt_s,upload_bytes,download_bytes,accuracy\n";
  for (const auto& r : rows) {
    out << r.iteration << ',' << r.client_id << ',' << r.cluster_id << ','
        << FormatNumber(r.alpha) << ',' << r.cap << ',' << r.popcount << ','
        << r.status << ',' << (r.fallback ? 1 : 0) << ',' << FormatNumber(r.coverage)
        << ',' << FormatNumber(r.mutual_information) << ',' << FormatNumber(r.train_s)
        << ',' << FormatNumber(r.encrypt_s) << ',' << FormatNumber(r.upload_s) << ','
        << FormatNumber(r.round_s) << ',' << FormatNumber(r.download_s) << ','
        << FormatNumber(r.decrypt_s) << ',' << r.upload_bytes << ','
        << r.download_bytes << ',' << FormatNumber(r.accuracy) << '\n';
  }
  return out.str();
}

std::string Metrics::ToJson() const {
  nlohmann::json j;
  j["scenario"] = scenario;
  j["method"] = method;
  j["param_count"] = param_count;
  j["cluster_count"] = cluster_count;
  j["cluster_labels"] = cluster_labels;
  j["alphas"] = alphas;
  j["infeasible_rounds"] = infeasible_rounds;
  j["total_wall_clock"] = total_wall_clock;
  j["final_accuracy"] = final_accuracy;
  j["straggler_spread"] = cluster_labels.size() >= 2 && !rows.empty()
                              ? nlohmann::json(StragglerSpread(*this))
                              : nlohmann::json(nullptr);
  nlohmann::json its = nlohmann::json::array();
  for (const auto& s : iterations) {
    its.push_back({{"iteration", s.iteration},
                   {"wall_clock", s.wall_clock},
                   {"spread", s.spread},
                   {"mean_accuracy", s.mean_accuracy},
                   {"upstream_bytes", s.upstream_bytes},
                   {"downstream_bytes", s.downstream_bytes},
                   {"mean_encryption_ratio", s.mean_encryption_ratio},
                   {"union_ratio", s.union_ratio},
                   {"sensecrypt_global_union_ratio", s.sensecrypt_global_union_ratio},
                   {"sensecrypt_cluster_union_ratio", s.sensecrypt_cluster_union_ratio}});
  }
  j["iterations"] = its;
  return j.dump(2);
}

DeskSnapshot TrainDeskSnapshot(const ScenarioConfig& cfg, std::size_t client) {
  cfg.Validate();
  const auto clients = BuildClients(cfg);
  if (client >= clients.size()) throw std::out_of_range("client index out of range");
  const Dataset& d = clients[client].train;
  const MLPModel init = MLPModel::Create(d.dim, cfg.federation.hidden, d.class_count,
                                         DataSeed(cfg.seed + 3));
  TrainOptions opts = cfg.federation.train;
  opts.epochs = std::max(1, cfg.federation.sensitivity_epochs);
  opts.seed = DataSeed(cfg.seed + 4);
  const LocalResult r = TrainLocal(init, d, opts);
  DeskSnapshot s;
  s.w = r.model.params.values;
  s.gamma = TaylorSensitivity(r.model.params, r.gradient).gamma;
  return s;
}

std::vector<SweepCell> SweepBC(const DeskSnapshot& snap, double alpha,
                               const std::vector<double>& b_values,
                               const std::vector<double>& c_values,
                               const SecurityParams& base,
                               const MIEstimatorConfig& mi) {
  std::vector<SweepCell> out;
  for (double b : b_values) {
    for (double c : c_values) {
      SecurityParams p = base;
      p.B = b;
      p.C = c;
      const MaskSolution s = SolveMask(snap.gamma, alpha, p, snap.w, mi);
      SweepCell cell;
      cell.B = b;
      cell.C = c;
      cell.feasible = s.feasible();
      cell.status = ToString(s.status);
      if (cell.feasible) {
        cell.encryption_ratio =
            static_cast<double>(s.mask.Popcount()) / static_cast<double>(snap.w.size());
        cell.mutual_information = s.mutual_information;
      }
      out.push_back(cell);
    }
  }
  return out;
}

std::vector<StrategyRow> StrategyStudy(const DeskSnapshot& snap,
                                       const std::vector<double>& ratios,
                                       std::uint64_t seed,
                                       const MIEstimatorConfig& mi) {
  std::vector<StrategyRow> out;
  for (Strategy st : {Strategy::kHigh, Strategy::kRandom, Strategy::kLow}) {
    for (double r : ratios) {
      const EncryptionMask m = StrategyMask(snap.gamma, r, st, seed);
      out.push_back({st, r, MaskMutualInformation(snap.w, m, mi)});
    }
  }
  return out;
}

std::string PlotData(const std::vector<Metrics>& runs) {
  nlohmann::json training = nlohmann::json::array();
  nlohmann::json comm = nlohmann::json::array();
  nlohmann::json accuracy = nlohmann::json::array();
  nlohmann::json round_time = nlohmann::json::array();
  for (const auto& m : runs) {
    std::size_t up = 0, down = 0;
    for (const auto& s : m.iterations) {
      training.push_back({{"scenario", m.scenario}, {"method", m.method},
                          {"iteration", s.iteration}, {"wall_clock", s.wall_clock}});
      accuracy.push_back({{"scenario", m.scenario}, {"method", m.method},
                          {"iteration", s.iteration}, {"mean_accuracy", s.mean_accuracy}});
      up += s.upstream_bytes;
      down += s.downstream_bytes;
    }
    comm.push_back({{"scenario", m.scenario}, {"method", m.method},
                    {"upstream_bytes", up}, {"downstream_bytes", down}});
    std::map<int, std::pair<double, int>> per_client;
    for (const auto& r : m.rows) {
      auto& p = per_client[r.client_id];
      p.first += r.round_s;
      ++p.second;
    }
    for (const auto& [id, p] : per_client) {
      round_time.push_back({{"scenario", m.scenario}, {"method", m.method},
                            {"client_id", id},
                            {"compute_units", m.client_compute_units[id]},
                            {"mean_round_s", p.first / p.second}});
    }
  }
  nlohmann::json j;
  j["training_time"] = training;
  j["communication"] = comm;
  j["accuracy"] = accuracy;
  j["client_round_time"] = round_time;
  return j.dump(2);
}

}  // namespace sensecrypt
