#include "fleetcbm/degradation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace fleetcbm {

Rng stream_rng(std::uint64_t master_seed, std::uint64_t scenario, std::uint64_t asset) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(scenario), static_cast<std::uint32_t>(scenario >> 32),
                    static_cast<std::uint32_t>(asset), static_cast<std::uint32_t>(asset >> 32)};
  return Rng(seq);
}

double increment_drift(const DegradationParams& params, double production,
                       const std::map<std::string, double>& interacting_levels) {
  if (production < 0.0) throw std::invalid_argument("production must be nonnegative");
  double drift = params.nominal_rate + params.oid_coeff * production;
  for (const auto& [peer, gamma] : params.mdi_coeffs) {
    auto it = interacting_levels.find(peer);
    if (it == interacting_levels.end()) throw std::invalid_argument("missing level for interacting asset '" + peer + "'");
    if (it->second < 0.0) throw std::invalid_argument("interacting level must be nonnegative");
    drift += gamma * it->second;
  }
  return drift;
}

double sample_increment(const DegradationParams& params, double production,
                        const std::map<std::string, double>& interacting_levels, Rng& rng) {
  double inc = increment_drift(params, production, interacting_levels);
  if (params.error_std > 0.0) inc += params.error_std * std::normal_distribution<double>(0.0, 1.0)(rng);
  return std::max(0.0, inc);
}

SignalPath simulate_path(const AssetSpec& asset, const DegradationParams& params,
                         const std::vector<double>& production_plan,
                         const std::map<std::string, SignalPath>& peer_paths, Rng& rng) {
  const int h = static_cast<int>(production_plan.size());
  SignalPath path;
  path.asset = asset.id;
  path.production = production_plan;
  path.levels.assign(std::size_t(h) + 1, asset.initial_level);
  for (const auto& [peer, gamma] : params.mdi_coeffs) {
    auto it = peer_paths.find(peer);
    if (it == peer_paths.end() || it->second.levels.size() < std::size_t(h)) {
      throw std::invalid_argument("peer path '" + peer + "' does not cover the horizon");
    }
    path.peer_levels[peer].resize(std::size_t(h));
  }
  if (asset.initial_level >= asset.failure_threshold) path.failure_time = 0;

  std::map<std::string, double> peers;
  for (int t = 1; t <= h; ++t) {
    const std::size_t ti = std::size_t(t);
    for (auto& [peer, series] : path.peer_levels) {
      const double lvl = peer_paths.at(peer).levels[ti - 1];
      series[ti - 1] = lvl;
      peers[peer] = lvl;
    }
    if (path.failure_time) {
      path.levels[ti] = path.levels[ti - 1];
      continue;
    }
    path.levels[ti] = path.levels[ti - 1] + sample_increment(params, production_plan[ti - 1], peers, rng);
    if (path.levels[ti] >= asset.failure_threshold) path.failure_time = t;
  }
  return path;
}

DegradationParams estimate_params(const SignalPath& history) {
  const int last = history.failure_time ? *history.failure_time : history.horizon();
  const int n = std::min(last, static_cast<int>(history.levels.size()) - 1);
  std::vector<std::string> names{"nominal_rate", "zeta"};
  std::vector<std::string> peers;
  for (const auto& [peer, series] : history.peer_levels) {
    peers.push_back(peer);
    names.push_back("gamma[" + peer + "]");
  }
  const int p = static_cast<int>(names.size());
  if (n < p + 2) {
    throw std::invalid_argument("need at least " + std::to_string(p + 2) + " increments, got " + std::to_string(n));
  }
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  for (int t = 1; t <= n; ++t) {
    const std::size_t ti = std::size_t(t);
    x(t - 1, 0) = 1.0;
    x(t - 1, 1) = history.production.at(ti - 1);
    for (std::size_t j = 0; j < peers.size(); ++j) x(t - 1, Eigen::Index(2 + j)) = history.peer_levels.at(peers[j]).at(ti - 1);
    y(t - 1) = history.levels[ti] - history.levels[ti - 1];
  }
  for (int c = 1; c <= p; ++c) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x.leftCols(c));
    qr.setThreshold(1e-10);
    if (qr.rank() < c) throw std::invalid_argument(names[std::size_t(c - 1)] + " unidentifiable");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  const Eigen::VectorXd beta = qr.solve(y);
  const Eigen::VectorXd resid = y - x * beta;

  DegradationParams out;
  out.nominal_rate = std::max(0.0, beta(0));
  out.oid_coeff = std::max(0.0, beta(1));
  for (std::size_t j = 0; j < peers.size(); ++j) out.mdi_coeffs[peers[j]] = std::max(0.0, beta(Eigen::Index(2 + j)));
  out.error_std = std::sqrt(resid.squaredNorm() / double(n - p));
  return out;
}

double EmpiricalRld::mean() const {
  if (samples.empty()) return 0.0;
  return std::accumulate(samples.begin(), samples.end(), 0.0) / double(samples.size());
}

EmpiricalRld remaining_life_distribution(const DegradationParams& params, double current_level, double threshold,
                                         const FixedControls& controls, std::size_t n_samples, Rng& rng,
                                         double observation_time, int max_periods) {
  if (!(current_level < threshold)) throw std::invalid_argument("current level must be below the threshold");
  if (n_samples == 0) throw std::invalid_argument("n_samples must be positive");
  const double mu = increment_drift(params, controls.production, controls.peer_levels);
  const double sigma = params.error_std;
  if (mu <= 0.0 && sigma == 0.0) throw std::invalid_argument("non-degrading process");

  EmpiricalRld out;
  out.observation_time = observation_time;
  out.samples.reserve(n_samples);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t s = 0; s < n_samples; ++s) {
    double x = current_level;
    int t = 0;
    while (true) {
      if (++t > max_periods) throw std::runtime_error("no threshold crossing within max_periods");
      const double next = x + mu + (sigma > 0.0 ? sigma * normal(rng) : 0.0);
      if (next >= threshold) break;
      if (sigma > 0.0) {
        const double p_cross = std::exp(-2.0 * (threshold - x) * (threshold - next) / (sigma * sigma));
        if (unif(rng) < p_cross) break;
      }
      x = next;
    }
    out.samples.push_back(double(t));
  }
  return out;
}

void write_paths_csv(std::ostream& out, const std::vector<SignalPath>& paths) {
  out << "asset,t,level,production,failed\n";
  for (const SignalPath& path : paths) {
    for (std::size_t t = 0; t < path.levels.size(); ++t) {
      const double prod = t == 0 || t > path.production.size() ? 0.0 : path.production[t - 1];
      const bool failed = path.failure_time && int(t) >= *path.failure_time;
      out << path.asset << ',' << t << ',' << path.levels[t] << ',' << prod << ',' << (failed ? 1 : 0) << '\n';
    }
  }
}

}  // namespace fleetcbm
