// Discrete-time degradation signals with operation-induced (OID) and
// mutual (MDI) coupling, least-squares parameter estimation and sampled
// remaining-life distributions.

#ifndef FLEETCBM_DEGRADATION_HPP_
#define FLEETCBM_DEGRADATION_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fleetcbm/fleet_config.hpp"

namespace fleetcbm {

using Rng = std::mt19937_64;

// One independent stream per (scenario, asset) under a master seed.
Rng stream_rng(std::uint64_t master_seed, std::uint64_t scenario, std::uint64_t asset);

struct DegradationParams {
  double nominal_rate = 0.0;  // D_i per period
  double error_std = 0.0;     // sigma_i
  double oid_coeff = 0.0;     // zeta_i per production unit
  std::map<std::string, double> mdi_coeffs;  // peer id -> gamma_{j,i}
};

// Drift of one period: D + zeta * production + sum_j gamma_j * level_j.
double increment_drift(const DegradationParams& params, double production,
                       const std::map<std::string, double>& interacting_levels);

// Drift plus Normal(0, sigma^2) noise, floored at 0. Every peer in
// params.mdi_coeffs must appear in interacting_levels.
double sample_increment(const DegradationParams& params, double production,
                        const std::map<std::string, double>& interacting_levels, Rng& rng);

struct SignalPath {
  std::string asset;
  std::vector<double> levels;  // t = 0..H
  std::optional<int> failure_time;
  std::vector<double> production;                           // [t-1]
  std::map<std::string, std::vector<double>> peer_levels;   // peer id -> [t-1], level used in period t

  int horizon() const { return static_cast<int>(production.size()); }
};

// Period t uses the peers' levels at t-1. The level is frozen once it reaches
// the failure threshold.
SignalPath simulate_path(const AssetSpec& asset, const DegradationParams& params,
                         const std::vector<double>& production_plan,
                         const std::map<std::string, SignalPath>& peer_paths, Rng& rng);

// Least-squares fit of increments against [1, production, peer levels...].
// Uses increments up to the failure time. Throws std::invalid_argument naming
// the first coefficient that cannot be identified ("zeta unidentifiable",
// "gamma[<peer>] unidentifiable", ...) or when there are too few increments.
DegradationParams estimate_params(const SignalPath& history);

struct FixedControls {
  double production = 0.0;
  std::map<std::string, double> peer_levels;
};

struct EmpiricalRld {
  std::vector<double> samples;  // periods until the threshold is first reached
  double observation_time = 0.0;

  double mean() const;
};

// First-passage times from current_level under constant controls. Increments
// are untruncated Gaussian; a crossing between period ends is detected with
// the Brownian-bridge probability so the samples follow the continuous
// first-passage law, rounded up to whole periods.
EmpiricalRld remaining_life_distribution(const DegradationParams& params, double current_level, double threshold,
                                         const FixedControls& controls, std::size_t n_samples, Rng& rng,
                                         double observation_time = 0.0, int max_periods = 1'000'000);

// Columns asset,t,level,production,failed; t runs 0..H.
void write_paths_csv(std::ostream& out, const std::vector<SignalPath>& paths);

}  // namespace fleetcbm

#endif  // FLEETCBM_DEGRADATION_HPP_
