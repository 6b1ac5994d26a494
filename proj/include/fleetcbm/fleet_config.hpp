// Problem-instance data model for fleet-level condition-based O&M planning.
//
// A FleetSpec is the single source of every model parameter: asset
// degradation data, the interaction graph, costs, demand, and the nested
// uncertainty description used by the robust model. Time-indexed values are
// stored fully expanded (one entry per period t = 1..H, at index t-1).

#ifndef FLEETCBM_FLEET_CONFIG_HPP_
#define FLEETCBM_FLEET_CONFIG_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fleetcbm {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AssetSpec {
  std::string id;
  double failure_threshold = 0.0;      // Lambda_i
  double initial_level = 0.0;          // l_{i,0}
  double production_capacity = 0.0;    // K_i, units per period
  std::vector<double> production_cost; // G_{i,t}
  double error_std = 0.0;              // sigma_i, amplitude / sqrt(period)

  bool operator==(const AssetSpec&) const = default;
};

// Directed degradation interaction: the level of `source` raises the
// degradation rate of `target` by gamma per unit amplitude.
struct InteractionEdge {
  std::string source;
  std::string target;
  std::vector<double> gamma_nominal;    // gamma-bar_{j,i,t}
  std::vector<double> gamma_halfwidth;  // gamma-hat_{j,i,t}

  bool operator==(const InteractionEdge&) const = default;
};

// Per-asset nominal values, half-widths and cumulative budgets. d_bar is the
// nominal degradation rate D_i of the asset.
struct AssetUncertainty {
  std::vector<double> d_bar;
  std::vector<double> d_hat;
  std::vector<double> zeta_bar;
  std::vector<double> zeta_hat;
  std::vector<double> budget;  // Delta_{i,t}, nondecreasing in t

  bool operator==(const AssetUncertainty&) const = default;
};

struct UncertaintySpec {
  std::vector<AssetUncertainty> assets;  // parallel to FleetSpec::assets

  bool operator==(const UncertaintySpec&) const = default;
};

struct FleetSpec {
  std::vector<AssetSpec> assets;
  std::vector<InteractionEdge> edges;
  int horizon = 0;        // H
  int max_cycles = 1;     // |K|
  std::vector<double> demand;  // S_t
  int crew_capacity = 1;  // Q
  double pm_cost = 0.0;        // C^p
  double cm_cost = 0.0;        // C^c
  double unmet_penalty = 0.0;  // C^u
  int pm_duration = 1;         // Y^p
  int cm_duration = 1;         // Y^c
  UncertaintySpec uncertainty;

  bool operator==(const FleetSpec&) const = default;

  std::size_t num_assets() const { return assets.size(); }
  // Index of the asset with the given id, if declared.
  std::optional<std::size_t> asset_index(std::string_view id) const;
  // Indices into `edges` of every edge whose target is asset i (the set A_i),
  // in declaration order.
  std::vector<std::size_t> edges_into(std::size_t i) const;
  std::size_t edge_source(std::size_t edge) const;
  std::size_t edge_target(std::size_t edge) const;
};

struct Violation {
  std::string field;
  std::string rule;
  std::string value;

  bool operator==(const Violation&) const = default;
  auto operator<=>(const Violation&) const = default;
};

// Parses the JSON config document described in docs/config_schema.md.
// Throws ConfigError on syntax errors (with line/column), missing or unknown
// fields, malformed time series, and references to undeclared asset ids.
FleetSpec parse_fleet_config(std::string_view text);
FleetSpec load_fleet_config(const std::string& path);

// Canonical document for `spec`; parse_fleet_config inverts it exactly.
std::string serialize_fleet_config(const FleetSpec& spec);

// Every broken invariant, sorted. Field names use asset ids rather than
// positions, so the result does not depend on declaration order.
std::vector<Violation> validate(const FleetSpec& spec);

// Delta_{i,t} = delta * t for every asset.
FleetSpec with_budget_per_period(FleetSpec spec, double delta);

}  // namespace fleetcbm

#endif  // FLEETCBM_FLEET_CONFIG_HPP_
