// Deterministic O&M MILPs: the single-maintenance model and the
// multi-cycle model, each under one of four policy views.
//
// Index conventions for the catalogue accessors: assets i, edges e and
// cycles k are 0-based positions; periods t run 1..H. Names and tags in the
// model use 1-based i and k, e.g. "mp[i=2,t=7]" or "deg-cum[i=1,t=3,k=2]".

#ifndef FLEETCBM_MODEL_BUILDER_HPP_
#define FLEETCBM_MODEL_BUILDER_HPP_

#include <cstddef>
#include <limits>
#include <string_view>
#include <utility>
#include <vector>

#include "fleetcbm/fleet_config.hpp"
#include "fleetcbm/milp_model.hpp"

namespace fleetcbm {

inline constexpr std::size_t kNoVar = std::numeric_limits<std::size_t>::max();

enum class PolicyKind { kBase, kOid, kMdi, kComprehensive };

std::string_view to_string(PolicyKind policy);
PolicyKind parse_policy(std::string_view text);  // throws std::invalid_argument

inline bool models_oid(PolicyKind p) { return p == PolicyKind::kOid || p == PolicyKind::kComprehensive; }
inline bool models_mdi(PolicyKind p) { return p == PolicyKind::kMdi || p == PolicyKind::kComprehensive; }

// The fleet as seen by `policy`: zeta data zeroed when OID is ignored, gamma
// data zeroed when MDI is ignored.
FleetSpec policy_view(FleetSpec spec, PolicyKind policy);

// Dense id table over a rectangular index space; absent entries are kNoVar.
class IdGrid {
 public:
  IdGrid() = default;
  explicit IdGrid(std::vector<std::size_t> dims);
  std::size_t& at(std::initializer_list<std::size_t> idx);
  std::size_t at(std::initializer_list<std::size_t> idx) const;
  bool empty() const { return ids_.empty(); }
  std::size_t size() const { return ids_.size(); }
  const std::vector<std::size_t>& ids() const { return ids_; }

 private:
  std::size_t offset(std::initializer_list<std::size_t> idx) const;
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> ids_;
};

struct VariableCatalogue {
  std::size_t num_assets = 0;
  int horizon = 0;
  int cycles = 0;  // 0 for the single-maintenance model
  std::size_t num_edges = 0;

  // [i][t-1]
  IdGrid mp, mc, u, um, uf, p, l, omega;
  IdGrid psi;  // [t-1]
  // [i][t-1][k]
  IdGrid z, v, lp, pp;
  IdGrid v0;      // [i][k]
  IdGrid omegap;  // [e][t-1][k], e indexes FleetSpec::edges

  std::size_t mp_at(std::size_t i, int t) const { return mp.at({i, std::size_t(t - 1)}); }
  std::size_t mc_at(std::size_t i, int t) const { return mc.at({i, std::size_t(t - 1)}); }
  std::size_t u_at(std::size_t i, int t) const { return u.at({i, std::size_t(t - 1)}); }
  std::size_t um_at(std::size_t i, int t) const { return um.at({i, std::size_t(t - 1)}); }
  std::size_t uf_at(std::size_t i, int t) const { return uf.at({i, std::size_t(t - 1)}); }
  std::size_t p_at(std::size_t i, int t) const { return p.at({i, std::size_t(t - 1)}); }
  std::size_t l_at(std::size_t i, int t) const { return l.at({i, std::size_t(t - 1)}); }
  std::size_t omega_at(std::size_t i, int t) const { return omega.at({i, std::size_t(t - 1)}); }
  std::size_t psi_at(int t) const { return psi.at({std::size_t(t - 1)}); }
  std::size_t z_at(std::size_t i, int t, std::size_t k) const { return z.at({i, std::size_t(t - 1), k}); }
  std::size_t v_at(std::size_t i, int t, std::size_t k) const { return v.at({i, std::size_t(t - 1), k}); }
  std::size_t lp_at(std::size_t i, int t, std::size_t k) const { return lp.at({i, std::size_t(t - 1), k}); }
  std::size_t pp_at(std::size_t i, int t, std::size_t k) const { return pp.at({i, std::size_t(t - 1), k}); }
  std::size_t v0_at(std::size_t i, std::size_t k) const { return v0.at({i, k}); }
  std::size_t omegap_at(std::size_t e, int t, std::size_t k) const { return omegap.at({e, std::size_t(t - 1), k}); }
};

struct BuiltModel {
  MilpModel model;
  VariableCatalogue catalogue;
  PolicyKind policy = PolicyKind::kComprehensive;
};

BuiltModel build_single_maintenance(const FleetSpec& spec, PolicyKind policy);
BuiltModel build_multi_cycle(const FleetSpec& spec, PolicyKind policy);

// l_{i,0} + sum_t (d_bar + d_hat + (zeta_bar + zeta_hat) K_i
//                  + sum_{j in A_i} (gamma_bar + gamma_hat) Lambda_j).
double big_m(const FleetSpec& spec, std::size_t asset);

// Initial level of cycle k (0-based): l_{i,0} for the first, 0 afterwards.
double cycle_initial_level(const FleetSpec& spec, std::size_t asset, std::size_t k);

// Last period in which a maintenance of the given duration may start.
int last_start(const FleetSpec& spec, int duration);

struct ModelCounts {
  std::size_t variables = 0;
  std::size_t constraints = 0;
};

// Closed-form sizes; see docs/model_catalogue.md.
ModelCounts single_maintenance_counts(const FleetSpec& spec, PolicyKind policy);
ModelCounts multi_cycle_counts(const FleetSpec& spec, PolicyKind policy);

}  // namespace fleetcbm

#endif  // FLEETCBM_MODEL_BUILDER_HPP_
