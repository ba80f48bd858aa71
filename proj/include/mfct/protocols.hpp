#pragma once

#include "mfct/state.hpp"

namespace mfct::proto {

// One round of MFCT-IoT: epoch-boundary grey elections and overlapping
// cluster formation, member -> CH collection with mid-round failover to
// secondary memberships, CH aggregation toward the anchor fog, local fog
// responses with probability p_hit, and merge-and-forward of misses up the
// fog tree to the cloud. Responses retrace the recorded uplink route.
RoundEvents mfct_round(SimState& st, const SimParams& p, const RoundHooks& hooks = {});

// ERGID-lite baseline: clusterless greedy geographic forwarding toward the
// nearest fog with delay-estimated candidate filtering (DIM) and
// energy-proportional choice within the low-delay band (REPC). Fogs relay
// straight to the cloud; no tree, no merging.
RoundEvents ergid_round(SimState& st, const SimParams& p);

// EECRP-lite baseline: energy-weighted centroid clusters recomputed each
// epoch, rotating CH selection, nearest-fog relay straight to the cloud.
RoundEvents eecrp_round(SimState& st, const SimParams& p);

// Centroid position weighted by residual energy: sum(pos_i * E_i) / sum(E_i).
// Equal energies reduce to the plain mean.
Vec2 energy_weighted_centroid(const std::vector<net::SensorNode>& nodes,
                              const std::vector<int>& ids);

// Dispatch by protocol kind.
RoundEvents run_round(ProtocolKind kind, SimState& st, const SimParams& p,
                      const RoundHooks& hooks = {});

// Epoch preparation only (elections / reclustering / routing-table refresh),
// without traffic. The round functions invoke this on epoch boundaries; the
// topology dump uses it directly.
void prepare_epoch(ProtocolKind kind, SimState& st, const SimParams& p, RoundEvents& ev);

// Applies end-of-round mortality: nodes at zero energy are marked dead and
// their memberships cleared.
void apply_round_end_deaths(SimState& st);

}  // namespace mfct::proto
