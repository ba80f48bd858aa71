#pragma once

#include <map>
#include <optional>
#include <vector>

#include "mfct/node.hpp"
#include "mfct/params.hpp"

namespace mfct::net {

// Minimum hops from `node` to any fog over the unit-disk graph of alive
// sensors (edge iff distance <= comm_radius), counting the final hop into
// the fog. nullopt when no path exists. Throws DeadNode for a dead node.
std::optional<int> hop_count(const SensorNode& node, const std::vector<FogNode>& fogs,
                             const std::vector<SensorNode>& all_nodes,
                             double comm_radius);

// Criteria row for one alive node. Unreachable hop counts are encoded as
// p.protocol.hop_cap; LET is measured against the nearest fog and clamped to
// the scenario duration so static deployments stay finite.
CriteriaVector criteria_for(const SensorNode& node, const std::vector<FogNode>& fogs,
                            const std::vector<SensorNode>& all_nodes,
                            const SimParams& p, int epoch);

struct ElectionResult {
    std::vector<int> chs;            // node ids, deterministic order
    std::map<int, double> grade_of;  // grey grade per elected CH
    int relaxations = 0;             // eligibility relaxations that fired
};

// Grey-ranked CH election among the region's eligible candidates: alive,
// energy above threshold, not CH in the previous epoch. When nobody
// qualifies the was_ch rule is relaxed first, then the threshold. Selects
// the top ceil(p_ch * |eligible|) candidates, at least one.
// Pure: identical inputs give identical CH sets. Throws EmptyRegion when
// region_node_ids is empty.
ElectionResult elect_cluster_heads(const std::vector<int>& region_node_ids,
                                   const std::vector<SensorNode>& all_nodes,
                                   const std::vector<FogNode>& fogs,
                                   const FogNode& region_fog, const SimParams& p,
                                   int epoch);

// Overlapping cluster formation: every alive non-CH node joins each cluster
// whose CH lies within cluster_radius; the primary is the in-range CH with
// the highest grade (ties: nearest, then lower id). Nodes with no CH in
// range attach to the nearest CH regardless of radius. Updates membership
// and primary_ch fields on the nodes.
std::vector<Cluster> form_overlapping_clusters(const ElectionResult& election,
                                               std::vector<SensorNode>& nodes,
                                               const std::vector<FogNode>& fogs,
                                               double cluster_radius);

// Fog whose region rectangle contains p; falls back to the nearest fog for
// points on the far field boundary.
int region_of(Vec2 p, const std::vector<FogNode>& fogs);

}  // namespace mfct::net
