#pragma once

#include <map>
#include <string>
#include <vector>

#include "mfct/node.hpp"
#include "mfct/packet.hpp"

namespace mfct::fog {

// Sentinel parent id for the cloud root.
inline constexpr int kCloudRoot = -1;

// Complete k-ary tree of fog nodes under a single cloud root. Immutable
// within an epoch; rebuild is an exclusive operation between rounds.
struct FogTree {
    int branching = 2;
    std::vector<int> level_order;            // fog ids, root fog first
    std::map<int, int> parent_of;            // fog id -> fog id or kCloudRoot
    std::map<int, std::vector<int>> children_of;

    bool contains(int fog_id) const { return parent_of.count(fog_id) != 0; }

    // Depth of a fog, where the fog directly under the cloud has depth 1.
    int depth(int fog_id) const;

    int height() const;
};

// Fogs are sorted by Morton code of their grid-quantized positions (ties by
// lower id) and placed level-order into a complete k-ary tree, which keeps
// subtrees geographically coherent and leaf depths within 1 of each other.
FogTree build_tree(const std::vector<net::FogNode>& fogs, int k);

// Parent chain of fog_id; last element is kCloudRoot.
std::vector<int> path_to_root(const FogTree& tree, int fog_id);

// Folds packets into one FogMerged packet of out_bits: request ids form the
// multiset union, created_at takes the minimum for worst-case delay
// accounting.
Packet merge_payloads(const std::vector<Packet>& packets, double out_bits);

// Indented one-node-per-line rendering rooted at the cloud.
std::string dump_text(const FogTree& tree, const std::vector<net::FogNode>& fogs);

}  // namespace mfct::fog
