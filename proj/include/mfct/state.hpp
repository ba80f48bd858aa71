#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mfct/fog_tree.hpp"
#include "mfct/node.hpp"
#include "mfct/packet.hpp"
#include "mfct/params.hpp"
#include "mfct/queueing.hpp"
#include "mfct/rng.hpp"

namespace mfct::proto {

enum class LossCause {
    None,
    NoAliveCh,        // no alive CH among the node's memberships at send time
    ChDiedNoBackup,   // primary died mid-round, single membership
    RoutingHole,      // greedy forwarding found no closer neighbor
    StaleNextHop,     // routing table pointed at a dead relay
};

// Fate of one generated request, the unit all metrics are computed from.
struct RequestOutcome {
    std::uint64_t request_id = 0;
    int origin = -1;
    double created_at = 0.0;
    bool delivered = false;
    bool cloud_answered = false;
    double response_time = 0.0;  // valid when delivered
    double e2e_delay = 0.0;      // creation -> arrival at the answering entity
    LossCause cause = LossCause::None;
    std::vector<RouteEntry> route;  // uplink route
};

struct RoundEvents {
    std::vector<RequestOutcome> outcomes;
    double charged_j = 0.0;  // realized battery drop across all nodes
    int relaxations = 0;
    int failovers = 0;
};

// Periodic snapshot ERGID forwards with between refreshes; geometry is live,
// energy and liveness may be stale.
struct ErgidTables {
    std::vector<char> alive;
    std::vector<double> energy;
    bool valid = false;
};

struct SimClock {
    int round = 0;
    double time = 0.0;  // round start, nondecreasing
};

// Single-writer simulation state. Node ids equal vector indices.
struct SimState {
    std::vector<net::SensorNode> nodes;
    std::vector<net::FogNode> fogs;
    fog::FogTree tree;
    std::vector<net::Cluster> clusters;  // current epoch (mfct / eecrp)
    SimClock clock;
    Vec2 cloud_pos;
    std::vector<sim::FifoQueue> fog_queues;  // indexed by fog id
    sim::FifoQueue cloud_queue;
    ErgidTables ergid;
    std::vector<Rng> node_streams;  // derived from (seed, node id)
    std::uint64_t seed = 0;
    std::uint64_t next_request_id = 1;

    int alive_count() const {
        int n = 0;
        for (const auto& s : nodes) n += s.alive ? 1 : 0;
        return n;
    }
    double total_node_energy() const {
        double e = 0.0;
        for (const auto& s : nodes) e += s.energy;
        return e;
    }
};

// Fault-injection points used by the scripted failure tests.
struct RoundHooks {
    std::function<void(SimState&)> after_member_tx;
};

}  // namespace mfct::proto
