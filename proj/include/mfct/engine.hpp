#pragma once

#include <functional>

#include "mfct/config.hpp"
#include "mfct/metrics.hpp"
#include "mfct/protocols.hpp"
#include "mfct/state.hpp"

namespace mfct::sim {

// Snapshot handed to the per-round observer after deaths have been applied.
struct RoundStats {
    int round = 0;
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t lost = 0;
    double charged_j = 0.0;
    int alive = 0;
};

using RoundObserver =
    std::function<void(const proto::SimState&, const RoundStats&)>;

// Deterministic initial topology for the configured (seed, placement):
// node positions uniform over the field, optional velocities, fog grid,
// fog tree, per-node random streams.
proto::SimState make_initial_state(const cfg::ScenarioConfig& c);

// Runs the configured number of rounds of the selected protocol and
// accumulates the metrics report. Identical config + seed produce an
// identical report. The observer (when set) fires at every round end;
// hooks are forwarded to the protocol for fault-injection tests.
MetricsReport run(const cfg::ScenarioConfig& c, const RoundObserver& observer = {},
                  const proto::RoundHooks& hooks = {});

}  // namespace mfct::sim
