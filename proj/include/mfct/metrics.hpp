#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mfct::sim {

struct RoundRow {
    int round = 0;
    double time_s = 0.0;
    double pdr = 1.0;
    double mean_delay_s = 0.0;
    double mean_response_s = 0.0;
    int alive = 0;
    double energy_j = 0.0;  // cumulative consumed energy through this round
};

// Per-round series plus run aggregates for the five evaluation criteria.
// Lifetime milestones use -1 when never reached within the run.
struct MetricsReport {
    std::vector<RoundRow> rounds;
    int fnd = -1;  // round of first death
    int hnd = -1;  // round when alive <= n/2
    int lnd = -1;  // round when alive == 0
    double pdr_total = 1.0;
    double mean_response_s = 0.0;
    double p95_response_s = 0.0;
    double mean_delay_s = 0.0;
    double energy_total_j = 0.0;
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t lost = 0;
    std::uint64_t relaxations = 0;
    std::uint64_t failovers = 0;
    bool zero_generated = false;
    std::uint64_t seed = 0;
    std::string config_hash;
};

}  // namespace mfct::sim
