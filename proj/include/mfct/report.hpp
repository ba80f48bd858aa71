#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfct/metrics.hpp"
#include "mfct/state.hpp"

namespace mfct::report {

// Per-round series with the fixed header
// round,time_s,pdr,mean_delay_s,mean_response_s,alive,energy_j
std::string round_series_csv(const sim::MetricsReport& r);

// JSON summary {fnd, hnd, lnd, pdr_total, mean_response_s, mean_delay_s,
// energy_total_j, seed, config_hash, zero_generated}. -1 marks lifetime
// milestones that were never reached.
std::string summary_json(const sim::MetricsReport& r);

struct CompareRow {
    std::string protocol;
    std::uint64_t seed = 0;
    int rate = 1;
    sim::MetricsReport rep;
};

// Long-format comparison table:
// protocol,seed,rate,fnd,hnd,lnd,pdr,mean_response_s,mean_delay_s,energy_j
// Failed runs carry status=failed rows with empty metric cells.
struct FailedRow {
    std::string protocol;
    std::uint64_t seed = 0;
    int rate = 1;
    std::string error;
};
std::string comparison_csv(const std::vector<CompareRow>& rows,
                           const std::vector<FailedRow>& failed);

// Median-over-seeds summary per (protocol, rate), printable.
std::string median_table(const std::vector<CompareRow>& rows);

// Topology snapshot (nodes, energies, memberships, CH flags, fog regions,
// tree adjacency) for debugging and plotting.
std::string topology_json(const proto::SimState& st);

// Stable float formatting shared by all CSV emitters.
std::string fmt_csv_double(double v);

}  // namespace mfct::report
