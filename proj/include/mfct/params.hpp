#pragma once

#include <array>
#include <cstdint>

#include "mfct/geom.hpp"
#include "mfct/grey.hpp"
#include "mfct/queueing.hpp"
#include "mfct/radio.hpp"

namespace mfct {

enum class ProtocolKind { Mfct, Ergid, Eecrp };

struct ProtocolConfig {
    double p_hit = 0.3;          // probability a fog answers a request locally
    int rate = 1;                // packets per node per round
    double energy_threshold_frac = 0.1;  // CH eligibility floor, fraction of initial energy
    double p_ch = 0.1;           // CH fraction among eligible candidates
    double comm_radius_m = 50.0;
    double cluster_radius_m = 50.0;
    int epoch_len = 10;          // rounds between elections / table refreshes
    int hop_cap = 32;            // hop-count stand-in for unreachable nodes
    bool merge_concat = false;   // merged packet bits = sum of inputs instead of fixed size
    bool random_ch_ablation = false;  // replace grey ranking by uniform choice among eligibles
};

// Everything the protocol rounds and the engine need to run one simulation.
struct SimParams {
    radio::RadioParams radio;
    sim::DelayParams delay;
    grey::GreyParams grey_params;
    // Weights for (e_re, hc, d, let, snr).
    std::array<double, 5> criteria_weights{0.2, 0.2, 0.2, 0.2, 0.2};
    ProtocolConfig protocol;
    double packet_bits = 4000.0;
    double round_duration_s = 1.0;
    int rounds = 2000;
    double initial_energy_j = 0.5;
    std::uint64_t seed = 1;
    Rect field{0.0, 0.0, 200.0, 200.0};
    bool shadowing = false;  // seeded log-normal SNR shadowing, off for replayability
    double shadowing_sigma_db = 4.0;

    double duration_s() const { return rounds * round_duration_s; }
    double energy_threshold_j() const {
        return protocol.energy_threshold_frac * initial_energy_j;
    }
};

}  // namespace mfct
