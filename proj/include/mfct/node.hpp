#pragma once

#include <algorithm>
#include <vector>

#include "mfct/geom.hpp"

namespace mfct::net {

struct SensorNode {
    int id = 0;
    Kinematics kin;
    double energy = 0.0;  // joules remaining, never negative
    bool alive = true;
    std::vector<int> memberships;  // cluster ids, sorted
    int primary_ch = -1;           // node id, -1 when unset
    bool was_ch_last_epoch = false;

    // Deducts up to `cost` joules and returns the realized drop, so the
    // energy ledger always matches the node's actual balance change even
    // when the battery bottoms out mid-operation.
    double consume(double cost) {
        const double before = energy;
        energy = std::max(0.0, energy - cost);
        return before - energy;
    }
};

// Fog nodes are mains powered; they carry no battery state. Tree links live
// in fog::FogTree, the service queue clock in the simulation state.
struct FogNode {
    int id = 0;
    Kinematics kin;  // static
    Rect region;
};

struct Cluster {
    int id = 0;
    int ch = 0;                // node id, always a member
    std::vector<int> members;  // node ids, sorted; may overlap other clusters
    int anchor_fog = 0;        // fog whose region contains the CH position
    double ch_grade = 0.0;     // grey grade the CH was elected with
};

// Criteria row feeding the grey election, in column order
// (e_re, hc, d, let, snr) with directions (B, C, C, B, B).
struct CriteriaVector {
    double e_re = 0.0;  // joules, Benefit
    double hc = 0.0;    // hops to nearest fog, Cost
    double d = 0.0;     // meters to nearest fog, Cost
    double let = 0.0;   // seconds (clamped), Benefit
    double snr = 0.0;   // dB, Benefit
};

}  // namespace mfct::net
