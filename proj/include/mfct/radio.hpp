#pragma once

#include "mfct/errors.hpp"
#include "mfct/geom.hpp"

namespace mfct::radio {

// First-order radio constants plus the log-distance path-loss terms behind
// the SNR criterion. Defaults are the LEACH/SEP-family conventions; all are
// overridable from the scenario config.
struct RadioParams {
    double e_elec = 50e-9;        // J/bit, electronics
    double eps_fs = 10e-12;       // J/bit/m^2, free-space amplifier
    double eps_mp = 0.0013e-12;   // J/bit/m^4, multipath amplifier
    double e_da = 5e-9;           // J/bit, aggregation
    double tx_power_dbm = 0.0;
    double pl_ref_db = 40.0;      // path loss at 1 m
    double pl_exponent = 2.7;
    double noise_floor_dbm = -90.0;

    // Model switch distance; both amplifier branches agree here.
    double d0() const;

    void validate() const;  // throws InvalidParameter
};

// Transmit cost: bits*e_elec + bits*eps_fs*d^2 below d0, multipath d^4 above.
double tx_energy(double bits, double d, const RadioParams& p);

// Receive cost: bits*e_elec.
double rx_energy(double bits, const RadioParams& p);

// Aggregation cost: signals*bits*e_da.
double aggregation_energy(double bits, double signals, const RadioParams& p);

// tx_power - (pl_ref + 10*n*log10(max(d,1))) - noise_floor. Deterministic;
// distances below 1 m clamp to the reference distance.
double snr_db(double d, const RadioParams& p);

// Time until |pos_i - pos_j| exceeds r under constant velocities.
// Returns 0 when already out of range, +infinity when the relative velocity
// is zero and the pair is within range.
double link_expiration_time(const Kinematics& i, const Kinematics& j, double r);

}  // namespace mfct::radio
