#include "mfct/radio.hpp"

#include <cmath>
#include <limits>

namespace mfct::radio {

double RadioParams::d0() const { return std::sqrt(eps_fs / eps_mp); }

void RadioParams::validate() const {
    if (!(e_elec > 0.0) || !(eps_fs > 0.0) || !(eps_mp > 0.0) || !(e_da > 0.0)) {
        throw InvalidParameter("radio energy constants must be positive");
    }
    if (!(pl_exponent >= 2.0)) {
        throw InvalidParameter("path-loss exponent must be >= 2");
    }
    if (!std::isfinite(tx_power_dbm) || !std::isfinite(pl_ref_db) ||
        !std::isfinite(noise_floor_dbm)) {
        throw InvalidParameter("non-finite radio parameter");
    }
}

double tx_energy(double bits, double d, const RadioParams& p) {
    if (!(bits >= 0.0) || !(d >= 0.0)) {
        throw InvalidParameter("tx_energy requires nonnegative bits and distance");
    }
    if (d < p.d0()) {
        return bits * p.e_elec + bits * p.eps_fs * d * d;
    }
    return bits * p.e_elec + bits * p.eps_mp * d * d * d * d;
}

double rx_energy(double bits, const RadioParams& p) {
    if (!(bits >= 0.0)) {
        throw InvalidParameter("rx_energy requires nonnegative bits");
    }
    return bits * p.e_elec;
}

double aggregation_energy(double bits, double signals, const RadioParams& p) {
    if (!(bits >= 0.0) || !(signals >= 0.0)) {
        throw InvalidParameter("aggregation_energy requires nonnegative inputs");
    }
    return signals * bits * p.e_da;
}

double snr_db(double d, const RadioParams& p) {
    if (!(d >= 0.0)) {
        throw InvalidParameter("snr_db requires nonnegative distance");
    }
    const double deff = d < 1.0 ? 1.0 : d;  // avoid the log singularity
    const double path_loss = p.pl_ref_db + 10.0 * p.pl_exponent * std::log10(deff);
    return p.tx_power_dbm - path_loss - p.noise_floor_dbm;
}

double link_expiration_time(const Kinematics& i, const Kinematics& j, double r) {
    if (!(r > 0.0)) {
        throw InvalidParameter("link_expiration_time requires r > 0");
    }
    for (double v : {i.pos.x, i.pos.y, i.vel.x, i.vel.y,
                     j.pos.x, j.pos.y, j.vel.x, j.vel.y}) {
        if (!std::isfinite(v)) {
            throw InvalidParameter("non-finite kinematics");
        }
    }

    const double a = i.vel.x - j.vel.x;
    const double b = i.pos.x - j.pos.x;
    const double c = i.vel.y - j.vel.y;
    const double e = i.pos.y - j.pos.y;

    if (b * b + e * e > r * r) return 0.0;  // already out of range

    const double rel2 = a * a + c * c;
    if (rel2 == 0.0) return std::numeric_limits<double>::infinity();

    const double disc = rel2 * r * r - (a * e - b * c) * (a * e - b * c);
    if (disc < 0.0) return 0.0;

    const double t = (-(a * b + c * e) + std::sqrt(disc)) / rel2;
    return t < 0.0 ? 0.0 : t;
}

}  // namespace mfct::radio
