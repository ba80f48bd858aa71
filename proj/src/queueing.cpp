#include "mfct/queueing.hpp"

#include <algorithm>
#include <cmath>

namespace mfct::sim {

void DelayParams::validate() const {
    if (!(bandwidth_bps > 0.0) || !(propagation_mps > 0.0) ||
        !(fog_service_s > 0.0) || !(cloud_service_s > 0.0)) {
        throw InvalidParameter("delay parameters must be positive");
    }
}

double hop_delay(double bits, double d, const DelayParams& p, double queue_wait) {
    if (!(bits >= 0.0) || !(d >= 0.0) || !(queue_wait >= 0.0)) {
        throw InvalidParameter("hop_delay requires nonnegative inputs");
    }
    return bits / p.bandwidth_bps + d / p.propagation_mps + queue_wait;
}

std::vector<double> fifo_departures(FifoQueue& q, const std::vector<double>& arrivals,
                                    double service_s) {
    std::vector<double> departures;
    departures.reserve(arrivals.size());
    for (double a : arrivals) {
        const double start = std::max(a, q.last_departure);
        q.last_departure = start + service_s;
        departures.push_back(q.last_departure);
    }
    return departures;
}

}  // namespace mfct::sim
