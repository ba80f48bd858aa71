#pragma once

#include <vector>

#include "mfct/errors.hpp"

namespace mfct::sim {

// Per-hop delay model: transmission + propagation + queueing.
struct DelayParams {
    double bandwidth_bps = 250000.0;
    double propagation_mps = 3e8;
    double fog_service_s = 0.005;    // seconds per packet
    double cloud_service_s = 0.02;

    void validate() const;  // throws InvalidParameter
};

double hop_delay(double bits, double d, const DelayParams& p, double queue_wait);

// FIFO service clock; persists across rounds so back-to-back arrivals keep
// queueing realistically.
struct FifoQueue {
    double last_departure = 0.0;
};

// Departure times for time-ordered arrivals under one-at-a-time service:
// departure_i = max(arrival_i, departure_{i-1}) + service_s.
std::vector<double> fifo_departures(FifoQueue& q, const std::vector<double>& arrivals,
                                    double service_s);

}  // namespace mfct::sim
