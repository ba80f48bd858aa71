#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mfct/queueing.hpp"

using namespace mfct;

namespace {
const sim::DelayParams kDelay{};
}

TEST_CASE("hop delay sums transmission, propagation and queue wait") {
    CHECK(sim::hop_delay(4000, 0, kDelay, 0) == doctest::Approx(0.016).epsilon(1e-12));
    CHECK(sim::hop_delay(0, 0, kDelay, 0) == 0.0);
    CHECK(sim::hop_delay(4000, 300, kDelay, 0.004) ==
          doctest::Approx(0.016 + 1e-6 + 0.004).epsilon(1e-12));
    CHECK_THROWS_AS(sim::hop_delay(-1, 0, kDelay, 0), InvalidParameter);
    CHECK_THROWS_AS(sim::hop_delay(0, -1, kDelay, 0), InvalidParameter);
    CHECK_THROWS_AS(sim::hop_delay(0, 0, kDelay, -1), InvalidParameter);
}

TEST_CASE("fifo departures: single, back-to-back and idle-gap arrivals") {
    sim::FifoQueue q;
    auto deps = sim::fifo_departures(q, {1.0}, 0.005);
    CHECK(deps == std::vector<double>{1.005});

    q = {};
    deps = sim::fifo_departures(q, {1.0, 1.0}, 0.005);
    CHECK(deps[0] == doctest::Approx(1.005));
    CHECK(deps[1] == doctest::Approx(1.010));

    q = {};
    deps = sim::fifo_departures(q, {1.0, 2.0}, 0.005);
    CHECK(deps[0] == doctest::Approx(1.005));
    CHECK(deps[1] == doctest::Approx(2.005));  // idle gap adds no wait
}

TEST_CASE("service clock persists across calls") {
    sim::FifoQueue q;
    sim::fifo_departures(q, {1.0, 1.0, 1.0}, 0.01);
    CHECK(q.last_departure == doctest::Approx(1.03));
    auto deps = sim::fifo_departures(q, {1.02}, 0.01);
    CHECK(deps[0] == doctest::Approx(1.04));  // still draining the backlog
}

TEST_CASE("delay parameter validation") {
    sim::DelayParams bad = kDelay;
    bad.bandwidth_bps = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidParameter);
    CHECK_NOTHROW(kDelay.validate());
}
