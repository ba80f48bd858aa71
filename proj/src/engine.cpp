#include "mfct/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mfct/errors.hpp"

namespace mfct::sim {

namespace {

// Reflect mobile nodes off the field boundary.
void advance_positions(proto::SimState& st, const Rect& field, double dt) {
    for (auto& n : st.nodes) {
        if (!n.alive) continue;
        double x = n.kin.pos.x + n.kin.vel.x * dt;
        double y = n.kin.pos.y + n.kin.vel.y * dt;
        if (x < field.x) {
            x = 2.0 * field.x - x;
            n.kin.vel.x = -n.kin.vel.x;
        } else if (x > field.x + field.w) {
            x = 2.0 * (field.x + field.w) - x;
            n.kin.vel.x = -n.kin.vel.x;
        }
        if (y < field.y) {
            y = 2.0 * field.y - y;
            n.kin.vel.y = -n.kin.vel.y;
        } else if (y > field.y + field.h) {
            y = 2.0 * (field.y + field.h) - y;
            n.kin.vel.y = -n.kin.vel.y;
        }
        n.kin.pos = {x, y};
    }
}

}  // namespace

proto::SimState make_initial_state(const cfg::ScenarioConfig& c) {
    cfg::validate(c);

    proto::SimState st;
    st.seed = c.params.seed;
    st.fogs = cfg::make_fog_nodes(c);
    st.tree = fog::build_tree(st.fogs, c.tree_branching);
    st.cloud_pos = c.cloud_position();
    st.fog_queues.assign(st.fogs.size(), FifoQueue{});

    Rng topo = derive_stream(c.params.seed, tags::kTopology);
    const Rect field = c.params.field;
    st.nodes.reserve(static_cast<std::size_t>(c.node_count));
    for (int i = 0; i < c.node_count; ++i) {
        net::SensorNode n;
        n.id = i;
        n.kin.pos = {topo.uniform(field.x, field.x + field.w),
                     topo.uniform(field.y, field.y + field.h)};
        if (c.max_speed_mps > 0.0) {
            const double angle = topo.uniform(0.0, 6.28318530717958647692);
            const double speed = topo.uniform(0.0, c.max_speed_mps);
            n.kin.vel = {speed * std::cos(angle), speed * std::sin(angle)};
        }
        n.energy = c.params.initial_energy_j;
        st.nodes.push_back(n);
    }

    st.node_streams.reserve(st.nodes.size());
    for (int i = 0; i < c.node_count; ++i) {
        st.node_streams.push_back(
            derive_stream(c.params.seed, tags::kNodeStream | static_cast<std::uint64_t>(i)));
    }
    return st;
}

MetricsReport run(const cfg::ScenarioConfig& c, const RoundObserver& observer,
                  const proto::RoundHooks& hooks) {
    proto::SimState st = make_initial_state(c);
    const SimParams& p = c.params;

    MetricsReport report;
    report.seed = p.seed;
    report.config_hash = cfg::config_hash(c);
    report.rounds.reserve(static_cast<std::size_t>(p.rounds));

    std::vector<double> response_times;
    double delay_sum = 0.0;
    std::uint64_t delay_count = 0;
    double cumulative_energy = 0.0;
    const int half = c.node_count / 2;

    for (int round = 0; round < p.rounds; ++round) {
        st.clock.round = round;
        st.clock.time = round * p.round_duration_s;
        if (c.max_speed_mps > 0.0 && round > 0) {
            advance_positions(st, p.field, p.round_duration_s);
        }

        proto::RoundEvents ev = proto::run_round(c.protocol, st, p, hooks);

        std::uint64_t generated = ev.outcomes.size();
        std::uint64_t delivered = 0;
        double resp_sum = 0.0;
        for (const auto& out : ev.outcomes) {
            if (out.delivered) {
                ++delivered;
                resp_sum += out.response_time;
                response_times.push_back(out.response_time);
                delay_sum += out.e2e_delay;
                ++delay_count;
            }
        }
        const std::uint64_t lost = generated - delivered;

        // Conservation is structural: every generated request resolves
        // within its round, so in_flight is zero at every boundary.
        for (const auto& out : ev.outcomes) {
            if (!out.delivered && out.cause == proto::LossCause::None) {
                throw std::logic_error("request neither delivered nor accounted as lost");
            }
        }

        proto::apply_round_end_deaths(st);
        const int alive = st.alive_count();
        if (report.fnd < 0 && alive < c.node_count) report.fnd = round;
        if (report.hnd < 0 && alive <= half) report.hnd = round;
        if (report.lnd < 0 && alive == 0) report.lnd = round;

        cumulative_energy += ev.charged_j;
        RoundRow row;
        row.round = round;
        row.time_s = st.clock.time;
        row.pdr = generated == 0
                      ? 1.0
                      : static_cast<double>(delivered) / static_cast<double>(generated);
        row.mean_delay_s = 0.0;
        row.mean_response_s = 0.0;
        if (delivered > 0) {
            double ds = 0.0;
            for (const auto& out : ev.outcomes) {
                if (out.delivered) ds += out.e2e_delay;
            }
            row.mean_delay_s = ds / static_cast<double>(delivered);
            row.mean_response_s = resp_sum / static_cast<double>(delivered);
        }
        row.alive = alive;
        row.energy_j = cumulative_energy;
        report.rounds.push_back(row);

        report.generated += generated;
        report.delivered += delivered;
        report.lost += lost;
        report.relaxations += static_cast<std::uint64_t>(ev.relaxations);
        report.failovers += static_cast<std::uint64_t>(ev.failovers);

        if (observer) {
            RoundStats stats;
            stats.round = round;
            stats.generated = generated;
            stats.delivered = delivered;
            stats.lost = lost;
            stats.charged_j = ev.charged_j;
            stats.alive = alive;
            observer(st, stats);
        }
    }

    report.zero_generated = report.generated == 0;
    report.pdr_total = report.zero_generated
                           ? 1.0
                           : static_cast<double>(report.delivered) /
                                 static_cast<double>(report.generated);
    if (!response_times.empty()) {
        double sum = 0.0;
        for (double r : response_times) sum += r;
        report.mean_response_s = sum / static_cast<double>(response_times.size());
        std::sort(response_times.begin(), response_times.end());
        const std::size_t idx = static_cast<std::size_t>(
            std::ceil(0.95 * static_cast<double>(response_times.size())));
        report.p95_response_s = response_times[std::min(idx, response_times.size()) - 1];
    }
    if (delay_count > 0) {
        report.mean_delay_s = delay_sum / static_cast<double>(delay_count);
    }
    report.energy_total_j = cumulative_energy;
    return report;
}

}  // namespace mfct::sim
