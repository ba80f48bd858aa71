#include "mfct/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "mfct/errors.hpp"
#include "mfct/network.hpp"

namespace mfct::proto {

namespace {

void charge(SimState& st, RoundEvents& ev, int node_id, double cost) {
    ev.charged_j += st.nodes[static_cast<std::size_t>(node_id)].consume(cost);
}

const net::FogNode& fog_by_id(const SimState& st, int id) {
    for (const auto& f : st.fogs) {
        if (f.id == id) return f;
    }
    throw UnknownFog("unknown fog id " + std::to_string(id));
}

int nearest_fog_id(const SimState& st, Vec2 p) {
    int best = st.fogs.front().id;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (const auto& f : st.fogs) {
        const double d2 = dist2(p, f.kin.pos);
        if (d2 < best_d2 || (d2 == best_d2 && f.id < best)) {
            best = f.id;
            best_d2 = d2;
        }
    }
    return best;
}

// Membership CHs of a node ordered by preference: grade descending, then
// nearer, then lower id. The primary is the first entry by construction.
std::vector<int> ordered_membership_chs(const SimState& st, const net::SensorNode& n) {
    struct Entry {
        double grade;
        double d;
        int ch;
    };
    std::vector<Entry> entries;
    for (int cid : n.memberships) {
        const auto& c = st.clusters[static_cast<std::size_t>(cid)];
        entries.push_back({c.ch_grade,
                           dist(n.kin.pos, st.nodes[static_cast<std::size_t>(c.ch)].kin.pos),
                           c.ch});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.grade != b.grade) return a.grade > b.grade;
        if (a.d != b.d) return a.d < b.d;
        return a.ch < b.ch;
    });
    std::vector<int> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.ch);
    return out;
}

// Grey elections per fog region followed by global overlapping formation.
void run_mfct_elections(SimState& st, const SimParams& p, int epoch, RoundEvents& ev) {
    std::map<int, std::vector<int>> region_nodes;
    for (const auto& n : st.nodes) {
        if (!n.alive) continue;
        region_nodes[net::region_of(n.kin.pos, st.fogs)].push_back(n.id);
    }

    net::ElectionResult all;
    for (const auto& f : st.fogs) {  // merged deterministically by fog id order
        auto it = region_nodes.find(f.id);
        if (it == region_nodes.end()) continue;
        net::ElectionResult res =
            net::elect_cluster_heads(it->second, st.nodes, st.fogs, f, p, epoch);
        ev.relaxations += res.relaxations;
        all.chs.insert(all.chs.end(), res.chs.begin(), res.chs.end());
        all.grade_of.insert(res.grade_of.begin(), res.grade_of.end());
    }

    for (auto& n : st.nodes) n.was_ch_last_epoch = false;
    if (all.chs.empty()) {
        st.clusters.clear();
        for (auto& n : st.nodes) {
            n.memberships.clear();
            n.primary_ch = -1;
        }
        return;
    }
    std::sort(all.chs.begin(), all.chs.end());
    for (int ch : all.chs) {
        st.nodes[static_cast<std::size_t>(ch)].was_ch_last_epoch = true;
    }
    st.clusters = net::form_overlapping_clusters(all, st.nodes, st.fogs,
                                                 p.protocol.cluster_radius_m);
}

// A sensor report sitting in a CH's collection buffer.
struct BufferedReport {
    std::uint64_t request_id;
    std::size_t out_idx;
    int origin;
    int ch;
    double arrival;
};

// Per-request reference carried through the fog/cloud pipeline.
struct ReqRef {
    std::uint64_t request_id;
    std::size_t out_idx;
    int origin;
    int ch;
    int anchor_fog;
};

// One packet's worth of service work at a fog (a local CH aggregate or a
// merged packet from a child fog).
struct FogEvent {
    double arrival;
    int seq;        // creation order, breaks arrival ties deterministically
    bool is_merge;  // child merge: contents are forwarded, never answered here
    std::vector<ReqRef> requests;
    Packet payload;
};

struct CloudEvent {
    double arrival;
    int seq;
    std::vector<ReqRef> requests;
};

double agg_bits_for(const SimParams& p, std::size_t signals) {
    return p.protocol.merge_concat ? p.packet_bits * static_cast<double>(signals)
                                   : p.packet_bits;
}

// Walks the recorded uplink route in reverse from the cloud, accumulating
// per-hop delays and charging the sensor-side radio costs. Returns the
// response arrival time at the origin.
double retrace_response(SimState& st, RoundEvents& ev, const SimParams& p, double bits,
                        const std::vector<RouteEntry>& route, double start) {
    double t = start;
    Vec2 prev = st.cloud_pos;
    for (std::size_t i = route.size(); i-- > 0;) {
        const RouteEntry& re = route[i];
        if (re.kind == RouteEntry::Kind::Cloud) continue;
        const bool sensor = re.kind == RouteEntry::Kind::Sensor;
        const Vec2 cur = sensor ? st.nodes[static_cast<std::size_t>(re.id)].kin.pos
                                : fog_by_id(st, re.id).kin.pos;
        t += sim::hop_delay(bits, dist(prev, cur), p.delay, 0.0);
        if (sensor) {
            charge(st, ev, re.id, radio::rx_energy(bits, p.radio));
            if (i > 0) {
                const Vec2 next =
                    st.nodes[static_cast<std::size_t>(route[i - 1].id)].kin.pos;
                charge(st, ev, re.id, radio::tx_energy(bits, dist(cur, next), p.radio));
            }
        }
        prev = cur;
    }
    return t;
}

}  // namespace

RoundEvents mfct_round(SimState& st, const SimParams& p, const RoundHooks& hooks) {
    RoundEvents ev;
    const double t0 = st.clock.time;
    const double bits = p.packet_bits;

    if (st.clock.round % p.protocol.epoch_len == 0) {
        prepare_epoch(ProtocolKind::Mfct, st, p, ev);
    }

    // --- collection: every alive member reports to its primary CH ---------
    std::vector<BufferedReport> buffered;
    for (auto& n : st.nodes) {
        if (!n.alive) continue;
        for (int k = 0; k < p.protocol.rate; ++k) {
            RequestOutcome out;
            out.request_id = st.next_request_id++;
            out.origin = n.id;
            out.created_at = t0;
            out.route.push_back(RouteEntry::sensor(n.id));

            const std::vector<int> chs = ordered_membership_chs(st, n);
            int target = -1;
            for (int ch : chs) {
                if (st.nodes[static_cast<std::size_t>(ch)].alive) {
                    target = ch;
                    break;
                }
            }
            if (target < 0) {
                out.cause = LossCause::NoAliveCh;
                ev.outcomes.push_back(std::move(out));
                continue;
            }

            double arrival = t0;
            if (target != n.id) {
                const double d =
                    dist(n.kin.pos, st.nodes[static_cast<std::size_t>(target)].kin.pos);
                charge(st, ev, n.id, radio::tx_energy(bits, d, p.radio));
                charge(st, ev, target, radio::rx_energy(bits, p.radio));
                arrival = t0 + sim::hop_delay(bits, d, p.delay, 0.0);
                out.route.push_back(RouteEntry::sensor(target));
            }
            const std::size_t idx = ev.outcomes.size();
            ev.outcomes.push_back(std::move(out));
            buffered.push_back({ev.outcomes[idx].request_id, idx, n.id, target, arrival});
        }
    }

    if (hooks.after_member_tx) hooks.after_member_tx(st);

    // --- failover: reports stranded at a CH that died mid-round -----------
    for (auto& b : buffered) {
        if (st.nodes[static_cast<std::size_t>(b.ch)].alive) continue;
        auto& out = ev.outcomes[b.out_idx];
        const auto& origin = st.nodes[static_cast<std::size_t>(b.origin)];

        int backup = -1;
        if (origin.alive) {
            for (int ch : ordered_membership_chs(st, origin)) {
                if (ch != b.ch && st.nodes[static_cast<std::size_t>(ch)].alive) {
                    backup = ch;
                    break;
                }
            }
        }
        if (backup < 0) {
            out.cause = LossCause::ChDiedNoBackup;
            b.ch = -1;  // dropped
            continue;
        }

        const double d_old =
            dist(origin.kin.pos, st.nodes[static_cast<std::size_t>(b.ch)].kin.pos);
        const double d_new =
            dist(origin.kin.pos, st.nodes[static_cast<std::size_t>(backup)].kin.pos);
        charge(st, ev, b.origin, radio::tx_energy(bits, d_new, p.radio));
        charge(st, ev, backup, radio::rx_energy(bits, p.radio));
        // retry happens after the failed attempt completes
        b.arrival = t0 + sim::hop_delay(bits, d_old, p.delay, 0.0) +
                    sim::hop_delay(bits, d_new, p.delay, 0.0);
        b.ch = backup;
        out.route.back() = RouteEntry::sensor(backup);
        ++ev.failovers;
    }

    // --- aggregation: one fixed-size packet per CH toward its anchor fog --
    std::map<int, std::vector<FogEvent>> fog_events;  // fog id -> events
    int seq = 0;
    for (const auto& cluster : st.clusters) {
        const auto& ch = st.nodes[static_cast<std::size_t>(cluster.ch)];
        if (!ch.alive) continue;

        std::vector<const BufferedReport*> mine;
        double latest = t0;
        for (const auto& b : buffered) {
            if (b.ch != cluster.ch) continue;
            mine.push_back(&b);
            latest = std::max(latest, b.arrival);
        }
        if (mine.empty()) continue;

        charge(st, ev, cluster.ch,
               radio::aggregation_energy(bits, static_cast<double>(mine.size()), p.radio));

        const net::FogNode& anchor = fog_by_id(st, cluster.anchor_fog);
        const double d = dist(ch.kin.pos, anchor.kin.pos);
        const double out_bits = agg_bits_for(p, mine.size());
        charge(st, ev, cluster.ch, radio::tx_energy(out_bits, d, p.radio));

        FogEvent fe;
        fe.arrival = latest + sim::hop_delay(out_bits, d, p.delay, 0.0);
        fe.seq = seq++;
        fe.is_merge = false;
        fe.payload.kind = PacketKind::Aggregate;
        fe.payload.bits = out_bits;
        fe.payload.created_at = t0;
        for (const auto* b : mine) {
            fe.payload.request_ids.push_back(b->request_id);
            fe.requests.push_back({b->request_id, b->out_idx, b->origin, cluster.ch, anchor.id});
            ev.outcomes[b->out_idx].route.push_back(RouteEntry::fog(anchor.id));
        }
        std::sort(fe.payload.request_ids.begin(), fe.payload.request_ids.end());
        fog_events[anchor.id].push_back(std::move(fe));
    }

    // --- fog phase: children before parents so merges flow upward ---------
    std::vector<int> fog_order = st.tree.level_order;
    std::sort(fog_order.begin(), fog_order.end(), [&](int a, int b) {
        const int da = st.tree.depth(a), db = st.tree.depth(b);
        if (da != db) return da > db;
        return a < b;
    });

    std::vector<CloudEvent> cloud_events;
    for (int fid : fog_order) {
        auto it = fog_events.find(fid);
        if (it == fog_events.end() || it->second.empty()) continue;
        auto& events = it->second;
        std::sort(events.begin(), events.end(), [](const FogEvent& a, const FogEvent& b) {
            if (a.arrival != b.arrival) return a.arrival < b.arrival;
            return a.seq < b.seq;
        });

        std::vector<double> arrivals;
        arrivals.reserve(events.size());
        for (const auto& e : events) arrivals.push_back(e.arrival);
        const std::vector<double> departures = sim::fifo_departures(
            st.fog_queues[static_cast<std::size_t>(fid)], arrivals, p.delay.fog_service_s);

        const net::FogNode& fnode = fog_by_id(st, fid);
        std::vector<Packet> forward_payloads;
        std::vector<ReqRef> forward_requests;
        double forward_ready = t0;

        for (std::size_t e = 0; e < events.size(); ++e) {
            const FogEvent& fe = events[e];
            const double dep = departures[e];

            if (fe.is_merge) {
                forward_payloads.push_back(fe.payload);
                forward_requests.insert(forward_requests.end(), fe.requests.begin(),
                                        fe.requests.end());
                forward_ready = std::max(forward_ready, dep);
                continue;
            }

            Packet miss_part;
            miss_part.kind = PacketKind::Aggregate;
            miss_part.bits = fe.payload.bits;
            miss_part.created_at = fe.payload.created_at;

            for (const auto& rr : fe.requests) {
                auto& out = ev.outcomes[rr.out_idx];
                const bool hit =
                    hash_u01(st.seed, tags::kPhit | rr.request_id) < p.protocol.p_hit;
                if (hit) {
                    // local response: fog -> CH -> origin
                    out.e2e_delay = fe.arrival - out.created_at;
                    const auto& chn = st.nodes[static_cast<std::size_t>(rr.ch)];
                    double t = dep + sim::hop_delay(bits, dist(fnode.kin.pos, chn.kin.pos),
                                                    p.delay, 0.0);
                    charge(st, ev, rr.ch, radio::rx_energy(bits, p.radio));
                    if (rr.origin != rr.ch) {
                        const auto& on = st.nodes[static_cast<std::size_t>(rr.origin)];
                        const double d = dist(chn.kin.pos, on.kin.pos);
                        charge(st, ev, rr.ch, radio::tx_energy(bits, d, p.radio));
                        charge(st, ev, rr.origin, radio::rx_energy(bits, p.radio));
                        t += sim::hop_delay(bits, d, p.delay, 0.0);
                    }
                    out.delivered = true;
                    out.response_time = t - out.created_at;
                } else {
                    miss_part.request_ids.push_back(rr.request_id);
                    forward_requests.push_back(rr);
                }
            }
            if (!miss_part.request_ids.empty()) {
                std::sort(miss_part.request_ids.begin(), miss_part.request_ids.end());
                forward_payloads.push_back(std::move(miss_part));
                forward_ready = std::max(forward_ready, dep);
            }
        }

        if (forward_payloads.empty()) continue;

        const Packet merged =
            fog::merge_payloads(forward_payloads, agg_bits_for(p, forward_requests.size()));
        const int parent = st.tree.parent_of.at(fid);
        if (parent == fog::kCloudRoot) {
            CloudEvent ce;
            ce.arrival = forward_ready + sim::hop_delay(merged.bits,
                                                        dist(fnode.kin.pos, st.cloud_pos),
                                                        p.delay, 0.0);
            ce.seq = seq++;
            ce.requests = std::move(forward_requests);
            for (const auto& rr : ce.requests) {
                ev.outcomes[rr.out_idx].route.push_back(RouteEntry::cloud());
            }
            cloud_events.push_back(std::move(ce));
        } else {
            const net::FogNode& pnode = fog_by_id(st, parent);
            FogEvent fe;
            fe.arrival = forward_ready + sim::hop_delay(merged.bits,
                                                        dist(fnode.kin.pos, pnode.kin.pos),
                                                        p.delay, 0.0);
            fe.seq = seq++;
            fe.is_merge = true;
            fe.payload = merged;
            fe.requests = std::move(forward_requests);
            for (const auto& rr : fe.requests) {
                ev.outcomes[rr.out_idx].route.push_back(RouteEntry::fog(parent));
            }
            fog_events[parent].push_back(std::move(fe));
        }
    }

    // --- cloud phase: answer every arriving request, retrace the route ----
    std::sort(cloud_events.begin(), cloud_events.end(),
              [](const CloudEvent& a, const CloudEvent& b) {
                  if (a.arrival != b.arrival) return a.arrival < b.arrival;
                  return a.seq < b.seq;
              });
    std::vector<double> cloud_arrivals;
    cloud_arrivals.reserve(cloud_events.size());
    for (const auto& e : cloud_events) cloud_arrivals.push_back(e.arrival);
    const std::vector<double> cloud_departures =
        sim::fifo_departures(st.cloud_queue, cloud_arrivals, p.delay.cloud_service_s);

    for (std::size_t e = 0; e < cloud_events.size(); ++e) {
        for (const auto& rr : cloud_events[e].requests) {
            auto& out = ev.outcomes[rr.out_idx];
            out.e2e_delay = cloud_events[e].arrival - out.created_at;
            const double t =
                retrace_response(st, ev, p, bits, out.route, cloud_departures[e]);
            out.delivered = true;
            out.cloud_answered = true;
            out.response_time = t - out.created_at;
        }
    }

    return ev;
}

RoundEvents ergid_round(SimState& st, const SimParams& p) {
    RoundEvents ev;
    const double t0 = st.clock.time;
    const double bits = p.packet_bits;
    const double tx_time = bits / p.delay.bandwidth_bps;
    const double r = p.protocol.comm_radius_m;
    const double r2 = r * r;

    // Periodic routing-table refresh; between refreshes liveness and energy
    // information may be stale.
    if (!st.ergid.valid || st.clock.round % p.protocol.epoch_len == 0) {
        prepare_epoch(ProtocolKind::Ergid, st, p, ev);
    }

    std::vector<int> pending(st.nodes.size(), 0);  // per-relay backlog this round

    struct Uplink {
        double arrival;
        int seq;
        ReqRef rr;
    };
    std::map<int, std::vector<Uplink>> fog_arrivals;
    int seq = 0;

    for (auto& n : st.nodes) {
        if (!n.alive) continue;
        for (int k = 0; k < p.protocol.rate; ++k) {
            RequestOutcome out;
            out.request_id = st.next_request_id++;
            out.origin = n.id;
            out.created_at = t0;
            out.route.push_back(RouteEntry::sensor(n.id));

            int cur = n.id;
            double arrival = t0;
            int fog_reached = -1;
            std::size_t guard = 0;
            while (true) {
                if (++guard > st.nodes.size() + 1) {
                    out.cause = LossCause::RoutingHole;
                    break;
                }
                const auto& cn = st.nodes[static_cast<std::size_t>(cur)];
                const int nf = nearest_fog_id(st, cn.kin.pos);
                const auto& fnode = fog_by_id(st, nf);
                const double dfog = dist(cn.kin.pos, fnode.kin.pos);

                if (dfog <= r) {
                    charge(st, ev, cur, radio::tx_energy(bits, dfog, p.radio));
                    arrival += sim::hop_delay(bits, dfog, p.delay, 0.0);
                    out.route.push_back(RouteEntry::fog(nf));
                    fog_reached = nf;
                    break;
                }

                // DIM-lite: estimated delay = transmission + candidate backlog.
                struct Cand {
                    int id;
                    double d;
                    double est;
                    double energy;
                };
                std::vector<Cand> cands;
                for (const auto& v : st.nodes) {
                    if (v.id == cur) continue;
                    if (!st.ergid.alive[static_cast<std::size_t>(v.id)]) continue;
                    if (dist2(cn.kin.pos, v.kin.pos) > r2) continue;
                    if (dist(v.kin.pos, fnode.kin.pos) >= dfog) continue;
                    cands.push_back(
                        {v.id, dist(cn.kin.pos, v.kin.pos),
                         tx_time + pending[static_cast<std::size_t>(v.id)] * tx_time,
                         std::max(0.0, st.ergid.energy[static_cast<std::size_t>(v.id)])});
                }
                if (cands.empty()) {
                    out.cause = LossCause::RoutingHole;
                    break;
                }

                double min_est = std::numeric_limits<double>::infinity();
                for (const auto& c : cands) min_est = std::min(min_est, c.est);
                std::vector<Cand> band;
                for (const auto& c : cands) {
                    if (c.est <= min_est * 1.1) band.push_back(c);
                }

                // REPC: pick within the band with probability proportional to
                // residual energy (as recorded in the table).
                Rng& stream = st.node_streams[static_cast<std::size_t>(cur)];
                double total = 0.0;
                for (const auto& c : band) total += c.energy;
                const Cand* chosen = &band.front();
                if (total > 0.0) {
                    const double x = stream.uniform() * total;
                    double acc = 0.0;
                    for (const auto& c : band) {
                        acc += c.energy;
                        if (x < acc) {
                            chosen = &c;
                            break;
                        }
                        chosen = &c;  // numeric spill lands on the last one
                    }
                } else {
                    chosen = &band[static_cast<std::size_t>(stream.below(band.size()))];
                }

                charge(st, ev, cur, radio::tx_energy(bits, chosen->d, p.radio));
                const auto& vn = st.nodes[static_cast<std::size_t>(chosen->id)];
                if (!vn.alive) {
                    out.cause = LossCause::StaleNextHop;  // table pointed at a corpse
                    break;
                }
                charge(st, ev, chosen->id, radio::rx_energy(bits, p.radio));
                arrival += sim::hop_delay(bits, chosen->d, p.delay,
                                          pending[static_cast<std::size_t>(chosen->id)] * tx_time);
                ++pending[static_cast<std::size_t>(chosen->id)];
                out.route.push_back(RouteEntry::sensor(chosen->id));
                cur = chosen->id;
            }

            const std::size_t idx = ev.outcomes.size();
            if (fog_reached >= 0) {
                ReqRef rr{out.request_id, idx, n.id, cur, fog_reached};
                fog_arrivals[fog_reached].push_back({arrival, seq++, rr});
            }
            ev.outcomes.push_back(std::move(out));
        }
    }

    // Fogs service FIFO and relay straight to the cloud; no tree, no merging.
    struct CloudArrival {
        double arrival;
        int seq;
        ReqRef rr;
    };
    std::vector<CloudArrival> cloud_arrivals;
    for (auto& [fid, ups] : fog_arrivals) {
        std::sort(ups.begin(), ups.end(), [](const Uplink& a, const Uplink& b) {
            if (a.arrival != b.arrival) return a.arrival < b.arrival;
            return a.seq < b.seq;
        });
        std::vector<double> arrivals;
        arrivals.reserve(ups.size());
        for (const auto& u : ups) arrivals.push_back(u.arrival);
        const std::vector<double> deps = sim::fifo_departures(
            st.fog_queues[static_cast<std::size_t>(fid)], arrivals, p.delay.fog_service_s);
        const Vec2 fpos = fog_by_id(st, fid).kin.pos;
        for (std::size_t i = 0; i < ups.size(); ++i) {
            ev.outcomes[ups[i].rr.out_idx].route.push_back(RouteEntry::cloud());
            cloud_arrivals.push_back(
                {deps[i] + sim::hop_delay(bits, dist(fpos, st.cloud_pos), p.delay, 0.0),
                 ups[i].seq, ups[i].rr});
        }
    }

    std::sort(cloud_arrivals.begin(), cloud_arrivals.end(),
              [](const CloudArrival& a, const CloudArrival& b) {
                  if (a.arrival != b.arrival) return a.arrival < b.arrival;
                  return a.seq < b.seq;
              });
    std::vector<double> arrivals;
    arrivals.reserve(cloud_arrivals.size());
    for (const auto& c : cloud_arrivals) arrivals.push_back(c.arrival);
    const std::vector<double> deps =
        sim::fifo_departures(st.cloud_queue, arrivals, p.delay.cloud_service_s);

    for (std::size_t i = 0; i < cloud_arrivals.size(); ++i) {
        auto& out = ev.outcomes[cloud_arrivals[i].rr.out_idx];
        out.e2e_delay = cloud_arrivals[i].arrival - out.created_at;
        const double t = retrace_response(st, ev, p, bits, out.route, deps[i]);
        out.delivered = true;
        out.cloud_answered = true;
        out.response_time = t - out.created_at;
    }
    return ev;
}

Vec2 energy_weighted_centroid(const std::vector<net::SensorNode>& nodes,
                              const std::vector<int>& ids) {
    if (ids.empty()) throw InvalidParameter("centroid of zero nodes");
    Vec2 sum;
    double total = 0.0;
    for (int id : ids) {
        const auto& n = nodes[static_cast<std::size_t>(id)];
        sum = sum + n.kin.pos * n.energy;
        total += n.energy;
    }
    if (total <= 0.0) {
        // zero residual energy everywhere: fall back to the plain mean
        Vec2 mean;
        for (int id : ids) mean = mean + nodes[static_cast<std::size_t>(id)].kin.pos;
        return mean * (1.0 / static_cast<double>(ids.size()));
    }
    return sum * (1.0 / total);
}

namespace {

// Energy-weighted k-means clustering with rotating CH selection.
void eecrp_recluster(SimState& st, const SimParams& p) {
    std::vector<int> alive_ids;
    for (const auto& n : st.nodes) {
        if (n.alive) alive_ids.push_back(n.id);
    }
    st.clusters.clear();
    for (auto& n : st.nodes) {
        n.memberships.clear();
        n.primary_ch = -1;
    }
    if (alive_ids.empty()) return;

    const std::size_t alive = alive_ids.size();
    std::size_t k = static_cast<std::size_t>(
        std::ceil(p.protocol.p_ch * static_cast<double>(alive)));
    k = std::clamp<std::size_t>(k, 1, alive);

    // Deterministic seeds spread across the id-ordered alive nodes.
    std::vector<Vec2> centroids;
    centroids.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t idx = j * alive / k;
        centroids.push_back(st.nodes[static_cast<std::size_t>(alive_ids[idx])].kin.pos);
    }

    std::vector<int> assign(alive, -1);
    for (int iter = 0; iter < 20; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < alive; ++i) {
            const Vec2 pos = st.nodes[static_cast<std::size_t>(alive_ids[i])].kin.pos;
            int best = 0;
            double best_d2 = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < centroids.size(); ++c) {
                const double d2 = dist2(pos, centroids[c]);
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best = static_cast<int>(c);
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }

        // Recompute energy-weighted centroids; dissolve empty clusters.
        std::vector<std::vector<int>> groups(centroids.size());
        for (std::size_t i = 0; i < alive; ++i) {
            groups[static_cast<std::size_t>(assign[i])].push_back(alive_ids[i]);
        }
        std::vector<Vec2> next;
        for (std::size_t c = 0; c < centroids.size(); ++c) {
            if (groups[c].empty()) continue;  // empty cluster dissolves
            next.push_back(energy_weighted_centroid(st.nodes, groups[c]));
        }
        const bool dissolved = next.size() != centroids.size();
        centroids = std::move(next);
        if (dissolved) {
            for (auto& a : assign) a = -1;  // reassign everyone next sweep
            continue;
        }
        if (!changed) break;
    }

    // Final sweep so members always reflect the final centroid set.
    for (std::size_t i = 0; i < alive; ++i) {
        const Vec2 pos = st.nodes[static_cast<std::size_t>(alive_ids[i])].kin.pos;
        int best = 0;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < centroids.size(); ++c) {
            const double d2 = dist2(pos, centroids[c]);
            if (d2 < best_d2) {
                best_d2 = d2;
                best = static_cast<int>(c);
            }
        }
        assign[i] = best;
    }

    // CH per cluster: highest energy among members not CH in the previous
    // epoch (relaxed to all members when none qualify); ties toward the
    // centroid, then the lower id.
    std::vector<std::vector<int>> members(centroids.size());
    for (std::size_t i = 0; i < alive; ++i) {
        members[static_cast<std::size_t>(assign[i])].push_back(alive_ids[i]);
    }

    std::vector<int> new_chs;
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        if (members[c].empty()) continue;

        auto pick_from = [&](bool rotation) -> int {
            int best = -1;
            for (int id : members[c]) {
                const auto& n = st.nodes[static_cast<std::size_t>(id)];
                if (rotation && n.was_ch_last_epoch) continue;
                if (best < 0) {
                    best = id;
                    continue;
                }
                const auto& b = st.nodes[static_cast<std::size_t>(best)];
                if (n.energy > b.energy) {
                    best = id;
                } else if (n.energy == b.energy) {
                    const double dn = dist2(n.kin.pos, centroids[c]);
                    const double db = dist2(b.kin.pos, centroids[c]);
                    if (dn < db || (dn == db && id < best)) best = id;
                }
            }
            return best;
        };
        int ch = pick_from(true);
        if (ch < 0) ch = pick_from(false);

        net::Cluster cluster;
        cluster.id = static_cast<int>(st.clusters.size());
        cluster.ch = ch;
        cluster.members = members[c];
        std::sort(cluster.members.begin(), cluster.members.end());
        cluster.anchor_fog =
            nearest_fog_id(st, st.nodes[static_cast<std::size_t>(ch)].kin.pos);
        cluster.ch_grade = 0.0;
        for (int id : cluster.members) {
            auto& n = st.nodes[static_cast<std::size_t>(id)];
            n.memberships.push_back(cluster.id);
            n.primary_ch = ch;
        }
        new_chs.push_back(ch);
        st.clusters.push_back(std::move(cluster));
    }

    for (auto& n : st.nodes) n.was_ch_last_epoch = false;
    for (int ch : new_chs) st.nodes[static_cast<std::size_t>(ch)].was_ch_last_epoch = true;
}

}  // namespace

RoundEvents eecrp_round(SimState& st, const SimParams& p) {
    RoundEvents ev;
    const double t0 = st.clock.time;
    const double bits = p.packet_bits;

    if (st.clock.round % p.protocol.epoch_len == 0) {
        prepare_epoch(ProtocolKind::Eecrp, st, p, ev);
    }

    // --- members report to their cluster head -----------------------------
    std::vector<BufferedReport> buffered;
    for (auto& n : st.nodes) {
        if (!n.alive) continue;
        for (int k = 0; k < p.protocol.rate; ++k) {
            RequestOutcome out;
            out.request_id = st.next_request_id++;
            out.origin = n.id;
            out.created_at = t0;
            out.route.push_back(RouteEntry::sensor(n.id));

            const int ch = n.primary_ch;
            if (ch < 0 || !st.nodes[static_cast<std::size_t>(ch)].alive) {
                out.cause = LossCause::NoAliveCh;
                ev.outcomes.push_back(std::move(out));
                continue;
            }
            double arrival = t0;
            if (ch != n.id) {
                const double d =
                    dist(n.kin.pos, st.nodes[static_cast<std::size_t>(ch)].kin.pos);
                charge(st, ev, n.id, radio::tx_energy(bits, d, p.radio));
                charge(st, ev, ch, radio::rx_energy(bits, p.radio));
                arrival = t0 + sim::hop_delay(bits, d, p.delay, 0.0);
                out.route.push_back(RouteEntry::sensor(ch));
            }
            const std::size_t idx = ev.outcomes.size();
            ev.outcomes.push_back(std::move(out));
            buffered.push_back({ev.outcomes[idx].request_id, idx, n.id, ch, arrival});
        }
    }

    // --- CH aggregation toward the nearest fog, fog relays to the cloud ---
    struct Uplink {
        double arrival;
        int seq;
        std::vector<ReqRef> requests;
    };
    std::map<int, std::vector<Uplink>> fog_arrivals;
    int seq = 0;
    for (const auto& cluster : st.clusters) {
        const auto& ch = st.nodes[static_cast<std::size_t>(cluster.ch)];
        if (!ch.alive) continue;

        std::vector<const BufferedReport*> mine;
        double latest = t0;
        for (const auto& b : buffered) {
            if (b.ch != cluster.ch) continue;
            mine.push_back(&b);
            latest = std::max(latest, b.arrival);
        }
        if (mine.empty()) continue;

        charge(st, ev, cluster.ch,
               radio::aggregation_energy(bits, static_cast<double>(mine.size()), p.radio));
        const net::FogNode& fnode = fog_by_id(st, cluster.anchor_fog);
        const double d = dist(ch.kin.pos, fnode.kin.pos);
        const double out_bits = agg_bits_for(p, mine.size());
        charge(st, ev, cluster.ch, radio::tx_energy(out_bits, d, p.radio));

        Uplink up;
        up.arrival = latest + sim::hop_delay(out_bits, d, p.delay, 0.0);
        up.seq = seq++;
        for (const auto* b : mine) {
            up.requests.push_back(
                {b->request_id, b->out_idx, b->origin, cluster.ch, fnode.id});
            ev.outcomes[b->out_idx].route.push_back(RouteEntry::fog(fnode.id));
        }
        fog_arrivals[fnode.id].push_back(std::move(up));
    }

    struct CloudArrival {
        double arrival;
        int seq;
        std::vector<ReqRef> requests;
    };
    std::vector<CloudArrival> cloud_arrivals;
    for (auto& [fid, ups] : fog_arrivals) {
        std::sort(ups.begin(), ups.end(), [](const Uplink& a, const Uplink& b) {
            if (a.arrival != b.arrival) return a.arrival < b.arrival;
            return a.seq < b.seq;
        });
        std::vector<double> arrivals;
        arrivals.reserve(ups.size());
        for (const auto& u : ups) arrivals.push_back(u.arrival);
        const std::vector<double> deps = sim::fifo_departures(
            st.fog_queues[static_cast<std::size_t>(fid)], arrivals, p.delay.fog_service_s);
        const Vec2 fpos = fog_by_id(st, fid).kin.pos;
        for (std::size_t i = 0; i < ups.size(); ++i) {
            for (const auto& rr : ups[i].requests) {
                ev.outcomes[rr.out_idx].route.push_back(RouteEntry::cloud());
            }
            cloud_arrivals.push_back(
                {deps[i] + sim::hop_delay(agg_bits_for(p, ups[i].requests.size()),
                                          dist(fpos, st.cloud_pos), p.delay, 0.0),
                 ups[i].seq, std::move(ups[i].requests)});
        }
    }

    std::sort(cloud_arrivals.begin(), cloud_arrivals.end(),
              [](const CloudArrival& a, const CloudArrival& b) {
                  if (a.arrival != b.arrival) return a.arrival < b.arrival;
                  return a.seq < b.seq;
              });
    std::vector<double> arrivals;
    arrivals.reserve(cloud_arrivals.size());
    for (const auto& c : cloud_arrivals) arrivals.push_back(c.arrival);
    const std::vector<double> deps =
        sim::fifo_departures(st.cloud_queue, arrivals, p.delay.cloud_service_s);

    for (std::size_t i = 0; i < cloud_arrivals.size(); ++i) {
        for (const auto& rr : cloud_arrivals[i].requests) {
            auto& out = ev.outcomes[rr.out_idx];
            out.e2e_delay = cloud_arrivals[i].arrival - out.created_at;
            const double t = retrace_response(st, ev, p, bits, out.route, deps[i]);
            out.delivered = true;
            out.cloud_answered = true;
            out.response_time = t - out.created_at;
        }
    }
    return ev;
}

void prepare_epoch(ProtocolKind kind, SimState& st, const SimParams& p, RoundEvents& ev) {
    switch (kind) {
        case ProtocolKind::Mfct: {
            const int epoch = st.clock.round / p.protocol.epoch_len;
            run_mfct_elections(st, p, epoch, ev);
            return;
        }
        case ProtocolKind::Ergid: {
            st.ergid.alive.assign(st.nodes.size(), 0);
            st.ergid.energy.assign(st.nodes.size(), 0.0);
            for (std::size_t i = 0; i < st.nodes.size(); ++i) {
                st.ergid.alive[i] = st.nodes[i].alive ? 1 : 0;
                st.ergid.energy[i] = st.nodes[i].energy;
            }
            st.ergid.valid = true;
            return;
        }
        case ProtocolKind::Eecrp:
            eecrp_recluster(st, p);
            return;
    }
    throw InvalidParameter("unknown protocol kind");
}

RoundEvents run_round(ProtocolKind kind, SimState& st, const SimParams& p,
                      const RoundHooks& hooks) {
    switch (kind) {
        case ProtocolKind::Mfct:
            return mfct_round(st, p, hooks);
        case ProtocolKind::Ergid:
            return ergid_round(st, p);
        case ProtocolKind::Eecrp:
            return eecrp_round(st, p);
    }
    throw InvalidParameter("unknown protocol kind");
}

void apply_round_end_deaths(SimState& st) {
    for (auto& n : st.nodes) {
        if (n.alive && n.energy <= 0.0) {
            n.alive = false;
            n.memberships.clear();
            n.primary_ch = -1;
        }
    }
}

}  // namespace mfct::proto
