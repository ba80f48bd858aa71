#include "mfct/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "mfct/errors.hpp"
#include "mfct/rng.hpp"

namespace mfct::net {

namespace {

int nearest_fog(Vec2 p, const std::vector<FogNode>& fogs) {
    int best = fogs.front().id;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (const auto& f : fogs) {
        const double d2 = dist2(p, f.kin.pos);
        if (d2 < best_d2 || (d2 == best_d2 && f.id < best)) {
            best = f.id;
            best_d2 = d2;
        }
    }
    return best;
}

const FogNode& fog_by_id(const std::vector<FogNode>& fogs, int id) {
    for (const auto& f : fogs) {
        if (f.id == id) return f;
    }
    throw UnknownFog("unknown fog id " + std::to_string(id));
}

}  // namespace

std::optional<int> hop_count(const SensorNode& node, const std::vector<FogNode>& fogs,
                             const std::vector<SensorNode>& all_nodes,
                             double comm_radius) {
    if (!(comm_radius > 0.0)) throw InvalidParameter("comm_radius must be positive");
    if (!node.alive) throw DeadNode("hop_count on dead node " + std::to_string(node.id));

    const double r2 = comm_radius * comm_radius;

    // BFS over alive sensors; a fog within range of the frontier node
    // terminates with one extra hop.
    std::vector<int> hops(all_nodes.size(), -1);
    std::deque<int> frontier;

    auto fog_in_range = [&](Vec2 p) {
        for (const auto& f : fogs) {
            if (dist2(p, f.kin.pos) <= r2) return true;
        }
        return false;
    };

    hops[static_cast<std::size_t>(node.id)] = 0;
    frontier.push_back(node.id);
    while (!frontier.empty()) {
        const int cur = frontier.front();
        frontier.pop_front();
        const auto& cn = all_nodes[static_cast<std::size_t>(cur)];
        if (fog_in_range(cn.kin.pos)) {
            return hops[static_cast<std::size_t>(cur)] + 1;
        }
        for (const auto& other : all_nodes) {
            if (!other.alive || hops[static_cast<std::size_t>(other.id)] >= 0) continue;
            if (dist2(cn.kin.pos, other.kin.pos) <= r2) {
                hops[static_cast<std::size_t>(other.id)] =
                    hops[static_cast<std::size_t>(cur)] + 1;
                frontier.push_back(other.id);
            }
        }
    }
    return std::nullopt;
}

CriteriaVector criteria_for(const SensorNode& node, const std::vector<FogNode>& fogs,
                            const std::vector<SensorNode>& all_nodes,
                            const SimParams& p, int epoch) {
    if (!node.alive) throw DeadNode("criteria_for on dead node " + std::to_string(node.id));

    CriteriaVector c;
    c.e_re = node.energy;

    const FogNode& nf = fog_by_id(fogs, nearest_fog(node.kin.pos, fogs));
    c.d = dist(node.kin.pos, nf.kin.pos);

    const auto hc = hop_count(node, fogs, all_nodes, p.protocol.comm_radius_m);
    c.hc = hc ? static_cast<double>(*hc) : static_cast<double>(p.protocol.hop_cap);

    double let = radio::link_expiration_time(node.kin, nf.kin, p.protocol.comm_radius_m);
    c.let = std::min(let, p.duration_s());

    c.snr = radio::snr_db(c.d, p.radio);
    if (p.shadowing) {
        Rng shadow = derive_stream(p.seed, tags::kShadow | static_cast<std::uint64_t>(node.id),
                                   static_cast<std::uint64_t>(epoch));
        c.snr += shadow.gaussian() * p.shadowing_sigma_db;
    }
    return c;
}

ElectionResult elect_cluster_heads(const std::vector<int>& region_node_ids,
                                   const std::vector<SensorNode>& all_nodes,
                                   const std::vector<FogNode>& fogs,
                                   const FogNode& region_fog, const SimParams& p,
                                   int epoch) {
    if (region_node_ids.empty()) {
        throw EmptyRegion("no nodes in region of fog " + std::to_string(region_fog.id));
    }

    std::vector<int> candidates = region_node_ids;
    std::sort(candidates.begin(), candidates.end());

    ElectionResult result;
    const double threshold = p.energy_threshold_j();

    // Eligibility with staged relaxation: drop the rotation rule first,
    // then the energy threshold.
    std::vector<int> eligible;
    auto collect = [&](bool check_rotation, bool check_threshold) {
        eligible.clear();
        for (int id : candidates) {
            const auto& n = all_nodes[static_cast<std::size_t>(id)];
            if (!n.alive) continue;
            if (check_threshold && !(n.energy > threshold)) continue;
            if (check_rotation && n.was_ch_last_epoch) continue;
            eligible.push_back(id);
        }
    };
    collect(true, true);
    if (eligible.empty()) {
        collect(false, true);
        ++result.relaxations;
    }
    if (eligible.empty()) {
        collect(false, false);
        ++result.relaxations;
    }
    if (eligible.empty()) return result;  // region had no alive nodes

    const std::size_t want = std::min(
        eligible.size(),
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(
                                     p.protocol.p_ch * static_cast<double>(eligible.size())))));

    if (p.protocol.random_ch_ablation) {
        // Ablation branch for lifetime experiments: uniform choice among the
        // same eligible set, same count.
        Rng pick = derive_stream(p.seed, tags::kAblation | static_cast<std::uint64_t>(region_fog.id),
                                 static_cast<std::uint64_t>(epoch));
        std::vector<int> pool = eligible;
        for (std::size_t k = 0; k < want; ++k) {
            const std::size_t idx = k + static_cast<std::size_t>(pick.below(pool.size() - k));
            std::swap(pool[k], pool[idx]);
            result.chs.push_back(pool[k]);
            result.grade_of[pool[k]] = 1.0;  // no grade information in this mode
        }
        std::sort(result.chs.begin(), result.chs.end());
        return result;
    }

    grey::DecisionMatrix dm;
    dm.values = grey::Matrix(eligible.size(), 5);
    dm.directions = {grey::Direction::Benefit, grey::Direction::Cost,
                     grey::Direction::Cost, grey::Direction::Benefit,
                     grey::Direction::Benefit};
    dm.weights.assign(p.criteria_weights.begin(), p.criteria_weights.end());
    for (std::size_t i = 0; i < eligible.size(); ++i) {
        const auto& n = all_nodes[static_cast<std::size_t>(eligible[i])];
        const CriteriaVector c = criteria_for(n, fogs, all_nodes, p, epoch);
        dm.values.at(i, 0) = c.e_re;
        dm.values.at(i, 1) = c.hc;
        dm.values.at(i, 2) = c.d;
        dm.values.at(i, 3) = c.let;
        dm.values.at(i, 4) = c.snr;
    }

    const grey::Ranking ranking = grey::rank_matrix(dm, p.grey_params);
    for (std::size_t k = 0; k < want; ++k) {
        const int id = eligible[ranking.order[k]];
        result.chs.push_back(id);
        result.grade_of[id] = ranking.grades[ranking.order[k]];
    }
    std::sort(result.chs.begin(), result.chs.end());
    return result;
}

std::vector<Cluster> form_overlapping_clusters(const ElectionResult& election,
                                               std::vector<SensorNode>& nodes,
                                               const std::vector<FogNode>& fogs,
                                               double cluster_radius) {
    if (election.chs.empty()) throw InvalidParameter("cluster formation requires CHs");
    if (!(cluster_radius > 0.0)) throw InvalidParameter("cluster_radius must be positive");

    std::vector<Cluster> clusters;
    clusters.reserve(election.chs.size());
    std::map<int, int> cluster_of_ch;  // ch node id -> cluster id
    for (std::size_t i = 0; i < election.chs.size(); ++i) {
        const int ch = election.chs[i];
        Cluster c;
        c.id = static_cast<int>(i);
        c.ch = ch;
        c.members.push_back(ch);
        c.anchor_fog = region_of(nodes[static_cast<std::size_t>(ch)].kin.pos, fogs);
        c.ch_grade = election.grade_of.at(ch);
        cluster_of_ch[ch] = c.id;
        clusters.push_back(std::move(c));
    }

    for (auto& n : nodes) {
        n.memberships.clear();
        n.primary_ch = -1;
        if (!n.alive) continue;

        if (auto it = cluster_of_ch.find(n.id); it != cluster_of_ch.end()) {
            n.memberships.push_back(it->second);
            n.primary_ch = n.id;
            continue;
        }

        int best_ch = -1;
        double best_grade = -1.0;
        double best_dist = std::numeric_limits<double>::infinity();
        int nearest_ch = -1;
        double nearest_dist = std::numeric_limits<double>::infinity();

        for (const auto& c : clusters) {
            const auto& ch_node = nodes[static_cast<std::size_t>(c.ch)];
            const double d = dist(n.kin.pos, ch_node.kin.pos);
            if (d < nearest_dist || (d == nearest_dist && c.ch < nearest_ch)) {
                nearest_dist = d;
                nearest_ch = c.ch;
            }
            if (d > cluster_radius) continue;
            n.memberships.push_back(c.id);
            const double g = c.ch_grade;
            if (g > best_grade || (g == best_grade && d < best_dist) ||
                (g == best_grade && d == best_dist && c.ch < best_ch)) {
                best_grade = g;
                best_dist = d;
                best_ch = c.ch;
            }
        }

        if (n.memberships.empty()) {
            // Fallback: attach to the nearest CH regardless of radius.
            n.memberships.push_back(cluster_of_ch.at(nearest_ch));
            n.primary_ch = nearest_ch;
        } else {
            n.primary_ch = best_ch;
        }
        std::sort(n.memberships.begin(), n.memberships.end());
        for (int cid : n.memberships) {
            clusters[static_cast<std::size_t>(cid)].members.push_back(n.id);
        }
    }

    for (auto& c : clusters) std::sort(c.members.begin(), c.members.end());
    return clusters;
}

int region_of(Vec2 p, const std::vector<FogNode>& fogs) {
    for (const auto& f : fogs) {
        if (f.region.contains(p)) return f.id;
    }
    return nearest_fog(p, fogs);
}

}  // namespace mfct::net
