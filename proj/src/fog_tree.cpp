#include "mfct/fog_tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "mfct/errors.hpp"
#include "mfct/instrumentation.hpp"

namespace mfct::fog {

namespace {

// Spread the low 16 bits of v across the even bit positions.
std::uint32_t interleave16(std::uint32_t v) {
    v &= 0xffff;
    v = (v | (v << 8)) & 0x00ff00ff;
    v = (v | (v << 4)) & 0x0f0f0f0f;
    v = (v | (v << 2)) & 0x33333333;
    v = (v | (v << 1)) & 0x55555555;
    return v;
}

std::uint32_t morton_code(std::uint32_t qx, std::uint32_t qy) {
    return interleave16(qx) | (interleave16(qy) << 1);
}

// Quantize positions onto a 2^16 lattice spanning the fogs' bounding box.
std::uint32_t quantize(double v, double lo, double hi) {
    if (hi <= lo) return 0;
    double t = (v - lo) / (hi - lo);
    t = std::clamp(t, 0.0, 1.0);
    return static_cast<std::uint32_t>(t * 65535.0);
}

}  // namespace

int FogTree::depth(int fog_id) const {
    auto it = parent_of.find(fog_id);
    if (it == parent_of.end()) throw UnknownFog("unknown fog id " + std::to_string(fog_id));
    int d = 1;
    while (it->second != kCloudRoot) {
        it = parent_of.find(it->second);
        ++d;
    }
    return d;
}

int FogTree::height() const {
    int h = 0;
    for (int id : level_order) h = std::max(h, depth(id));
    return h;
}

FogTree build_tree(const std::vector<net::FogNode>& fogs, int k) {
    if (k < 2) throw InvalidTopology("branching factor must be >= 2");
    if (fogs.empty()) throw InvalidTopology("cannot build a tree from zero fogs");

    std::set<int> seen;
    for (const auto& f : fogs) {
        if (!seen.insert(f.id).second) {
            throw InvalidTopology("duplicate fog id " + std::to_string(f.id));
        }
    }

    double lox = std::numeric_limits<double>::infinity(), hix = -lox;
    double loy = lox, hiy = -lox;
    for (const auto& f : fogs) {
        lox = std::min(lox, f.kin.pos.x);
        hix = std::max(hix, f.kin.pos.x);
        loy = std::min(loy, f.kin.pos.y);
        hiy = std::max(hiy, f.kin.pos.y);
    }

    struct Keyed {
        std::uint32_t code;
        int id;
    };
    std::vector<Keyed> keyed;
    keyed.reserve(fogs.size());
    for (const auto& f : fogs) {
        keyed.push_back({morton_code(quantize(f.kin.pos.x, lox, hix),
                                     quantize(f.kin.pos.y, loy, hiy)),
                         f.id});
    }
    std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
        if (a.code != b.code) return a.code < b.code;
        return a.id < b.id;
    });

    FogTree tree;
    tree.branching = k;
    tree.level_order.reserve(keyed.size());
    for (const auto& e : keyed) tree.level_order.push_back(e.id);

    // Level-order complete fill: slot i's parent sits at slot (i-1)/k.
    for (std::size_t i = 0; i < tree.level_order.size(); ++i) {
        const int id = tree.level_order[i];
        tree.children_of[id];  // ensure entry exists
        if (i == 0) {
            tree.parent_of[id] = kCloudRoot;
        } else {
            const int parent = tree.level_order[(i - 1) / static_cast<std::size_t>(k)];
            tree.parent_of[id] = parent;
            tree.children_of[parent].push_back(id);
        }
    }
    return tree;
}

std::vector<int> path_to_root(const FogTree& tree, int fog_id) {
    auto it = tree.parent_of.find(fog_id);
    if (it == tree.parent_of.end()) {
        throw UnknownFog("unknown fog id " + std::to_string(fog_id));
    }
    std::vector<int> path;
    int cur = it->second;
    while (cur != kCloudRoot) {
        path.push_back(cur);
        cur = tree.parent_of.at(cur);
    }
    path.push_back(kCloudRoot);
    return path;
}

Packet merge_payloads(const std::vector<Packet>& packets, double out_bits) {
    instrument::merge_calls.fetch_add(1, std::memory_order_relaxed);
    if (packets.empty()) throw EmptyMerge("merge_payloads on empty input");

    Packet out;
    out.kind = PacketKind::FogMerged;
    out.bits = out_bits;
    out.created_at = std::numeric_limits<double>::infinity();
    for (const auto& p : packets) {
        out.created_at = std::min(out.created_at, p.created_at);
        out.request_ids.insert(out.request_ids.end(), p.request_ids.begin(),
                               p.request_ids.end());
    }
    std::sort(out.request_ids.begin(), out.request_ids.end());
    return out;
}

std::string dump_text(const FogTree& tree, const std::vector<net::FogNode>& fogs) {
    std::map<int, const net::FogNode*> by_id;
    for (const auto& f : fogs) by_id[f.id] = &f;

    std::ostringstream os;
    os << "cloud\n";

    // Depth-first from the root fog, children in stored (Morton) order.
    struct Frame {
        int id;
        int indent;
    };
    std::vector<Frame> stack;
    if (!tree.level_order.empty()) stack.push_back({tree.level_order.front(), 1});
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        for (int i = 0; i < f.indent; ++i) os << "  ";
        os << "fog " << f.id;
        if (auto it = by_id.find(f.id); it != by_id.end()) {
            char buf[64];
            std::snprintf(buf, sizeof buf, " (%.1f, %.1f)", it->second->kin.pos.x,
                          it->second->kin.pos.y);
            os << buf;
        }
        os << "\n";
        const auto& kids = tree.children_of.at(f.id);
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
            stack.push_back({*it, f.indent + 1});
        }
    }
    return os.str();
}

}  // namespace mfct::fog
