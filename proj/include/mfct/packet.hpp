#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace mfct {

enum class PacketKind { SensorReport, Aggregate, FogMerged, Response };

// One traversal step; Cloud entries carry no id.
struct RouteEntry {
    enum class Kind { Sensor, Fog, Cloud };
    Kind kind = Kind::Sensor;
    int id = -1;

    static RouteEntry sensor(int id) { return {Kind::Sensor, id}; }
    static RouteEntry fog(int id) { return {Kind::Fog, id}; }
    static RouteEntry cloud() { return {Kind::Cloud, -1}; }

    friend bool operator==(const RouteEntry& a, const RouteEntry& b) {
        return a.kind == b.kind && a.id == b.id;
    }
};

struct Packet {
    PacketKind kind = PacketKind::SensorReport;
    std::vector<std::uint64_t> request_ids;  // multiset, kept sorted
    double bits = 0.0;
    double created_at = 0.0;  // min over merged inputs for delay accounting
    std::vector<RouteEntry> route;

    std::size_t hops() const { return route.size(); }
};

}  // namespace mfct
