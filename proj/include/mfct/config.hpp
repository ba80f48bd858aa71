#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfct/node.hpp"
#include "mfct/params.hpp"

namespace mfct::cfg {

enum class FogPlacement { Grid, Explicit };

// Full experiment description. Defaults give a working desk-scale scenario:
// 100 nodes on a 200x200 m field, four fog regions, cloud at the center.
struct ScenarioConfig {
    ProtocolKind protocol = ProtocolKind::Mfct;
    int node_count = 100;
    int fog_count = 4;
    FogPlacement fog_placement = FogPlacement::Grid;
    std::vector<Vec2> fog_positions;  // explicit placement only
    std::vector<Rect> fog_regions;    // explicit placement only
    std::optional<Vec2> cloud_pos;    // defaults to the field center
    double max_speed_mps = 0.0;       // > 0 enables mobility
    int tree_branching = 2;
    std::vector<int> rate_scenarios{1, 2, 4, 8};
    std::string out_dir = "out";
    SimParams params;

    Vec2 cloud_position() const {
        return cloud_pos ? *cloud_pos : params.field.center();
    }
};

// Key-value text with [section] headers; every key optional, all defaults
// documented in serialize() output. Throws ParseError on malformed input,
// ConfigError (naming the field path) on invariant violations.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

// Canonical serialization: fixed key order, %.17g floats. parse(serialize(c))
// reproduces c exactly.
std::string serialize(const ScenarioConfig& c);

void validate(const ScenarioConfig& c);  // throws ConfigError

// FNV-1a over the canonical serialization, as 16 hex digits.
std::string config_hash(const ScenarioConfig& c);

// Fog nodes (position + region + id) for the configured placement.
std::vector<net::FogNode> make_fog_nodes(const ScenarioConfig& c);

const char* protocol_name(ProtocolKind k);
ProtocolKind protocol_from_name(const std::string& name);  // ConfigError on junk

}  // namespace mfct::cfg
