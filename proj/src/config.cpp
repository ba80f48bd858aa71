#include "mfct/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "mfct/errors.hpp"

namespace mfct::cfg {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// Raw key -> value map with "section.key" paths.
std::map<std::string, std::string> tokenize(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ParseError("line " + std::to_string(lineno) + ": unterminated section");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) {
                throw ParseError("line " + std::to_string(lineno) + ": empty section name");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ParseError("line " + std::to_string(lineno) + ": empty key");
        }
        const std::string path = section.empty() ? key : section + "." + key;
        if (!kv.emplace(path, value).second) {
            throw ParseError("duplicate key " + path);
        }
    }
    return kv;
}

double parse_double(const std::string& path, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing junk");
        return d;
    } catch (const std::exception&) {
        throw ConfigError(path, "expected a number, got '" + v + "'");
    }
}

int parse_int(const std::string& path, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long n = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing junk");
        return static_cast<int>(n);
    } catch (const std::exception&) {
        throw ConfigError(path, "expected an integer, got '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& path, const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long n = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing junk");
        return static_cast<std::uint64_t>(n);
    } catch (const std::exception&) {
        throw ConfigError(path, "expected an unsigned integer, got '" + v + "'");
    }
}

bool parse_bool(const std::string& path, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(path, "expected true/false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& path, const std::string& v) {
    if (v.size() < 2 || v.front() != '[' || v.back() != ']') {
        throw ConfigError(path, "expected a [a, b, ...] list, got '" + v + "'");
    }
    std::vector<double> out;
    const std::string body = trim(v.substr(1, v.size() - 2));
    if (body.empty()) return out;
    std::istringstream in(body);
    std::string item;
    while (std::getline(in, item, ',')) {
        out.push_back(parse_double(path, trim(item)));
    }
    return out;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& xs) {
    std::string s = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ", ";
        s += fmt_double(xs[i]);
    }
    return s + "]";
}

std::string fmt_list(const std::vector<int>& xs) {
    std::string s = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(xs[i]);
    }
    return s + "]";
}

double overlap_area(const Rect& a, const Rect& b) {
    const double w = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
    const double h = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
    return (w > 0.0 && h > 0.0) ? w * h : 0.0;
}

// Grid factorization closest to square, columns >= rows.
std::pair<int, int> grid_shape(int count) {
    int rows = 1;
    for (int r = 1; r * r <= count; ++r) {
        if (count % r == 0) rows = r;
    }
    return {rows, count / rows};
}

}  // namespace

const char* protocol_name(ProtocolKind k) {
    switch (k) {
        case ProtocolKind::Mfct:
            return "mfct";
        case ProtocolKind::Ergid:
            return "ergid";
        case ProtocolKind::Eecrp:
            return "eecrp";
    }
    return "?";
}

ProtocolKind protocol_from_name(const std::string& name) {
    if (name == "mfct") return ProtocolKind::Mfct;
    if (name == "ergid") return ProtocolKind::Ergid;
    if (name == "eecrp") return ProtocolKind::Eecrp;
    throw ConfigError("protocol", "unknown protocol '" + name + "' (mfct|ergid|eecrp)");
}

ScenarioConfig parse_config(const std::string& text) {
    auto kv = tokenize(text);
    ScenarioConfig c;

    auto take = [&](const char* path) -> std::optional<std::string> {
        auto it = kv.find(path);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto num = [&](const char* path, double& dst) {
        if (auto v = take(path)) dst = parse_double(path, *v);
    };
    auto integer = [&](const char* path, int& dst) {
        if (auto v = take(path)) dst = parse_int(path, *v);
    };
    auto boolean = [&](const char* path, bool& dst) {
        if (auto v = take(path)) dst = parse_bool(path, *v);
    };

    if (auto v = take("protocol")) c.protocol = protocol_from_name(*v);
    integer("node_count", c.node_count);
    integer("rounds", c.params.rounds);
    if (auto v = take("seed")) c.params.seed = parse_u64("seed", *v);
    num("round_duration_s", c.params.round_duration_s);
    num("initial_energy_j", c.params.initial_energy_j);
    num("packet_bits", c.params.packet_bits);
    num("max_speed_mps", c.max_speed_mps);
    integer("tree_branching", c.tree_branching);
    if (auto v = take("rate_scenarios")) {
        c.rate_scenarios.clear();
        for (double d : parse_list("rate_scenarios", *v)) {
            c.rate_scenarios.push_back(static_cast<int>(d));
        }
    }
    if (auto v = take("out_dir")) c.out_dir = *v;

    num("field.width_m", c.params.field.w);
    num("field.height_m", c.params.field.h);

    integer("fog.count", c.fog_count);
    if (auto v = take("fog.placement")) {
        if (*v == "grid") {
            c.fog_placement = FogPlacement::Grid;
        } else if (*v == "explicit") {
            c.fog_placement = FogPlacement::Explicit;
        } else {
            throw ConfigError("fog.placement", "expected grid or explicit, got '" + *v + "'");
        }
    }
    if (auto v = take("fog.positions")) {
        const auto xs = parse_list("fog.positions", *v);
        if (xs.size() % 2 != 0) {
            throw ConfigError("fog.positions", "expected x,y pairs");
        }
        c.fog_positions.clear();
        for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
            c.fog_positions.push_back({xs[i], xs[i + 1]});
        }
    }
    if (auto v = take("fog.regions")) {
        const auto xs = parse_list("fog.regions", *v);
        if (xs.size() % 4 != 0) {
            throw ConfigError("fog.regions", "expected x,y,w,h quads");
        }
        c.fog_regions.clear();
        for (std::size_t i = 0; i + 3 < xs.size(); i += 4) {
            c.fog_regions.push_back({xs[i], xs[i + 1], xs[i + 2], xs[i + 3]});
        }
    }

    {
        Vec2 cp;
        bool has_x = false, has_y = false;
        if (auto v = take("cloud.x_m")) {
            cp.x = parse_double("cloud.x_m", *v);
            has_x = true;
        }
        if (auto v = take("cloud.y_m")) {
            cp.y = parse_double("cloud.y_m", *v);
            has_y = true;
        }
        if (has_x != has_y) {
            throw ConfigError("cloud", "cloud.x_m and cloud.y_m must be given together");
        }
        if (has_x) c.cloud_pos = cp;
    }

    num("radio.e_elec_j_per_bit", c.params.radio.e_elec);
    num("radio.eps_fs_j_per_bit_m2", c.params.radio.eps_fs);
    num("radio.eps_mp_j_per_bit_m4", c.params.radio.eps_mp);
    num("radio.e_da_j_per_bit", c.params.radio.e_da);
    num("radio.tx_power_dbm", c.params.radio.tx_power_dbm);
    num("radio.pl_ref_db", c.params.radio.pl_ref_db);
    num("radio.pl_exponent", c.params.radio.pl_exponent);
    num("radio.noise_floor_dbm", c.params.radio.noise_floor_dbm);
    boolean("radio.shadowing", c.params.shadowing);
    num("radio.shadowing_sigma_db", c.params.shadowing_sigma_db);

    num("delay.bandwidth_bps", c.params.delay.bandwidth_bps);
    num("delay.propagation_mps", c.params.delay.propagation_mps);
    num("delay.fog_service_s", c.params.delay.fog_service_s);
    num("delay.cloud_service_s", c.params.delay.cloud_service_s);

    num("grey.rho", c.params.grey_params.rho);
    if (auto v = take("grey.weights")) {
        const auto xs = parse_list("grey.weights", *v);
        if (xs.size() != c.params.criteria_weights.size()) {
            throw ConfigError("grey.weights", "expected exactly 5 weights");
        }
        std::copy(xs.begin(), xs.end(), c.params.criteria_weights.begin());
    }

    num("protocol.p_hit", c.params.protocol.p_hit);
    integer("protocol.rate", c.params.protocol.rate);
    num("protocol.energy_threshold_frac", c.params.protocol.energy_threshold_frac);
    num("protocol.p_ch", c.params.protocol.p_ch);
    num("protocol.comm_radius_m", c.params.protocol.comm_radius_m);
    const bool cluster_radius_given = kv.count("protocol.cluster_radius_m") != 0;
    num("protocol.cluster_radius_m", c.params.protocol.cluster_radius_m);
    if (!cluster_radius_given) {
        c.params.protocol.cluster_radius_m = c.params.protocol.comm_radius_m;
    }
    integer("protocol.epoch_len", c.params.protocol.epoch_len);
    integer("protocol.hop_cap", c.params.protocol.hop_cap);
    boolean("protocol.merge_concat", c.params.protocol.merge_concat);
    boolean("protocol.random_ch_ablation", c.params.protocol.random_ch_ablation);

    if (!kv.empty()) {
        throw ConfigError(kv.begin()->first, "unknown key");
    }

    validate(c);
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize(const ScenarioConfig& c) {
    std::ostringstream os;
    os << "protocol = " << protocol_name(c.protocol) << "\n";
    os << "node_count = " << c.node_count << "\n";
    os << "rounds = " << c.params.rounds << "\n";
    os << "seed = " << c.params.seed << "\n";
    os << "round_duration_s = " << fmt_double(c.params.round_duration_s) << "\n";
    os << "initial_energy_j = " << fmt_double(c.params.initial_energy_j) << "\n";
    os << "packet_bits = " << fmt_double(c.params.packet_bits) << "\n";
    os << "max_speed_mps = " << fmt_double(c.max_speed_mps) << "\n";
    os << "tree_branching = " << c.tree_branching << "\n";
    os << "rate_scenarios = " << fmt_list(c.rate_scenarios) << "\n";
    os << "out_dir = " << c.out_dir << "\n";
    os << "\n[field]\n";
    os << "width_m = " << fmt_double(c.params.field.w) << "\n";
    os << "height_m = " << fmt_double(c.params.field.h) << "\n";
    os << "\n[fog]\n";
    os << "count = " << c.fog_count << "\n";
    os << "placement = " << (c.fog_placement == FogPlacement::Grid ? "grid" : "explicit")
       << "\n";
    if (!c.fog_positions.empty()) {
        std::vector<double> xs;
        for (const auto& p : c.fog_positions) {
            xs.push_back(p.x);
            xs.push_back(p.y);
        }
        os << "positions = " << fmt_list(xs) << "\n";
    }
    if (!c.fog_regions.empty()) {
        std::vector<double> xs;
        for (const auto& r : c.fog_regions) {
            xs.push_back(r.x);
            xs.push_back(r.y);
            xs.push_back(r.w);
            xs.push_back(r.h);
        }
        os << "regions = " << fmt_list(xs) << "\n";
    }
    if (c.cloud_pos) {
        os << "\n[cloud]\n";
        os << "x_m = " << fmt_double(c.cloud_pos->x) << "\n";
        os << "y_m = " << fmt_double(c.cloud_pos->y) << "\n";
    }
    os << "\n[radio]\n";
    os << "e_elec_j_per_bit = " << fmt_double(c.params.radio.e_elec) << "\n";
    os << "eps_fs_j_per_bit_m2 = " << fmt_double(c.params.radio.eps_fs) << "\n";
    os << "eps_mp_j_per_bit_m4 = " << fmt_double(c.params.radio.eps_mp) << "\n";
    os << "e_da_j_per_bit = " << fmt_double(c.params.radio.e_da) << "\n";
    os << "tx_power_dbm = " << fmt_double(c.params.radio.tx_power_dbm) << "\n";
    os << "pl_ref_db = " << fmt_double(c.params.radio.pl_ref_db) << "\n";
    os << "pl_exponent = " << fmt_double(c.params.radio.pl_exponent) << "\n";
    os << "noise_floor_dbm = " << fmt_double(c.params.radio.noise_floor_dbm) << "\n";
    os << "shadowing = " << (c.params.shadowing ? "true" : "false") << "\n";
    os << "shadowing_sigma_db = " << fmt_double(c.params.shadowing_sigma_db) << "\n";
    os << "\n[delay]\n";
    os << "bandwidth_bps = " << fmt_double(c.params.delay.bandwidth_bps) << "\n";
    os << "propagation_mps = " << fmt_double(c.params.delay.propagation_mps) << "\n";
    os << "fog_service_s = " << fmt_double(c.params.delay.fog_service_s) << "\n";
    os << "cloud_service_s = " << fmt_double(c.params.delay.cloud_service_s) << "\n";
    os << "\n[grey]\n";
    os << "rho = " << fmt_double(c.params.grey_params.rho) << "\n";
    os << "weights = "
       << fmt_list(std::vector<double>(c.params.criteria_weights.begin(),
                                       c.params.criteria_weights.end()))
       << "\n";
    os << "\n[protocol]\n";
    os << "p_hit = " << fmt_double(c.params.protocol.p_hit) << "\n";
    os << "rate = " << c.params.protocol.rate << "\n";
    os << "energy_threshold_frac = " << fmt_double(c.params.protocol.energy_threshold_frac)
       << "\n";
    os << "p_ch = " << fmt_double(c.params.protocol.p_ch) << "\n";
    os << "comm_radius_m = " << fmt_double(c.params.protocol.comm_radius_m) << "\n";
    os << "cluster_radius_m = " << fmt_double(c.params.protocol.cluster_radius_m) << "\n";
    os << "epoch_len = " << c.params.protocol.epoch_len << "\n";
    os << "hop_cap = " << c.params.protocol.hop_cap << "\n";
    os << "merge_concat = " << (c.params.protocol.merge_concat ? "true" : "false") << "\n";
    os << "random_ch_ablation = "
       << (c.params.protocol.random_ch_ablation ? "true" : "false") << "\n";
    return os.str();
}

void validate(const ScenarioConfig& c) {
    auto require = [](bool ok, const char* path, const char* msg) {
        if (!ok) throw ConfigError(path, msg);
    };

    require(c.node_count >= 1, "node_count", "must be >= 1");
    require(c.fog_count >= 1, "fog.count", "must be >= 1");
    require(c.params.rounds >= 0, "rounds", "must be >= 0");
    require(c.params.round_duration_s > 0.0, "round_duration_s", "must be > 0");
    require(c.params.initial_energy_j > 0.0, "initial_energy_j", "must be > 0");
    require(c.params.packet_bits > 0.0, "packet_bits", "must be > 0");
    require(c.max_speed_mps >= 0.0, "max_speed_mps", "must be >= 0");
    require(c.tree_branching >= 2, "tree_branching", "must be >= 2");
    require(c.params.field.w > 0.0, "field.width_m", "must be > 0");
    require(c.params.field.h > 0.0, "field.height_m", "must be > 0");
    for (int r : c.rate_scenarios) {
        require(r >= 1, "rate_scenarios", "every rate must be >= 1");
    }

    const auto& rp = c.params.radio;
    require(rp.e_elec > 0.0, "radio.e_elec_j_per_bit", "must be > 0");
    require(rp.eps_fs > 0.0, "radio.eps_fs_j_per_bit_m2", "must be > 0");
    require(rp.eps_mp > 0.0, "radio.eps_mp_j_per_bit_m4", "must be > 0");
    require(rp.e_da > 0.0, "radio.e_da_j_per_bit", "must be > 0");
    require(rp.pl_exponent >= 2.0, "radio.pl_exponent", "must be >= 2");
    require(c.params.shadowing_sigma_db >= 0.0, "radio.shadowing_sigma_db", "must be >= 0");

    const auto& dp = c.params.delay;
    require(dp.bandwidth_bps > 0.0, "delay.bandwidth_bps", "must be > 0");
    require(dp.propagation_mps > 0.0, "delay.propagation_mps", "must be > 0");
    require(dp.fog_service_s > 0.0, "delay.fog_service_s", "must be > 0");
    require(dp.cloud_service_s > 0.0, "delay.cloud_service_s", "must be > 0");

    require(c.params.grey_params.rho > 0.0 && c.params.grey_params.rho <= 1.0, "grey.rho",
            "must be in (0, 1]");
    double wsum = 0.0;
    for (double w : c.params.criteria_weights) {
        require(w >= 0.0, "grey.weights", "weights must be >= 0");
        wsum += w;
    }
    require(std::fabs(wsum - 1.0) <= 1e-9, "grey.weights", "weights must sum to 1");

    const auto& pc = c.params.protocol;
    require(pc.p_hit >= 0.0 && pc.p_hit <= 1.0, "protocol.p_hit", "must be in [0, 1]");
    require(pc.rate >= 1, "protocol.rate", "must be >= 1");
    require(pc.energy_threshold_frac >= 0.0 && pc.energy_threshold_frac < 1.0,
            "protocol.energy_threshold_frac", "must be in [0, 1)");
    require(pc.p_ch > 0.0 && pc.p_ch <= 1.0, "protocol.p_ch", "must be in (0, 1]");
    require(pc.comm_radius_m > 0.0, "protocol.comm_radius_m", "must be > 0");
    require(pc.cluster_radius_m > 0.0, "protocol.cluster_radius_m", "must be > 0");
    require(pc.epoch_len >= 1, "protocol.epoch_len", "must be >= 1");
    require(pc.hop_cap >= 1, "protocol.hop_cap", "must be >= 1");

    if (c.fog_placement == FogPlacement::Explicit) {
        require(static_cast<int>(c.fog_positions.size()) == c.fog_count, "fog.positions",
                "need exactly fog.count positions");
        require(static_cast<int>(c.fog_regions.size()) == c.fog_count, "fog.regions",
                "need exactly fog.count regions");
        const Rect field = c.params.field;
        double area = 0.0;
        for (std::size_t i = 0; i < c.fog_regions.size(); ++i) {
            const Rect& r = c.fog_regions[i];
            require(r.w > 0.0 && r.h > 0.0, "fog.regions", "regions must have positive size");
            require(r.x >= field.x - 1e-9 && r.y >= field.y - 1e-9 &&
                        r.x + r.w <= field.x + field.w + 1e-9 &&
                        r.y + r.h <= field.y + field.h + 1e-9,
                    "fog.regions", "region extends beyond the field");
            area += r.area();
            for (std::size_t j = i + 1; j < c.fog_regions.size(); ++j) {
                require(overlap_area(r, c.fog_regions[j]) <= 1e-9, "fog.regions",
                        "regions overlap");
            }
        }
        require(std::fabs(area - field.area()) <= 1e-6 * field.area(), "fog.regions",
                "regions do not tile the field");
        for (std::size_t i = 0; i < c.fog_positions.size(); ++i) {
            require(c.fog_regions[i].contains(c.fog_positions[i]), "fog.positions",
                    "fog position must lie inside its region");
        }
    } else {
        require(c.fog_positions.empty() && c.fog_regions.empty(), "fog.placement",
                "positions/regions require placement = explicit");
    }
}

std::string config_hash(const ScenarioConfig& c) {
    const std::string s = serialize(c);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<net::FogNode> make_fog_nodes(const ScenarioConfig& c) {
    std::vector<net::FogNode> fogs;
    fogs.reserve(static_cast<std::size_t>(c.fog_count));
    if (c.fog_placement == FogPlacement::Explicit) {
        for (int i = 0; i < c.fog_count; ++i) {
            net::FogNode f;
            f.id = i;
            f.kin.pos = c.fog_positions[static_cast<std::size_t>(i)];
            f.region = c.fog_regions[static_cast<std::size_t>(i)];
            fogs.push_back(f);
        }
        return fogs;
    }

    const auto [rows, cols] = grid_shape(c.fog_count);
    const Rect field = c.params.field;
    const double cw = field.w / cols;
    const double chh = field.h / rows;
    for (int r = 0; r < rows; ++r) {
        for (int col = 0; col < cols; ++col) {
            net::FogNode f;
            f.id = r * cols + col;
            f.region = {field.x + col * cw, field.y + r * chh, cw, chh};
            f.kin.pos = f.region.center();
            fogs.push_back(f);
        }
    }
    return fogs;
}

}  // namespace mfct::cfg
