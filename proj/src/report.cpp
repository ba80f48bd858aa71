#include "mfct/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mfct/fog_tree.hpp"

namespace mfct::report {

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string fmt_csv_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string round_series_csv(const sim::MetricsReport& r) {
    std::ostringstream os;
    os << "round,time_s,pdr,mean_delay_s,mean_response_s,alive,energy_j\n";
    for (const auto& row : r.rounds) {
        os << row.round << ',' << fmt_csv_double(row.time_s) << ','
           << fmt_csv_double(row.pdr) << ',' << fmt_csv_double(row.mean_delay_s) << ','
           << fmt_csv_double(row.mean_response_s) << ',' << row.alive << ','
           << fmt_csv_double(row.energy_j) << '\n';
    }
    return os.str();
}

std::string summary_json(const sim::MetricsReport& r) {
    nlohmann::ordered_json j;
    j["fnd"] = r.fnd;
    j["hnd"] = r.hnd;
    j["lnd"] = r.lnd;
    j["pdr_total"] = r.pdr_total;
    j["mean_response_s"] = r.mean_response_s;
    j["mean_delay_s"] = r.mean_delay_s;
    j["energy_total_j"] = r.energy_total_j;
    j["seed"] = r.seed;
    j["config_hash"] = r.config_hash;
    j["zero_generated"] = r.zero_generated;
    return j.dump(2) + "\n";
}

std::string comparison_csv(const std::vector<CompareRow>& rows,
                           const std::vector<FailedRow>& failed) {
    std::ostringstream os;
    os << "protocol,seed,rate,status,fnd,hnd,lnd,pdr,mean_response_s,mean_delay_s,"
          "energy_j\n";

    // Rows are written sorted by (protocol, rate, seed) so re-running the
    // same invocation reproduces the file byte for byte.
    std::vector<const CompareRow*> ok;
    ok.reserve(rows.size());
    for (const auto& r : rows) ok.push_back(&r);
    std::sort(ok.begin(), ok.end(), [](const CompareRow* a, const CompareRow* b) {
        if (a->protocol != b->protocol) return a->protocol < b->protocol;
        if (a->rate != b->rate) return a->rate < b->rate;
        return a->seed < b->seed;
    });
    std::vector<const FailedRow*> bad;
    bad.reserve(failed.size());
    for (const auto& r : failed) bad.push_back(&r);
    std::sort(bad.begin(), bad.end(), [](const FailedRow* a, const FailedRow* b) {
        if (a->protocol != b->protocol) return a->protocol < b->protocol;
        if (a->rate != b->rate) return a->rate < b->rate;
        return a->seed < b->seed;
    });

    for (const auto* r : ok) {
        os << r->protocol << ',' << r->seed << ',' << r->rate << ",ok," << r->rep.fnd << ','
           << r->rep.hnd << ',' << r->rep.lnd << ',' << fmt_csv_double(r->rep.pdr_total)
           << ',' << fmt_csv_double(r->rep.mean_response_s) << ','
           << fmt_csv_double(r->rep.mean_delay_s) << ','
           << fmt_csv_double(r->rep.energy_total_j) << '\n';
    }
    for (const auto* r : bad) {
        std::string msg = r->error;
        std::replace(msg.begin(), msg.end(), ',', ';');
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        os << r->protocol << ',' << r->seed << ',' << r->rate << ",failed(" << msg
           << "),,,,,,,\n";
    }
    return os.str();
}

std::string median_table(const std::vector<CompareRow>& rows) {
    struct Key {
        std::string protocol;
        int rate;
        bool operator<(const Key& o) const {
            if (protocol != o.protocol) return protocol < o.protocol;
            return rate < o.rate;
        }
    };
    std::map<Key, std::vector<const CompareRow*>> groups;
    for (const auto& r : rows) groups[{r.protocol, r.rate}].push_back(&r);

    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-8s %5s %6s %7s %7s %9s %12s %12s %10s\n", "protocol",
                  "rate", "seeds", "fnd", "hnd", "pdr", "response_s", "delay_s", "energy_j");
    os << buf;
    for (const auto& [key, group] : groups) {
        std::vector<double> fnd, hnd, pdr, resp, delay, energy;
        for (const auto* r : group) {
            fnd.push_back(r->rep.fnd);
            hnd.push_back(r->rep.hnd);
            pdr.push_back(r->rep.pdr_total);
            resp.push_back(r->rep.mean_response_s);
            delay.push_back(r->rep.mean_delay_s);
            energy.push_back(r->rep.energy_total_j);
        }
        std::snprintf(buf, sizeof buf, "%-8s %5d %6zu %7.0f %7.0f %9.4f %12.6f %12.6f %10.4f\n",
                      key.protocol.c_str(), key.rate, group.size(), median_of(fnd),
                      median_of(hnd), median_of(pdr), median_of(resp), median_of(delay),
                      median_of(energy));
        os << buf;
    }
    return os.str();
}

std::string topology_json(const proto::SimState& st) {
    nlohmann::ordered_json j;

    nlohmann::ordered_json fogs = nlohmann::ordered_json::array();
    for (const auto& f : st.fogs) {
        nlohmann::ordered_json jf;
        jf["id"] = f.id;
        jf["x"] = f.kin.pos.x;
        jf["y"] = f.kin.pos.y;
        jf["region"] = {f.region.x, f.region.y, f.region.w, f.region.h};
        jf["parent"] = st.tree.contains(f.id) ? st.tree.parent_of.at(f.id) : fog::kCloudRoot;
        jf["children"] =
            st.tree.contains(f.id) ? st.tree.children_of.at(f.id) : std::vector<int>{};
        fogs.push_back(jf);
    }
    j["fogs"] = fogs;
    j["tree_branching"] = st.tree.branching;
    j["cloud"] = {st.cloud_pos.x, st.cloud_pos.y};

    // CH ids, for quick flagging below.
    std::set<int> chs;
    for (const auto& c : st.clusters) chs.insert(c.ch);

    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (const auto& n : st.nodes) {
        nlohmann::ordered_json jn;
        jn["id"] = n.id;
        jn["x"] = n.kin.pos.x;
        jn["y"] = n.kin.pos.y;
        jn["energy_j"] = n.energy;
        jn["alive"] = n.alive;
        jn["is_ch"] = chs.count(n.id) != 0;
        jn["memberships"] = n.memberships;
        jn["primary_ch"] = n.primary_ch;
        nodes.push_back(jn);
    }
    j["nodes"] = nodes;

    nlohmann::ordered_json clusters = nlohmann::ordered_json::array();
    for (const auto& c : st.clusters) {
        nlohmann::ordered_json jc;
        jc["id"] = c.id;
        jc["ch"] = c.ch;
        jc["anchor_fog"] = c.anchor_fog;
        jc["members"] = c.members;
        clusters.push_back(jc);
    }
    j["clusters"] = clusters;
    return j.dump(2) + "\n";
}

}  // namespace mfct::report
