#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mfct/config.hpp"
#include "mfct/engine.hpp"
#include "mfct/errors.hpp"
#include "mfct/grey.hpp"
#include "mfct/report.hpp"

namespace fs = std::filesystem;
using namespace mfct;

namespace {

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    bool quiet = false;
};

cfg::ScenarioConfig load_with_overrides(const CommonOpts& o) {
    cfg::ScenarioConfig c = o.config_path.empty() ? cfg::ScenarioConfig{}
                                                  : cfg::load_config(o.config_path);
    if (o.seed) c.params.seed = *o.seed;
    if (o.out_dir) c.out_dir = *o.out_dir;
    cfg::validate(c);
    return c;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string series_name(const std::string& protocol, int rate, std::uint64_t seed) {
    return "series_" + protocol + "_rate" + std::to_string(rate) + "_seed" +
           std::to_string(seed) + ".csv";
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto range_at = item.find("..");
        if (range_at == std::string::npos) {
            const auto dash = item.find('-');
            if (dash != std::string::npos && dash > 0) range_at = dash;
        }
        if (range_at != std::string::npos) {
            const std::uint64_t lo = std::stoull(item.substr(0, range_at));
            const std::size_t skip = item[range_at] == '-' ? 1 : 2;
            const std::uint64_t hi = std::stoull(item.substr(range_at + skip));
            if (hi < lo) throw ConfigError("seeds", "descending seed range");
            for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        } else if (!item.empty()) {
            seeds.push_back(std::stoull(item));
        }
    }
    if (seeds.empty()) throw ConfigError("seeds", "empty seed list");
    return seeds;
}

std::vector<ProtocolKind> parse_protocol_list(const std::string& text) {
    std::vector<ProtocolKind> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(cfg::protocol_from_name(item));
    }
    if (out.empty()) throw ConfigError("protocols", "empty protocol list");
    return out;
}

int run_single(const CommonOpts& o) {
    const cfg::ScenarioConfig c = load_with_overrides(o);
    const sim::MetricsReport rep = sim::run(c);

    fs::create_directories(c.out_dir);
    const std::string proto = cfg::protocol_name(c.protocol);
    const fs::path series =
        fs::path(c.out_dir) / series_name(proto, c.params.protocol.rate, c.params.seed);
    const fs::path summary = fs::path(c.out_dir) / ("summary_" + proto + "_rate" +
                                                    std::to_string(c.params.protocol.rate) +
                                                    "_seed" + std::to_string(c.params.seed) +
                                                    ".json");
    write_file(series, report::round_series_csv(rep));
    write_file(summary, report::summary_json(rep));

    if (!o.quiet) {
        std::cout << "protocol=" << proto << " seed=" << rep.seed << " rounds="
                  << c.params.rounds << " fnd=" << rep.fnd << " hnd=" << rep.hnd
                  << " lnd=" << rep.lnd << " pdr=" << report::fmt_csv_double(rep.pdr_total)
                  << " mean_response_s=" << report::fmt_csv_double(rep.mean_response_s)
                  << " energy_j=" << report::fmt_csv_double(rep.energy_total_j) << "\n"
                  << "wrote " << series.string() << "\n"
                  << "wrote " << summary.string() << "\n";
    }
    return 0;
}

struct RunKey {
    ProtocolKind protocol;
    std::uint64_t seed;
    int rate;
};

// Runs every (protocol, rate, seed) combination, optionally fanning out over
// worker threads. Collection is keyed, so ordering never depends on timing.
int run_compare(const CommonOpts& o, const std::vector<ProtocolKind>& protocols,
                const std::vector<std::uint64_t>& seeds, const std::vector<int>& rates,
                int jobs) {
    const cfg::ScenarioConfig base = load_with_overrides(o);

    std::vector<RunKey> keys;
    for (const auto proto : protocols) {
        for (const int rate : rates) {
            for (const auto seed : seeds) keys.push_back({proto, seed, rate});
        }
    }

    std::vector<report::CompareRow> rows;
    std::vector<report::FailedRow> failed;
    fs::create_directories(base.out_dir);

    auto run_one = [&base](const RunKey& k) {
        cfg::ScenarioConfig c = base;
        c.protocol = k.protocol;
        c.params.seed = k.seed;
        c.params.protocol.rate = k.rate;
        return sim::run(c);
    };

    for (std::size_t begin = 0; begin < keys.size();
         begin += static_cast<std::size_t>(std::max(1, jobs))) {
        const std::size_t end =
            std::min(keys.size(), begin + static_cast<std::size_t>(std::max(1, jobs)));
        std::vector<std::future<sim::MetricsReport>> batch;
        for (std::size_t i = begin; i < end; ++i) {
            batch.push_back(std::async(std::launch::async, run_one, keys[i]));
        }
        for (std::size_t i = begin; i < end; ++i) {
            const RunKey& k = keys[i];
            const std::string name = cfg::protocol_name(k.protocol);
            try {
                sim::MetricsReport rep = batch[i - begin].get();
                write_file(fs::path(base.out_dir) / series_name(name, k.rate, k.seed),
                           report::round_series_csv(rep));
                rows.push_back({name, k.seed, k.rate, std::move(rep)});
            } catch (const std::exception& e) {
                failed.push_back({name, k.seed, k.rate, e.what()});
            }
        }
    }

    write_file(fs::path(base.out_dir) / "comparison.csv",
               report::comparison_csv(rows, failed));
    if (!o.quiet) {
        std::cout << report::median_table(rows);
        std::cout << "wrote " << (fs::path(base.out_dir) / "comparison.csv").string() << " ("
                  << rows.size() << " ok, " << failed.size() << " failed)\n";
    }
    return failed.empty() ? 0 : 1;
}

int run_rank(const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw ParseError("cannot open matrix file '" + csv_path + "'");

    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty matrix file");

    // Header cells: name:direction:weight
    grey::DecisionMatrix dm;
    {
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) {
            const auto c1 = cell.find(':');
            const auto c2 = cell.rfind(':');
            if (c1 == std::string::npos || c2 == c1) {
                throw ParseError("header cell '" + cell + "' is not name:direction:weight");
            }
            std::string dir = cell.substr(c1 + 1, c2 - c1 - 1);
            std::transform(dir.begin(), dir.end(), dir.begin(),
                           [](unsigned char ch) { return std::tolower(ch); });
            if (dir == "benefit" || dir == "b") {
                dm.directions.push_back(grey::Direction::Benefit);
            } else if (dir == "cost" || dir == "c") {
                dm.directions.push_back(grey::Direction::Cost);
            } else {
                throw ParseError("direction '" + dir + "' is not benefit|cost");
            }
            dm.weights.push_back(std::stod(cell.substr(c2 + 1)));
        }
    }

    std::vector<double> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::size_t cols = 0;
        while (std::getline(ls, cell, ',')) {
            values.push_back(std::stod(cell));
            ++cols;
        }
        if (cols != dm.directions.size()) {
            throw ParseError("row " + std::to_string(rows + 1) + " has " +
                             std::to_string(cols) + " cells, expected " +
                             std::to_string(dm.directions.size()));
        }
        ++rows;
    }
    dm.values = grey::Matrix(rows, dm.directions.size());
    dm.values.data = std::move(values);

    const grey::Ranking ranking = grey::rank_matrix(dm, grey::GreyParams{});
    std::cout << "rank,alternative,grade\n";
    for (std::size_t r = 0; r < ranking.order.size(); ++r) {
        std::cout << r << ',' << ranking.order[r] << ','
                  << report::fmt_csv_double(ranking.grades[ranking.order[r]]) << "\n";
    }
    return 0;
}

int run_dump_topology(const CommonOpts& o) {
    const cfg::ScenarioConfig c = load_with_overrides(o);
    proto::SimState st = sim::make_initial_state(c);
    proto::RoundEvents ev;
    proto::prepare_epoch(c.protocol, st, c.params, ev);

    fs::create_directories(c.out_dir);
    const fs::path out = fs::path(c.out_dir) / "topology.json";
    write_file(out, report::topology_json(st));
    if (!o.quiet) {
        std::cout << fog::dump_text(st.tree, st.fogs);
        std::cout << "wrote " << out.string() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MFCT-IoT grey-election fog/cloud routing simulator"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string protocols_arg = "mfct,ergid,eecrp";
    std::string seeds_arg = "1";
    int jobs = 1;
    std::string rank_csv;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* pos = sub->add_option("config", opts.config_path, "scenario config file");
        if (needs_config) pos->check(CLI::ExistingFile);
        sub->add_option("--seed", [&](const std::vector<std::string>& v) {
            opts.seed = std::stoull(v.front());
            return true;
        }, "override the config seed");
        sub->add_option("--out-dir", [&](const std::vector<std::string>& v) {
            opts.out_dir = v.front();
            return true;
        }, "override the output directory");
        sub->add_flag("--quiet", opts.quiet, "suppress stdout summaries");
    };

    auto* run_cmd = app.add_subcommand("run", "run one scenario and emit series + summary");
    add_common(run_cmd, true);

    auto* cmp_cmd =
        app.add_subcommand("compare", "run (protocol, seed) pairs and emit a comparison table");
    add_common(cmp_cmd, true);
    cmp_cmd->add_option("--protocols", protocols_arg, "comma list of mfct,ergid,eecrp");
    cmp_cmd->add_option("--seeds", seeds_arg, "seed list: 1,2,3 or 1..20");
    cmp_cmd->add_option("--jobs", jobs, "parallel simulation workers");

    auto* sweep_cmd =
        app.add_subcommand("sweep-rate", "compare across the config's rate scenarios");
    add_common(sweep_cmd, true);
    sweep_cmd->add_option("--protocols", protocols_arg, "comma list of mfct,ergid,eecrp");
    sweep_cmd->add_option("--seeds", seeds_arg, "seed list: 1,2,3 or 1..20");
    sweep_cmd->add_option("--jobs", jobs, "parallel simulation workers");

    auto* rank_cmd = app.add_subcommand("rank", "grey-rank a decision matrix CSV");
    rank_cmd->add_option("matrix", rank_csv, "CSV with name:direction:weight header")
        ->required()
        ->check(CLI::ExistingFile);

    auto* dump_cmd =
        app.add_subcommand("dump-topology", "emit the initial topology snapshot as JSON");
    add_common(dump_cmd, true);

    try {
        app.parse(argc, argv);

        if (run_cmd->parsed()) return run_single(opts);
        if (cmp_cmd->parsed()) {
            const cfg::ScenarioConfig base = load_with_overrides(opts);
            return run_compare(opts, parse_protocol_list(protocols_arg),
                               parse_seed_list(seeds_arg), {base.params.protocol.rate},
                               jobs);
        }
        if (sweep_cmd->parsed()) {
            const cfg::ScenarioConfig base = load_with_overrides(opts);
            if (base.rate_scenarios.empty()) {
                throw ConfigError("rate_scenarios", "sweep-rate needs at least one rate");
            }
            return run_compare(opts, parse_protocol_list(protocols_arg),
                               parse_seed_list(seeds_arg), base.rate_scenarios, jobs);
        }
        if (rank_cmd->parsed()) return run_rank(rank_csv);
        if (dump_cmd->parsed()) return run_dump_topology(opts);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
