#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "mfct/fog_tree.hpp"
#include "mfct/rng.hpp"
#include "oracles.hpp"

using namespace mfct;

namespace {

std::vector<net::FogNode> grid_fogs(int n) {
    // Distinct positions along a diagonal-ish scatter; ids 0..n-1.
    std::vector<net::FogNode> fogs;
    Rng rng(1000 + n);
    for (int i = 0; i < n; ++i) {
        net::FogNode f;
        f.id = i;
        f.kin.pos = {rng.uniform(0, 200), rng.uniform(0, 200)};
        fogs.push_back(f);
    }
    return fogs;
}

}  // namespace

TEST_CASE("single fog hangs off the cloud at depth 1") {
    auto tree = fog::build_tree(grid_fogs(1), 2);
    CHECK(tree.level_order.size() == 1);
    CHECK(tree.parent_of.at(tree.level_order[0]) == fog::kCloudRoot);
    CHECK(tree.depth(tree.level_order[0]) == 1);
    CHECK(fog::path_to_root(tree, tree.level_order[0]) == std::vector<int>{fog::kCloudRoot});
}

TEST_CASE("seven fogs, k=2: perfect binary tree depths") {
    auto tree = fog::build_tree(grid_fogs(7), 2);
    std::multiset<int> depths;
    for (int id : tree.level_order) depths.insert(tree.depth(id));
    CHECK(depths == std::multiset<int>{1, 2, 2, 3, 3, 3, 3});
}

TEST_CASE("four fogs, k=2: leaf depths differ by exactly one") {
    auto tree = fog::build_tree(grid_fogs(4), 2);
    std::multiset<int> depths;
    for (int id : tree.level_order) depths.insert(tree.depth(id));
    CHECK(depths == std::multiset<int>{1, 2, 2, 3});
}

TEST_CASE("complete fill matches the level-extent depth oracle for all n, k") {
    for (int k = 2; k <= 4; ++k) {
        for (int n = 1; n <= 64; ++n) {
            auto fogs = grid_fogs(n);
            auto tree = fog::build_tree(fogs, k);
            REQUIRE(static_cast<int>(tree.level_order.size()) == n);

            std::set<int> seen(tree.level_order.begin(), tree.level_order.end());
            CHECK(static_cast<int>(seen.size()) == n);

            int min_leaf = 1 << 30, max_leaf = 0, max_depth = 0;
            for (std::size_t slot = 0; slot < tree.level_order.size(); ++slot) {
                const int id = tree.level_order[slot];
                const int d = tree.depth(id);
                CHECK(d == oracle::complete_kary_depth(slot, k));
                CHECK(static_cast<int>(tree.children_of.at(id).size()) <= k);
                max_depth = std::max(max_depth, d);
                if (tree.children_of.at(id).empty()) {
                    min_leaf = std::min(min_leaf, d);
                    max_leaf = std::max(max_leaf, d);
                }
            }
            CHECK(max_leaf - min_leaf <= 1);
            CHECK(tree.height() == max_depth);

            // path length bound: ceil(log_k(n+1)) + 1
            const double bound = std::ceil(std::log(n + 1.0) / std::log(double(k))) + 1;
            for (int id : tree.level_order) {
                CHECK(static_cast<double>(fog::path_to_root(tree, id).size()) <= bound);
            }
        }
    }
}

TEST_CASE("morton order keeps the quadrant grid in row-major order") {
    std::vector<net::FogNode> fogs(4);
    fogs[0] = {0, {{50, 50}, {}}, {}};
    fogs[1] = {1, {{150, 50}, {}}, {}};
    fogs[2] = {2, {{50, 150}, {}}, {}};
    fogs[3] = {3, {{150, 150}, {}}, {}};
    auto tree = fog::build_tree(fogs, 2);
    CHECK(tree.level_order == std::vector<int>{0, 1, 2, 3});
    CHECK(tree.parent_of.at(0) == fog::kCloudRoot);
    CHECK(tree.parent_of.at(1) == 0);
    CHECK(tree.parent_of.at(2) == 0);
    CHECK(tree.parent_of.at(3) == 1);
}

TEST_CASE("path_to_root walks parents and flags unknown ids") {
    auto tree = fog::build_tree(grid_fogs(7), 2);
    // deepest slot
    const int deep = tree.level_order.back();
    const auto path = fog::path_to_root(tree, deep);
    CHECK(path.size() == 3);
    CHECK(path.back() == fog::kCloudRoot);
    CHECK_THROWS_AS(fog::path_to_root(tree, 99), UnknownFog);
    CHECK_THROWS_AS(tree.depth(99), UnknownFog);
}

TEST_CASE("build_tree rejects bad input") {
    auto fogs = grid_fogs(3);
    CHECK_THROWS_AS(fog::build_tree(fogs, 1), InvalidTopology);
    CHECK_THROWS_AS(fog::build_tree({}, 2), InvalidTopology);
    fogs[2].id = fogs[0].id;
    CHECK_THROWS_AS(fog::build_tree(fogs, 2), InvalidTopology);
}

TEST_CASE("merge_payloads unions ids and keeps the earliest timestamp") {
    Packet a;
    a.request_ids = {1};
    a.bits = 4000;
    a.created_at = 5.0;
    Packet b = a;
    b.request_ids = {2};
    b.created_at = 3.0;
    Packet c = a;
    c.request_ids = {3};
    c.created_at = 4.0;

    auto merged = fog::merge_payloads({a, b, c}, 4000.0);
    CHECK(merged.kind == PacketKind::FogMerged);
    CHECK(merged.request_ids == std::vector<std::uint64_t>{1, 2, 3});
    CHECK(merged.created_at == 3.0);
    CHECK(merged.bits == 4000.0);

    auto single = fog::merge_payloads({a}, 1234.0);
    CHECK(single.request_ids == a.request_ids);
    CHECK(single.bits == 1234.0);

    CHECK_THROWS_AS(fog::merge_payloads({}, 4000.0), EmptyMerge);
}

TEST_CASE("text dump lists the cloud and every fog once") {
    auto fogs = grid_fogs(5);
    auto tree = fog::build_tree(fogs, 2);
    const std::string text = fog::dump_text(tree, fogs);
    CHECK(text.find("cloud\n") == 0);
    for (const auto& f : fogs) {
        CHECK(text.find("fog " + std::to_string(f.id)) != std::string::npos);
    }
}
