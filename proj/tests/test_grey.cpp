#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mfct/grey.hpp"
#include "mfct/rng.hpp"
#include "oracles.hpp"

using namespace mfct;
using grey::Direction;

namespace {

grey::DecisionMatrix column_matrix(const std::vector<double>& col, Direction dir) {
    grey::DecisionMatrix dm;
    dm.values = grey::Matrix(col.size(), 1);
    for (std::size_t i = 0; i < col.size(); ++i) dm.values.at(i, 0) = col[i];
    dm.directions = {dir};
    dm.weights = {1.0};
    return dm;
}

grey::DecisionMatrix random_matrix(Rng& rng, std::size_t m, std::size_t n) {
    grey::DecisionMatrix dm;
    dm.values = grey::Matrix(m, n);
    for (auto& v : dm.values.data) v = rng.uniform(-50.0, 50.0);
    dm.directions.resize(n);
    dm.weights.resize(n);
    double wsum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        dm.directions[j] = rng.bernoulli(0.5) ? Direction::Benefit : Direction::Cost;
        dm.weights[j] = rng.uniform(0.05, 1.0);
        wsum += dm.weights[j];
    }
    for (auto& w : dm.weights) w /= wsum;
    // renormalize exactly enough for the 1e-9 invariant
    double s2 = 0.0;
    for (double w : dm.weights) s2 += w;
    dm.weights.back() += 1.0 - s2;
    return dm;
}

oracle::GreyInput to_oracle(const grey::DecisionMatrix& dm, double rho) {
    oracle::GreyInput in;
    in.rows.assign(dm.values.rows, std::vector<double>(dm.values.cols));
    for (std::size_t i = 0; i < dm.values.rows; ++i) {
        for (std::size_t j = 0; j < dm.values.cols; ++j) {
            in.rows[i][j] = dm.values.at(i, j);
        }
    }
    for (auto d : dm.directions) in.dir.push_back(d == Direction::Benefit ? 1 : -1);
    in.w = dm.weights;
    in.rho = rho;
    return in;
}

}  // namespace

TEST_CASE("normalize: benefit, cost and degenerate columns") {
    auto benefit = grey::normalize(column_matrix({2, 4, 6}, Direction::Benefit));
    CHECK(benefit.at(0, 0) == doctest::Approx(0.0));
    CHECK(benefit.at(1, 0) == doctest::Approx(0.5));
    CHECK(benefit.at(2, 0) == doctest::Approx(1.0));

    auto cost = grey::normalize(column_matrix({2, 4, 6}, Direction::Cost));
    CHECK(cost.at(0, 0) == doctest::Approx(1.0));
    CHECK(cost.at(1, 0) == doctest::Approx(0.5));
    CHECK(cost.at(2, 0) == doctest::Approx(0.0));

    auto flat = grey::normalize(column_matrix({5, 5, 5}, Direction::Benefit));
    for (double v : flat.data) CHECK(v == 1.0);
}

TEST_CASE("normalize rejects non-finite input") {
    auto dm = column_matrix({1.0, std::nan(""), 3.0}, Direction::Benefit);
    CHECK_THROWS_AS(grey::normalize(dm), InvalidMatrix);
}

TEST_CASE("relational coefficients at forced dmin=0, dmax=1") {
    grey::Matrix norm(3, 1);
    norm.at(0, 0) = 1.0;   // delta 0
    norm.at(1, 0) = 0.0;   // delta 1
    norm.at(2, 0) = 0.5;   // delta 0.5
    auto coeffs = grey::relational_coefficients(norm, grey::GreyParams{0.5});
    CHECK(coeffs.at(0, 0) == doctest::Approx(1.0));
    CHECK(coeffs.at(1, 0) == doctest::Approx(1.0 / 3.0));
    CHECK(coeffs.at(2, 0) == doctest::Approx(0.5));
}

TEST_CASE("relational coefficients: all-ideal matrix and bad inputs") {
    grey::Matrix ones(2, 2, 1.0);
    auto coeffs = grey::relational_coefficients(ones, grey::GreyParams{0.5});
    for (double v : coeffs.data) CHECK(v == 1.0);

    grey::Matrix bad(1, 1, 1.5);
    CHECK_THROWS_AS(grey::relational_coefficients(bad, grey::GreyParams{0.5}), InvalidMatrix);
    CHECK_THROWS_AS(grey::relational_coefficients(ones, grey::GreyParams{0.0}),
                    InvalidParameter);
    CHECK_THROWS_AS(grey::relational_coefficients(ones, grey::GreyParams{1.5}),
                    InvalidParameter);
}

TEST_CASE("relational grades: weighted means") {
    grey::Matrix row(1, 2);
    row.at(0, 0) = 1.0;
    row.at(0, 1) = 1.0 / 3.0;
    auto grades = grey::relational_grades(row, {0.5, 0.5});
    CHECK(grades[0] == doctest::Approx(2.0 / 3.0));

    grey::Matrix constant(1, 4, 0.37);
    auto g2 = grey::relational_grades(constant, {0.1, 0.2, 0.3, 0.4});
    CHECK(g2[0] == doctest::Approx(0.37));

    grey::Matrix row3(1, 3);
    row3.at(0, 0) = 1.0;
    row3.at(0, 1) = 0.5;
    row3.at(0, 2) = 1.0 / 3.0;
    auto g3 = grey::relational_grades(row3, {0.2, 0.3, 0.5});
    CHECK(g3[0] == doctest::Approx(0.2 + 0.15 + 1.0 / 6.0).epsilon(1e-12));

    CHECK_THROWS_AS(grey::relational_grades(row, {1.0}), InvalidMatrix);
}

TEST_CASE("rank: descending with index tie-break") {
    CHECK(grey::rank({0.4, 0.9, 0.4}) == std::vector<std::size_t>{1, 0, 2});
    CHECK(grey::rank({0.7}) == std::vector<std::size_t>{0});
    CHECK_THROWS_AS(grey::rank({}), InvalidMatrix);

    Rng rng(20240811);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> grades;
        for (int i = 0; i < 5; ++i) grades.push_back(rng.uniform());
        auto order = grey::rank(grades);
        std::vector<std::size_t> expected(5);
        std::iota(expected.begin(), expected.end(), std::size_t{0});
        std::sort(expected.begin(), expected.end(), [&](std::size_t a, std::size_t b) {
            if (grades[a] != grades[b]) return grades[a] > grades[b];
            return a < b;
        });
        CHECK(order == expected);
    }
}

TEST_CASE("full pipeline matches the direct-formula reference") {
    Rng rng(7);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t m = 1 + rng.below(8);
        const std::size_t n = 1 + rng.below(6);
        auto dm = random_matrix(rng, m, n);
        auto got = grey::rank_matrix(dm, grey::GreyParams{0.5});
        auto want = oracle::grey_reference(to_oracle(dm, 0.5));
        REQUIRE(got.order == want.order);
        for (std::size_t i = 0; i < m; ++i) {
            CHECK(got.grades[i] == doctest::Approx(want.grades[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("dominance preservation with injected dominated rows") {
    Rng rng(99);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t m = 2 + rng.below(6);
        const std::size_t n = 1 + rng.below(6);
        auto dm = random_matrix(rng, m, n);

        // Append a row dominated by row `src`: worse or equal everywhere,
        // strictly worse in one positive-weight column.
        const std::size_t src = rng.below(m);
        const std::size_t strict = rng.below(n);
        grey::DecisionMatrix bigger;
        bigger.directions = dm.directions;
        bigger.weights = dm.weights;
        bigger.values = grey::Matrix(m + 1, n);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                bigger.values.at(i, j) = dm.values.at(i, j);
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double slack = (j == strict) ? rng.uniform(0.1, 5.0)
                                               : rng.uniform(0.0, 5.0) * rng.bernoulli(0.5);
            const double sign = dm.directions[j] == Direction::Benefit ? -1.0 : 1.0;
            bigger.values.at(m, j) = dm.values.at(src, j) + sign * slack;
        }

        auto res = grey::rank_matrix(bigger, grey::GreyParams{0.5});
        CHECK(res.grades[src] >= res.grades[m]);
        const auto pos_src = std::find(res.order.begin(), res.order.end(), src);
        const auto pos_dom = std::find(res.order.begin(), res.order.end(), m);
        CHECK(pos_src < pos_dom);
    }
}

TEST_CASE("permutation invariance of the ranking") {
    Rng rng(123);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = 2 + rng.below(7);
        const std::size_t n = 1 + rng.below(6);
        auto dm = random_matrix(rng, m, n);
        auto base = grey::rank_matrix(dm, grey::GreyParams{0.5});

        std::vector<std::size_t> perm(m);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = m; i > 1; --i) {
            std::swap(perm[i - 1], perm[rng.below(i)]);
        }
        grey::DecisionMatrix shuffled = dm;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                shuffled.values.at(perm[i], j) = dm.values.at(i, j);
            }
        }
        auto res = grey::rank_matrix(shuffled, grey::GreyParams{0.5});
        for (std::size_t r = 0; r < m; ++r) {
            CHECK(res.order[r] == perm[base.order[r]]);
        }
    }
}

TEST_CASE("column scale invariance") {
    Rng rng(456);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = 2 + rng.below(7);
        const std::size_t n = 1 + rng.below(6);
        auto dm = random_matrix(rng, m, n);
        auto base_norm = grey::normalize(dm);
        auto base_rank = grey::rank_matrix(dm, grey::GreyParams{0.5});

        grey::DecisionMatrix scaled = dm;
        const std::size_t col = rng.below(n);
        const double factor = rng.uniform(0.01, 100.0);
        for (std::size_t i = 0; i < m; ++i) {
            scaled.values.at(i, col) = dm.values.at(i, col) * factor;
        }
        auto norm = grey::normalize(scaled);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                CHECK(norm.at(i, j) == doctest::Approx(base_norm.at(i, j)).epsilon(1e-12));
            }
        }
        CHECK(grey::rank_matrix(scaled, grey::GreyParams{0.5}).order == base_rank.order);
    }
}

TEST_CASE("decision matrix validation") {
    grey::DecisionMatrix dm;
    CHECK_THROWS_AS(dm.validate(), InvalidMatrix);  // empty

    dm = column_matrix({1, 2}, Direction::Benefit);
    dm.weights = {0.5};
    CHECK_THROWS_AS(dm.validate(), InvalidMatrix);  // weights don't sum to 1

    dm = column_matrix({1, 2}, Direction::Benefit);
    dm.weights = {-1.0};
    CHECK_THROWS_AS(dm.validate(), InvalidMatrix);

    dm = column_matrix({1, 2}, Direction::Benefit);
    dm.directions = {};
    CHECK_THROWS_AS(dm.validate(), InvalidMatrix);
}
