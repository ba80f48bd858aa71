#pragma once

#include <cstddef>
#include <vector>

#include "mfct/errors.hpp"

namespace mfct::grey {

enum class Direction { Benefit, Cost };

// Dense row-major matrix; rows = alternatives, cols = criteria.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t m, std::size_t n, double fill = 0.0)
        : rows(m), cols(n), data(m * n, fill) {}

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

// Raw criteria values plus per-criterion optimization direction and weight.
// Weights must be nonnegative and sum to 1 within 1e-9.
struct DecisionMatrix {
    Matrix values;
    std::vector<Direction> directions;
    std::vector<double> weights;

    // Throws InvalidMatrix when any structural invariant is violated.
    void validate() const;
};

// Distinguishing coefficient of the relational-coefficient formula.
struct GreyParams {
    double rho = 0.5;  // in (0, 1]
};

// Direction-aware min-max normalization onto [0, 1]. A constant column maps
// to all ones so a non-discriminating criterion cannot alter the ranking.
Matrix normalize(const DecisionMatrix& m);

// Relational coefficients against the all-ones reference sequence:
// delta = |1 - x'|, gamma = (dmin + rho*dmax) / (delta + rho*dmax) with
// dmin/dmax taken over the whole matrix. dmax == 0 yields all ones.
Matrix relational_coefficients(const Matrix& norm, const GreyParams& p);

// Weighted grade per alternative: Gamma_i = sum_j w_j * gamma_ij.
std::vector<double> relational_grades(const Matrix& coeffs,
                                      const std::vector<double>& weights);

// Indices sorted by grade descending; ties broken by smaller index.
std::vector<std::size_t> rank(const std::vector<double>& grades);

struct Ranking {
    std::vector<std::size_t> order;  // best first
    std::vector<double> grades;      // indexed by alternative
};

// Full pipeline: normalize -> coefficients -> grades -> rank.
Ranking rank_matrix(const DecisionMatrix& m, const GreyParams& p);

}  // namespace mfct::grey
