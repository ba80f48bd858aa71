#include "mfct/grey.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mfct/instrumentation.hpp"

namespace mfct::grey {

void DecisionMatrix::validate() const {
    if (values.rows < 1 || values.cols < 1) {
        throw InvalidMatrix("decision matrix must be at least 1x1");
    }
    if (values.data.size() != values.rows * values.cols) {
        throw InvalidMatrix("ragged decision matrix");
    }
    if (directions.size() != values.cols) {
        throw InvalidMatrix("directions length does not match criteria count");
    }
    if (weights.size() != values.cols) {
        throw InvalidMatrix("weights length does not match criteria count");
    }
    for (double v : values.data) {
        if (!std::isfinite(v)) throw InvalidMatrix("non-finite matrix entry");
    }
    double wsum = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) throw InvalidMatrix("negative or non-finite weight");
        wsum += w;
    }
    if (std::fabs(wsum - 1.0) > 1e-9) {
        throw InvalidMatrix("weights must sum to 1");
    }
}

Matrix normalize(const DecisionMatrix& m) {
    m.validate();
    const std::size_t rows = m.values.rows;
    const std::size_t cols = m.values.cols;
    Matrix out(rows, cols);

    for (std::size_t j = 0; j < cols; ++j) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < rows; ++i) {
            lo = std::min(lo, m.values.at(i, j));
            hi = std::max(hi, m.values.at(i, j));
        }
        const double range = hi - lo;
        for (std::size_t i = 0; i < rows; ++i) {
            double v;
            if (range == 0.0) {
                v = 1.0;  // degenerate column: every alternative equally ideal
            } else if (m.directions[j] == Direction::Benefit) {
                v = (m.values.at(i, j) - lo) / range;
            } else {
                v = (hi - m.values.at(i, j)) / range;
            }
            out.at(i, j) = v;
        }
    }
    return out;
}

Matrix relational_coefficients(const Matrix& norm, const GreyParams& p) {
    if (!(p.rho > 0.0) || p.rho > 1.0) {
        throw InvalidParameter("rho must be in (0, 1]");
    }
    for (double v : norm.data) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw InvalidMatrix("normalized entry outside [0, 1]");
        }
    }

    double dmin = std::numeric_limits<double>::infinity();
    double dmax = 0.0;
    for (double v : norm.data) {
        const double d = std::fabs(1.0 - v);
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
    }

    Matrix out(norm.rows, norm.cols);
    if (dmax == 0.0) {
        std::fill(out.data.begin(), out.data.end(), 1.0);
        return out;
    }
    for (std::size_t k = 0; k < norm.data.size(); ++k) {
        const double d = std::fabs(1.0 - norm.data[k]);
        out.data[k] = (dmin + p.rho * dmax) / (d + p.rho * dmax);
    }
    return out;
}

std::vector<double> relational_grades(const Matrix& coeffs,
                                      const std::vector<double>& weights) {
    if (weights.size() != coeffs.cols) {
        throw InvalidMatrix("weights length does not match coefficient columns");
    }
    std::vector<double> grades(coeffs.rows, 0.0);
    for (std::size_t i = 0; i < coeffs.rows; ++i) {
        double g = 0.0;
        for (std::size_t j = 0; j < coeffs.cols; ++j) {
            g += weights[j] * coeffs.at(i, j);
        }
        grades[i] = g;
    }
    return grades;
}

std::vector<std::size_t> rank(const std::vector<double>& grades) {
    if (grades.empty()) throw InvalidMatrix("cannot rank zero alternatives");
    for (double g : grades) {
        if (!std::isfinite(g)) throw InvalidMatrix("non-finite grade");
    }
    std::vector<std::size_t> order(grades.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (grades[a] != grades[b]) return grades[a] > grades[b];
        return a < b;
    });
    return order;
}

Ranking rank_matrix(const DecisionMatrix& m, const GreyParams& p) {
    instrument::grey_rank_calls.fetch_add(1, std::memory_order_relaxed);
    const Matrix norm = normalize(m);
    const Matrix coeffs = relational_coefficients(norm, p);
    Ranking r;
    r.grades = relational_grades(coeffs, m.weights);
    r.order = rank(r.grades);
    return r;
}

}  // namespace mfct::grey
