#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace edist {

/// Dense row-major dataset: n samples (rows) by d features (columns).
struct DatasetMatrix {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> values; // size n * d, row-major

    DatasetMatrix() = default;
    DatasetMatrix(std::size_t rows, std::size_t cols)
        : n(rows), d(cols), values(rows * cols, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return values[i * d + j]; }
    double at(std::size_t i, std::size_t j) const { return values[i * d + j]; }

    const double* row(std::size_t i) const { return values.data() + i * d; }
    double* row(std::size_t i) { return values.data() + i * d; }

    bool empty() const { return n == 0 || d == 0; }
};

/// Convenience builder for small literal matrices in tests and docs.
inline DatasetMatrix make_matrix(std::initializer_list<std::initializer_list<double>> rows) {
    DatasetMatrix m;
    m.n = rows.size();
    m.d = m.n == 0 ? 0 : rows.begin()->size();
    m.values.reserve(m.n * m.d);
    for (const auto& r : rows) {
        if (r.size() != m.d) {
            throw std::invalid_argument("ragged rows in matrix literal");
        }
        for (double v : r) {
            m.values.push_back(v);
        }
    }
    return m;
}

/// Throws if the matrix is empty or contains a non-finite entry.
inline void validate_matrix(const DatasetMatrix& m) {
    if (m.empty()) {
        throw std::invalid_argument("empty input");
    }
    for (std::size_t i = 0; i < m.n; ++i) {
        for (std::size_t j = 0; j < m.d; ++j) {
            if (!std::isfinite(m.at(i, j))) {
                throw std::invalid_argument("non-finite value at (" + std::to_string(i) +
                                            ", " + std::to_string(j) + ")");
            }
        }
    }
}

/// Throws the canonical mismatch error when two matrices disagree in width.
inline void require_same_dim(const DatasetMatrix& x, const DatasetMatrix& y) {
    if (x.d != y.d) {
        throw std::invalid_argument("dimension mismatch: " + std::to_string(x.d) +
                                    " vs " + std::to_string(y.d));
    }
}

} // namespace edist
