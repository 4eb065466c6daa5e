#pragma once

#include <cstddef>
#include <vector>

namespace gridseer {

// Dense row-major matrix of doubles. Deliberately minimal; every numeric
// kernel in the model code spells out its loops so the reduction order is
// fixed (bit-reproducibility is part of the training contract).
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

}  // namespace gridseer
