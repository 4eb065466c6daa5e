#pragma once

#include <vector>

namespace gridseer {

// Per-column min/max learned from training rows only. Column order is
// contextual: model input columns first, target column last.
struct NormStats {
    std::vector<double> min;
    std::vector<double> max;

    std::size_t cols() const { return min.size(); }
};

NormStats normalize_fit(const std::vector<std::vector<double>>& train_rows);

// (x - min) / (max - min) per column; constant columns map to 0. Values
// outside the training range are not clamped.
std::vector<double> normalize_apply(const NormStats& stats, const std::vector<double>& row);

double normalize_value(const NormStats& stats, std::size_t col, double v);
double denormalize_value(const NormStats& stats, std::size_t col, double v);

}  // namespace gridseer
