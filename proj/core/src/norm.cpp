#include "gridseer/norm.hpp"

#include <algorithm>

#include "gridseer/errors.hpp"

namespace gridseer {

NormStats normalize_fit(const std::vector<std::vector<double>>& train_rows) {
    if (train_rows.empty()) throw EmptyInput("normalize_fit needs at least one row");
    std::size_t cols = train_rows.front().size();
    NormStats s;
    s.min = train_rows.front();
    s.max = train_rows.front();
    for (const auto& row : train_rows) {
        if (row.size() != cols) throw DimensionMismatch("ragged normalization input");
        for (std::size_t c = 0; c < cols; ++c) {
            s.min[c] = std::min(s.min[c], row[c]);
            s.max[c] = std::max(s.max[c], row[c]);
        }
    }
    return s;
}

double normalize_value(const NormStats& stats, std::size_t col, double v) {
    double lo = stats.min[col], hi = stats.max[col];
    if (hi == lo) return 0.0;
    return (v - lo) / (hi - lo);
}

double denormalize_value(const NormStats& stats, std::size_t col, double v) {
    double lo = stats.min[col], hi = stats.max[col];
    if (hi == lo) return lo;
    return lo + v * (hi - lo);
}

std::vector<double> normalize_apply(const NormStats& stats, const std::vector<double>& row) {
    if (row.size() != stats.cols()) {
        throw DimensionMismatch("row has " + std::to_string(row.size()) + " columns, stats have " +
                                std::to_string(stats.cols()));
    }
    std::vector<double> out(row.size());
    for (std::size_t c = 0; c < row.size(); ++c) out[c] = normalize_value(stats, c, row[c]);
    return out;
}

}  // namespace gridseer
