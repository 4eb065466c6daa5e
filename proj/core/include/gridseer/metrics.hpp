#pragma once

#include <cstddef>
#include <vector>

namespace gridseer {

struct Metrics {
    double mae = 0;
    double mse = 0;
    std::size_t n = 0;
};

double mae(const std::vector<double>& y, const std::vector<double>& yhat);
double mse(const std::vector<double>& y, const std::vector<double>& yhat);
Metrics compute_metrics(const std::vector<double>& y, const std::vector<double>& yhat);

// Coefficient of determination, 1 - SSE/SST.
double r_squared(const std::vector<double>& y, const std::vector<double>& yhat);

}  // namespace gridseer
