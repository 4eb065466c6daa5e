#include "gridseer/metrics.hpp"

#include <cmath>

#include "gridseer/errors.hpp"

namespace gridseer {

namespace {
void check(const std::vector<double>& y, const std::vector<double>& yhat) {
    if (y.size() != yhat.size()) {
        throw LengthMismatch(std::to_string(y.size()) + " vs " + std::to_string(yhat.size()));
    }
    if (y.empty()) throw EmptyInput("metrics need at least one sample");
}
}  // namespace

double mae(const std::vector<double>& y, const std::vector<double>& yhat) {
    check(y, yhat);
    double acc = 0;
    for (std::size_t i = 0; i < y.size(); ++i) acc += std::abs(y[i] - yhat[i]);
    return acc / static_cast<double>(y.size());
}

double mse(const std::vector<double>& y, const std::vector<double>& yhat) {
    check(y, yhat);
    double acc = 0;
    for (std::size_t i = 0; i < y.size(); ++i) acc += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    return acc / static_cast<double>(y.size());
}

Metrics compute_metrics(const std::vector<double>& y, const std::vector<double>& yhat) {
    return {mae(y, yhat), mse(y, yhat), y.size()};
}

double r_squared(const std::vector<double>& y, const std::vector<double>& yhat) {
    check(y, yhat);
    double mean = 0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double sse = 0, sst = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sse += (y[i] - yhat[i]) * (y[i] - yhat[i]);
        sst += (y[i] - mean) * (y[i] - mean);
    }
    if (sst == 0) return sse == 0 ? 1.0 : 0.0;
    return 1.0 - sse / sst;
}

}  // namespace gridseer
