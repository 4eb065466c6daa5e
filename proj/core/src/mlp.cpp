#include "gridseer/mlp.hpp"

#include <cmath>

#include "gridseer/errors.hpp"
#include "gridseer/rng.hpp"

namespace gridseer {

namespace {
void validate_shape(const MlpParams& p) {
    if (p.layer_sizes.size() < 2 || p.layer_sizes.back() != 1) {
        throw DimensionMismatch("layer_sizes must have >= 2 entries ending in 1");
    }
    if (p.weights.size() != p.layer_sizes.size() - 1 || p.biases.size() != p.weights.size()) {
        throw DimensionMismatch("weight/bias count does not match layer_sizes");
    }
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        if (p.weights[l].rows != p.layer_sizes[l + 1] || p.weights[l].cols != p.layer_sizes[l] ||
            p.biases[l].size() != p.layer_sizes[l + 1]) {
            throw DimensionMismatch("layer " + std::to_string(l) + " shape mismatch");
        }
    }
}
}  // namespace

std::size_t MlpParams::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        n += layer_sizes[l + 1] * layer_sizes[l] + layer_sizes[l + 1];
    }
    return n;
}

MlpParams init_mlp(const std::vector<std::size_t>& layer_sizes, std::uint64_t seed) {
    if (layer_sizes.size() < 2 || layer_sizes.back() != 1) {
        throw DimensionMismatch("layer_sizes must have >= 2 entries ending in 1");
    }
    Rng rng(seed);
    MlpParams p;
    p.layer_sizes = layer_sizes;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        std::size_t fan_in = layer_sizes[l], fan_out = layer_sizes[l + 1];
        double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Matrix w(fan_out, fan_in);
        for (double& v : w.a) v = rng.next_uniform(-bound, bound);
        p.weights.push_back(std::move(w));
        p.biases.emplace_back(fan_out, 0.0);
    }
    return p;
}

double mlp_forward(const MlpParams& params, const std::vector<double>& x) {
    validate_shape(params);
    if (x.size() != params.input_dim()) {
        throw DimensionMismatch("input has " + std::to_string(x.size()) + " dims, expected " +
                                std::to_string(params.input_dim()));
    }
    for (double v : x) {
        if (!std::isfinite(v)) throw NonFiniteInput("mlp_forward input");
    }
    std::vector<double> act = x;
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        const Matrix& w = params.weights[l];
        std::vector<double> next(w.rows);
        for (std::size_t i = 0; i < w.rows; ++i) {
            double z = params.biases[l][i];
            for (std::size_t j = 0; j < w.cols; ++j) z += w(i, j) * act[j];
            next[i] = (l + 1 < params.weights.size()) ? std::tanh(z) : z;
        }
        act = std::move(next);
    }
    return act[0];
}

double mlp_backward(const MlpParams& params, const std::vector<double>& x, double target,
                    MlpParams& grad) {
    if (x.size() != params.input_dim()) throw DimensionMismatch("mlp_backward input dim");

    std::size_t n_layers = params.weights.size();
    std::vector<std::vector<double>> acts(n_layers + 1);
    acts[0] = x;
    for (std::size_t l = 0; l < n_layers; ++l) {
        const Matrix& w = params.weights[l];
        acts[l + 1].resize(w.rows);
        for (std::size_t i = 0; i < w.rows; ++i) {
            double z = params.biases[l][i];
            for (std::size_t j = 0; j < w.cols; ++j) z += w(i, j) * acts[l][j];
            acts[l + 1][i] = (l + 1 < n_layers) ? std::tanh(z) : z;
        }
    }
    double pred = acts[n_layers][0];
    double err = pred - target;
    double loss = err * err;

    // delta = dLoss/dz for the current layer
    std::vector<double> delta = {2.0 * err};
    for (std::size_t li = n_layers; li-- > 0;) {
        const Matrix& w = params.weights[li];
        for (std::size_t i = 0; i < w.rows; ++i) {
            grad.biases[li][i] += delta[i];
            for (std::size_t j = 0; j < w.cols; ++j) {
                grad.weights[li](i, j) += delta[i] * acts[li][j];
            }
        }
        if (li == 0) break;
        std::vector<double> prev(w.cols, 0.0);
        for (std::size_t j = 0; j < w.cols; ++j) {
            double s = 0;
            for (std::size_t i = 0; i < w.rows; ++i) s += w(i, j) * delta[i];
            // act = tanh(z) on hidden layers, so dact/dz = 1 - act^2
            prev[j] = s * (1.0 - acts[li][j] * acts[li][j]);
        }
        delta = std::move(prev);
    }
    return loss;
}

MlpParams zero_like(const MlpParams& params) {
    MlpParams g;
    g.layer_sizes = params.layer_sizes;
    for (const auto& w : params.weights) g.weights.emplace_back(w.rows, w.cols);
    for (const auto& b : params.biases) g.biases.emplace_back(b.size(), 0.0);
    return g;
}

std::vector<double> flatten(const MlpParams& params) {
    std::vector<double> flat;
    flat.reserve(params.param_count());
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        flat.insert(flat.end(), params.weights[l].a.begin(), params.weights[l].a.end());
        flat.insert(flat.end(), params.biases[l].begin(), params.biases[l].end());
    }
    return flat;
}

void unflatten(MlpParams& params, const std::vector<double>& flat) {
    if (flat.size() != params.param_count()) throw DimensionMismatch("unflatten size");
    std::size_t pos = 0;
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        for (double& v : params.weights[l].a) v = flat[pos++];
        for (double& v : params.biases[l]) v = flat[pos++];
    }
}

}  // namespace gridseer
