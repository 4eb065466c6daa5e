#pragma once

#include <cstdint>
#include <vector>

#include "gridseer/matrix.hpp"

namespace gridseer {

// Feed-forward regressor: tanh hidden layers, identity scalar output.
struct MlpParams {
    std::vector<std::size_t> layer_sizes;  // >= 2 entries, last must be 1
    std::vector<Matrix> weights;           // weights[l]: layer_sizes[l+1] x layer_sizes[l]
    std::vector<std::vector<double>> biases;

    std::size_t input_dim() const { return layer_sizes.front(); }
    std::size_t param_count() const;
    bool same_architecture(const MlpParams& o) const { return layer_sizes == o.layer_sizes; }
};

// Glorot-uniform weights, zero biases, seeded.
MlpParams init_mlp(const std::vector<std::size_t>& layer_sizes, std::uint64_t seed);

double mlp_forward(const MlpParams& params, const std::vector<double>& x);

// Gradient of (prediction - target)^2 for one sample, accumulated into
// `grad` (same shapes as `params`). Returns the sample loss.
double mlp_backward(const MlpParams& params, const std::vector<double>& x, double target,
                    MlpParams& grad);

MlpParams zero_like(const MlpParams& params);

std::vector<double> flatten(const MlpParams& params);
void unflatten(MlpParams& params, const std::vector<double>& flat);

}  // namespace gridseer
