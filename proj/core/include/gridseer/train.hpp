#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gridseer/lstm.hpp"
#include "gridseer/mlp.hpp"

namespace gridseer {

// Inputs are model-ready rows: feature vectors for the MLP, flattened
// lookback windows (time-major) for the LSTM. All values normalized.
struct Dataset {
    std::vector<std::vector<double>> inputs;
    std::vector<double> targets;

    std::size_t size() const { return inputs.size(); }
};

enum class Optimizer { PlainGD, MomentumGD };

struct TrainConfig {
    std::size_t epochs = 200;
    double learning_rate = 0.05;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    Optimizer optimizer = Optimizer::MomentumGD;
    double momentum = 0.9;
    std::optional<double> gradient_clip = 5.0;  // global L2 bound
    std::optional<std::size_t> early_stop_patience;
};

template <class P>
struct TrainResult {
    P params;
    std::vector<double> history;  // mean training loss per epoch actually run
};

// Deterministic mini-batch gradient descent on MSE. Fixed seed implies
// bit-identical results: shuffle order, batch boundaries and reduction
// order are all fixed. With early stopping enabled, the last 15% of the
// dataset (chronological suffix) is held out as validation and the best
// validation-loss parameters are returned.
TrainResult<MlpParams> train(const MlpParams& params, const Dataset& dataset,
                             const TrainConfig& config);
TrainResult<LstmParams> train(const LstmParams& params, const Dataset& dataset,
                              const TrainConfig& config);

// Compares analytic gradients against central finite differences
// (step 1e-5) over the batch loss. Returns the max per-parameter relative
// error |a - f| / max(|a|, |f|, 1e-8). Intended for nets <= 200 params.
double grad_check(const MlpParams& params, const Dataset& batch);
double grad_check(const LstmParams& params, const Dataset& batch);

}  // namespace gridseer
