#pragma once

#include <cstdint>
#include <vector>

#include "gridseer/matrix.hpp"

namespace gridseer {

// Single-layer LSTM with a linear scalar head. Gate order everywhere
// (serialization, flattening) is input, forget, output, candidate.
struct LstmParams {
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 0;
    std::size_t lookback = 0;  // window length, >= 1

    Matrix w_i, w_f, w_o, w_g;  // hidden_dim x input_dim
    Matrix u_i, u_f, u_o, u_g;  // hidden_dim x hidden_dim
    std::vector<double> b_i, b_f, b_o, b_g;
    std::vector<double> head_w;  // 1 x hidden_dim
    double head_b = 0;

    std::size_t param_count() const;
    bool same_architecture(const LstmParams& o) const {
        return input_dim == o.input_dim && hidden_dim == o.hidden_dim && lookback == o.lookback;
    }
};

// Glorot-uniform gate weights, forget bias 1.0, other biases zero, seeded.
LstmParams init_lstm(std::size_t input_dim, std::size_t hidden_dim, std::size_t lookback,
                     std::uint64_t seed);

// Runs the recurrence from zero h, c over `window` (lookback steps) and
// applies the head to the final hidden state.
double lstm_forward(const LstmParams& params, const std::vector<std::vector<double>>& window);

// Same, with the window flattened time-major: step t at [t*input_dim, ...).
double lstm_forward_flat(const LstmParams& params, const std::vector<double>& window);

// Backpropagation through time of (prediction - target)^2 for one window,
// accumulated into `grad`. Returns the sample loss.
double lstm_backward(const LstmParams& params, const std::vector<double>& window, double target,
                     LstmParams& grad);

LstmParams zero_like(const LstmParams& params);

std::vector<double> flatten(const LstmParams& params);
void unflatten(LstmParams& params, const std::vector<double>& flat);

}  // namespace gridseer
