#include "gridseer/lstm.hpp"

#include <cmath>

#include "gridseer/errors.hpp"
#include "gridseer/rng.hpp"

namespace gridseer {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void check_window(const LstmParams& p, std::size_t flat_size) {
    if (p.lookback < 1) throw DimensionMismatch("lookback must be >= 1");
    if (flat_size != p.lookback * p.input_dim) {
        throw BadWindowLength("window has " + std::to_string(flat_size) + " values, expected " +
                              std::to_string(p.lookback * p.input_dim));
    }
}

// One forward pass with all intermediate states kept for BPTT.
struct Trace {
    // per step: gate activations, cell state, tanh(cell), hidden state
    std::vector<std::vector<double>> gi, gf, go, gg, c, tc, h;
    double pred = 0;
};

Trace run_forward(const LstmParams& p, const std::vector<double>& window) {
    std::size_t T = p.lookback, H = p.hidden_dim, D = p.input_dim;
    Trace tr;
    tr.gi.assign(T, std::vector<double>(H));
    tr.gf = tr.go = tr.gg = tr.c = tr.tc = tr.h = tr.gi;

    std::vector<double> h_prev(H, 0.0), c_prev(H, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        const double* x = window.data() + t * D;
        for (std::size_t i = 0; i < H; ++i) {
            double zi = p.b_i[i], zf = p.b_f[i], zo = p.b_o[i], zg = p.b_g[i];
            for (std::size_t j = 0; j < D; ++j) {
                zi += p.w_i(i, j) * x[j];
                zf += p.w_f(i, j) * x[j];
                zo += p.w_o(i, j) * x[j];
                zg += p.w_g(i, j) * x[j];
            }
            for (std::size_t j = 0; j < H; ++j) {
                zi += p.u_i(i, j) * h_prev[j];
                zf += p.u_f(i, j) * h_prev[j];
                zo += p.u_o(i, j) * h_prev[j];
                zg += p.u_g(i, j) * h_prev[j];
            }
            double gi = sigmoid(zi), gf = sigmoid(zf), go = sigmoid(zo), gg = std::tanh(zg);
            double c = gf * c_prev[i] + gi * gg;
            double tc = std::tanh(c);
            tr.gi[t][i] = gi;
            tr.gf[t][i] = gf;
            tr.go[t][i] = go;
            tr.gg[t][i] = gg;
            tr.c[t][i] = c;
            tr.tc[t][i] = tc;
            tr.h[t][i] = go * tc;
        }
        h_prev = tr.h[t];
        c_prev = tr.c[t];
    }
    double out = p.head_b;
    for (std::size_t i = 0; i < H; ++i) out += p.head_w[i] * tr.h[T - 1][i];
    tr.pred = out;
    return tr;
}

}  // namespace

std::size_t LstmParams::param_count() const {
    return 4 * (hidden_dim * input_dim + hidden_dim * hidden_dim + hidden_dim) + hidden_dim + 1;
}

LstmParams init_lstm(std::size_t input_dim, std::size_t hidden_dim, std::size_t lookback,
                     std::uint64_t seed) {
    if (input_dim < 1 || hidden_dim < 1 || lookback < 1) {
        throw DimensionMismatch("lstm dims must be >= 1");
    }
    Rng rng(seed);
    LstmParams p;
    p.input_dim = input_dim;
    p.hidden_dim = hidden_dim;
    p.lookback = lookback;
    auto glorot = [&](std::size_t rows, std::size_t cols) {
        double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
        Matrix m(rows, cols);
        for (double& v : m.a) v = rng.next_uniform(-bound, bound);
        return m;
    };
    p.w_i = glorot(hidden_dim, input_dim);
    p.w_f = glorot(hidden_dim, input_dim);
    p.w_o = glorot(hidden_dim, input_dim);
    p.w_g = glorot(hidden_dim, input_dim);
    p.u_i = glorot(hidden_dim, hidden_dim);
    p.u_f = glorot(hidden_dim, hidden_dim);
    p.u_o = glorot(hidden_dim, hidden_dim);
    p.u_g = glorot(hidden_dim, hidden_dim);
    p.b_i.assign(hidden_dim, 0.0);
    p.b_f.assign(hidden_dim, 1.0);  // forget-gate bias 1.0 stabilizes early training
    p.b_o.assign(hidden_dim, 0.0);
    p.b_g.assign(hidden_dim, 0.0);
    p.head_w.resize(hidden_dim);
    double bound = std::sqrt(6.0 / static_cast<double>(hidden_dim + 1));
    for (double& v : p.head_w) v = rng.next_uniform(-bound, bound);
    p.head_b = 0.0;
    return p;
}

double lstm_forward_flat(const LstmParams& params, const std::vector<double>& window) {
    check_window(params, window.size());
    for (double v : window) {
        if (!std::isfinite(v)) throw NonFiniteInput("lstm_forward input");
    }
    return run_forward(params, window).pred;
}

double lstm_forward(const LstmParams& params, const std::vector<std::vector<double>>& window) {
    if (window.size() != params.lookback) {
        throw BadWindowLength("window has " + std::to_string(window.size()) + " steps, expected " +
                              std::to_string(params.lookback));
    }
    std::vector<double> flat;
    flat.reserve(window.size() * params.input_dim);
    for (const auto& step : window) {
        if (step.size() != params.input_dim) throw DimensionMismatch("lstm step dim");
        flat.insert(flat.end(), step.begin(), step.end());
    }
    return lstm_forward_flat(params, flat);
}

double lstm_backward(const LstmParams& p, const std::vector<double>& window, double target,
                     LstmParams& grad) {
    check_window(p, window.size());
    std::size_t T = p.lookback, H = p.hidden_dim, D = p.input_dim;
    Trace tr = run_forward(p, window);

    double err = tr.pred - target;
    double loss = err * err;
    double dout = 2.0 * err;

    grad.head_b += dout;
    std::vector<double> dh(H), dc(H, 0.0);
    for (std::size_t i = 0; i < H; ++i) {
        grad.head_w[i] += dout * tr.h[T - 1][i];
        dh[i] = dout * p.head_w[i];
    }

    for (std::size_t t = T; t-- > 0;) {
        const double* x = window.data() + t * D;
        const std::vector<double>& h_prev =
            (t > 0) ? tr.h[t - 1] : std::vector<double>(H, 0.0);
        double c_prev_val;
        std::vector<double> dzi(H), dzf(H), dzo(H), dzg(H);
        for (std::size_t i = 0; i < H; ++i) {
            double go = tr.go[t][i], tc = tr.tc[t][i];
            // h = o * tanh(c)
            double d_go = dh[i] * tc;
            double d_c = dh[i] * go * (1.0 - tc * tc) + dc[i];
            c_prev_val = (t > 0) ? tr.c[t - 1][i] : 0.0;
            double gi = tr.gi[t][i], gf = tr.gf[t][i], gg = tr.gg[t][i];
            double d_gi = d_c * gg;
            double d_gf = d_c * c_prev_val;
            double d_gg = d_c * gi;
            dc[i] = d_c * gf;  // flows to c_{t-1}
            dzi[i] = d_gi * gi * (1.0 - gi);
            dzf[i] = d_gf * gf * (1.0 - gf);
            dzo[i] = d_go * go * (1.0 - go);
            dzg[i] = d_gg * (1.0 - gg * gg);
        }
        std::vector<double> dh_prev(H, 0.0);
        for (std::size_t i = 0; i < H; ++i) {
            grad.b_i[i] += dzi[i];
            grad.b_f[i] += dzf[i];
            grad.b_o[i] += dzo[i];
            grad.b_g[i] += dzg[i];
            for (std::size_t j = 0; j < D; ++j) {
                grad.w_i(i, j) += dzi[i] * x[j];
                grad.w_f(i, j) += dzf[i] * x[j];
                grad.w_o(i, j) += dzo[i] * x[j];
                grad.w_g(i, j) += dzg[i] * x[j];
            }
            for (std::size_t j = 0; j < H; ++j) {
                grad.u_i(i, j) += dzi[i] * h_prev[j];
                grad.u_f(i, j) += dzf[i] * h_prev[j];
                grad.u_o(i, j) += dzo[i] * h_prev[j];
                grad.u_g(i, j) += dzg[i] * h_prev[j];
                dh_prev[j] += p.u_i(i, j) * dzi[i] + p.u_f(i, j) * dzf[i] +
                              p.u_o(i, j) * dzo[i] + p.u_g(i, j) * dzg[i];
            }
        }
        dh = std::move(dh_prev);
    }
    return loss;
}

LstmParams zero_like(const LstmParams& p) {
    LstmParams g;
    g.input_dim = p.input_dim;
    g.hidden_dim = p.hidden_dim;
    g.lookback = p.lookback;
    g.w_i = Matrix(p.hidden_dim, p.input_dim);
    g.w_f = g.w_o = g.w_g = g.w_i;
    g.u_i = Matrix(p.hidden_dim, p.hidden_dim);
    g.u_f = g.u_o = g.u_g = g.u_i;
    g.b_i.assign(p.hidden_dim, 0.0);
    g.b_f = g.b_o = g.b_g = g.b_i;
    g.head_w.assign(p.hidden_dim, 0.0);
    g.head_b = 0.0;
    return g;
}

std::vector<double> flatten(const LstmParams& p) {
    std::vector<double> flat;
    flat.reserve(p.param_count());
    for (const Matrix* m : {&p.w_i, &p.w_f, &p.w_o, &p.w_g, &p.u_i, &p.u_f, &p.u_o, &p.u_g}) {
        flat.insert(flat.end(), m->a.begin(), m->a.end());
    }
    for (const auto* b : {&p.b_i, &p.b_f, &p.b_o, &p.b_g}) {
        flat.insert(flat.end(), b->begin(), b->end());
    }
    flat.insert(flat.end(), p.head_w.begin(), p.head_w.end());
    flat.push_back(p.head_b);
    return flat;
}

void unflatten(LstmParams& p, const std::vector<double>& flat) {
    if (flat.size() != p.param_count()) throw DimensionMismatch("unflatten size");
    std::size_t pos = 0;
    for (Matrix* m : {&p.w_i, &p.w_f, &p.w_o, &p.w_g, &p.u_i, &p.u_f, &p.u_o, &p.u_g}) {
        for (double& v : m->a) v = flat[pos++];
    }
    for (auto* b : {&p.b_i, &p.b_f, &p.b_o, &p.b_g}) {
        for (double& v : *b) v = flat[pos++];
    }
    for (double& v : p.head_w) v = flat[pos++];
    p.head_b = flat[pos++];
}

}  // namespace gridseer
