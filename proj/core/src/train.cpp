#include "gridseer/train.hpp"

#include <algorithm>
#include <cmath>

#include "gridseer/errors.hpp"
#include "gridseer/rng.hpp"

namespace gridseer {

namespace {

double sample_loss(const MlpParams& p, const std::vector<double>& x, double y, MlpParams& g) {
    return mlp_backward(p, x, y, g);
}
double sample_loss(const LstmParams& p, const std::vector<double>& x, double y, LstmParams& g) {
    return lstm_backward(p, x, y, g);
}

double predict(const MlpParams& p, const std::vector<double>& x) { return mlp_forward(p, x); }
double predict(const LstmParams& p, const std::vector<double>& x) {
    return lstm_forward_flat(p, x);
}

// Mean loss and mean gradient over dataset rows [first, last).
template <class P>
double batch_grad(const P& params, const Dataset& ds, const std::vector<std::size_t>& order,
                  std::size_t first, std::size_t last, P& grad) {
    double loss = 0;
    for (std::size_t k = first; k < last; ++k) {
        std::size_t i = order[k];
        loss += sample_loss(params, ds.inputs[i], ds.targets[i], grad);
    }
    double inv = 1.0 / static_cast<double>(last - first);
    auto flat = flatten(grad);
    for (double& v : flat) v *= inv;
    unflatten(grad, flat);
    return loss * inv;
}

template <class P>
double validation_loss(const P& params, const Dataset& ds, std::size_t first, std::size_t last) {
    double loss = 0;
    for (std::size_t i = first; i < last; ++i) {
        double e = predict(params, ds.inputs[i]) - ds.targets[i];
        loss += e * e;
    }
    return loss / static_cast<double>(last - first);
}

template <class P>
TrainResult<P> train_impl(const P& initial, const Dataset& ds, const TrainConfig& cfg) {
    if (ds.size() == 0) throw EmptyDataset("train");
    if (ds.inputs.size() != ds.targets.size()) throw LengthMismatch("inputs vs targets");
    if (cfg.learning_rate < 0) throw OutOfRange("learning_rate must be >= 0");
    if (cfg.batch_size < 1) throw OutOfRange("batch_size must be >= 1");

    // With early stopping, the chronological suffix is validation.
    std::size_t n_fit = ds.size();
    std::size_t val_first = ds.size();
    if (cfg.early_stop_patience && ds.size() >= 8) {
        n_fit = ds.size() - std::max<std::size_t>(1, ds.size() * 15 / 100);
        val_first = n_fit;
    }

    TrainResult<P> result{initial, {}};
    P& params = result.params;
    std::vector<double> velocity(flatten(params).size(), 0.0);

    Rng rng(cfg.seed);
    std::vector<std::size_t> order(n_fit);
    for (std::size_t i = 0; i < n_fit; ++i) order[i] = i;

    P best = params;
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t since_best = 0;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Fisher-Yates with the shared stream; identical seeds give
        // identical shuffle sequences across runs.
        for (std::size_t i = n_fit; i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(rng.next_u64() % i);
            std::swap(order[i - 1], order[j]);
        }

        double epoch_loss = 0;
        std::size_t n_batches = 0;
        for (std::size_t first = 0; first < n_fit; first += cfg.batch_size) {
            std::size_t last = std::min(first + cfg.batch_size, n_fit);
            P grad = zero_like(params);
            epoch_loss += batch_grad(params, ds, order, first, last, grad);
            ++n_batches;

            auto g = flatten(grad);
            if (cfg.gradient_clip) {
                double norm2 = 0;
                for (double v : g) norm2 += v * v;
                double norm = std::sqrt(norm2);
                if (norm > *cfg.gradient_clip) {
                    double scale = *cfg.gradient_clip / norm;
                    for (double& v : g) v *= scale;
                }
            }
            auto p = flatten(params);
            if (cfg.optimizer == Optimizer::MomentumGD) {
                for (std::size_t i = 0; i < p.size(); ++i) {
                    velocity[i] = cfg.momentum * velocity[i] - cfg.learning_rate * g[i];
                    p[i] += velocity[i];
                }
            } else {
                for (std::size_t i = 0; i < p.size(); ++i) p[i] -= cfg.learning_rate * g[i];
            }
            unflatten(params, p);
        }
        epoch_loss /= static_cast<double>(std::max<std::size_t>(1, n_batches));
        result.history.push_back(epoch_loss);

        for (double v : flatten(params)) {
            if (!std::isfinite(v)) {
                throw DivergedToNonFinite("epoch " + std::to_string(epoch));
            }
        }

        if (cfg.early_stop_patience && val_first < ds.size()) {
            double val = validation_loss(params, ds, val_first, ds.size());
            if (val < best_val) {
                best_val = val;
                best = params;
                since_best = 0;
            } else if (++since_best > *cfg.early_stop_patience) {
                params = best;
                return result;
            }
        }
    }
    if (cfg.early_stop_patience && val_first < ds.size() && best_val < std::numeric_limits<double>::infinity()) {
        params = best;
    }
    return result;
}

template <class P>
double grad_check_impl(const P& params, const Dataset& batch) {
    if (batch.size() == 0) throw EmptyDataset("grad_check");
    std::vector<std::size_t> order(batch.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    P grad = zero_like(params);
    batch_grad(params, batch, order, 0, batch.size(), grad);
    auto analytic = flatten(grad);

    auto loss_at = [&](const std::vector<double>& flat) {
        P p = params;
        unflatten(p, flat);
        double loss = 0;
        for (std::size_t i = 0; i < batch.size(); ++i) {
            double e = predict(p, batch.inputs[i]) - batch.targets[i];
            loss += e * e;
        }
        return loss / static_cast<double>(batch.size());
    };

    const double step = 1e-5;
    auto flat = flatten(params);
    double worst = 0;
    for (std::size_t k = 0; k < flat.size(); ++k) {
        double saved = flat[k];
        flat[k] = saved + step;
        double up = loss_at(flat);
        flat[k] = saved - step;
        double down = loss_at(flat);
        flat[k] = saved;
        double fd = (up - down) / (2 * step);
        double rel = std::abs(analytic[k] - fd) /
                     std::max({std::abs(analytic[k]), std::abs(fd), 1e-8});
        worst = std::max(worst, rel);
    }
    return worst;
}

}  // namespace

TrainResult<MlpParams> train(const MlpParams& params, const Dataset& dataset,
                             const TrainConfig& config) {
    return train_impl(params, dataset, config);
}
TrainResult<LstmParams> train(const LstmParams& params, const Dataset& dataset,
                              const TrainConfig& config) {
    return train_impl(params, dataset, config);
}

double grad_check(const MlpParams& params, const Dataset& batch) {
    return grad_check_impl(params, batch);
}
double grad_check(const LstmParams& params, const Dataset& batch) {
    return grad_check_impl(params, batch);
}

}  // namespace gridseer
