#include "gridseer/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gridseer/errors.hpp"

namespace gridseer {

std::string to_string(QuestionId id) {
    switch (id) {
        case QuestionId::NodePower: return "node_power";
        case QuestionId::ClusterPower: return "cluster_power";
        case QuestionId::ResourceUsage: return "resource_usage";
        case QuestionId::Temperature: return "temperature";
        case QuestionId::NetworkEnergy: return "network_energy";
        default: return "cpu_forecast";
    }
}

QuestionId question_from_string(const std::string& name) {
    if (name == "node_power") return QuestionId::NodePower;
    if (name == "cluster_power") return QuestionId::ClusterPower;
    if (name == "resource_usage") return QuestionId::ResourceUsage;
    if (name == "temperature") return QuestionId::Temperature;
    if (name == "network_energy") return QuestionId::NetworkEnergy;
    if (name == "cpu_forecast") return QuestionId::CpuForecast;
    throw OutOfRange("unknown question '" + name + "'");
}

QuestionSpec resolve_question(QuestionId id) {
    switch (id) {
        case QuestionId::NodePower:
            return {id, {"cpu_pct", "net_mbps"}, "power_w", ModelFamily::Mlp, Resolution::Raw};
        case QuestionId::ClusterPower:
            // Same per-node binding as NodePower; cluster level comes from
            // aggregate_cluster over the K node models.
            return {id, {"cpu_pct", "net_mbps"}, "power_w", ModelFamily::Mlp, Resolution::Raw};
        case QuestionId::ResourceUsage:
            return resource_usage_specs().front();
        case QuestionId::Temperature:
            return {id,
                    {"cpu_pct", "mem_pct", "disk_io_mbps", "disk_used_pct"},
                    "temp_c",
                    ModelFamily::Mlp,
                    Resolution::Raw};
        case QuestionId::NetworkEnergy:
            // Network devices expose the same counters; the operator restricts
            // the input to network-device node ids.
            return {id, {"cpu_pct", "net_mbps"}, "power_w", ModelFamily::Mlp, Resolution::Raw};
        default:  // CpuForecast: autoregressive, univariate history window
            return {QuestionId::CpuForecast, {"cpu_pct"}, "cpu_pct", ModelFamily::Lstm,
                    Resolution::Raw};
    }
}

std::vector<QuestionSpec> resource_usage_specs() {
    // One independent model per resource; features are the remaining
    // resource counters.
    const std::vector<std::string> all = {"cpu_pct", "mem_pct", "disk_io_mbps", "disk_used_pct",
                                          "net_mbps"};
    std::vector<QuestionSpec> specs;
    for (const char* target : {"cpu_pct", "mem_pct", "disk_io_mbps", "net_mbps"}) {
        QuestionSpec s;
        s.id = QuestionId::ResourceUsage;
        s.target = target;
        s.model_family = ModelFamily::Mlp;
        s.resolution = Resolution::Raw;
        for (const auto& c : all) {
            if (c != target) s.features.push_back(c);
        }
        specs.push_back(std::move(s));
    }
    return specs;
}

NormStats fit_norm_stats(const QuestionSpec& spec, const TelemetrySeries& train) {
    std::vector<std::vector<double>> rows(train.length());
    for (const auto& name : spec.features) {
        const auto& col = train.column(name);
        for (std::size_t i = 0; i < col.size(); ++i) rows[i].push_back(col[i]);
    }
    const auto& tgt = train.column(spec.target);
    for (std::size_t i = 0; i < tgt.size(); ++i) rows[i].push_back(tgt[i]);
    return normalize_fit(rows);
}

Dataset make_dataset(const QuestionSpec& spec, const NormStats& stats,
                     const TelemetrySeries& series, std::size_t lookback) {
    Dataset ds;
    if (spec.model_family == ModelFamily::Mlp) {
        const auto& tgt = series.column(spec.target);
        std::vector<const std::vector<double>*> cols;
        for (const auto& name : spec.features) cols.push_back(&series.column(name));
        for (std::size_t i = 0; i < series.length(); ++i) {
            std::vector<double> row;
            for (std::size_t c = 0; c < cols.size(); ++c) {
                row.push_back(normalize_value(stats, c, (*cols[c])[i]));
            }
            ds.inputs.push_back(std::move(row));
            ds.targets.push_back(normalize_value(stats, cols.size(), tgt[i]));
        }
    } else {
        if (lookback < 1) throw OutOfRange("lookback must be >= 1");
        const auto& tgt = series.column(spec.target);
        if (series.length() < lookback + 1) {
            throw SeriesShorterThanLookback("need " + std::to_string(lookback + 1) + " rows, got " +
                                            std::to_string(series.length()));
        }
        std::size_t tcol = spec.features.size();  // target shares the feature column here
        for (std::size_t j = 0; j + lookback < series.length(); ++j) {
            std::vector<double> window(lookback);
            for (std::size_t t = 0; t < lookback; ++t) {
                window[t] = normalize_value(stats, tcol, tgt[j + t]);
            }
            ds.inputs.push_back(std::move(window));
            ds.targets.push_back(normalize_value(stats, tcol, tgt[j + lookback]));
        }
    }
    return ds;
}

std::vector<double> predict_series(const QuestionSpec& spec, const Params& params,
                                   const NormStats& stats, const TelemetrySeries& series) {
    std::vector<double> out;
    if (spec.model_family == ModelFamily::Mlp) {
        const auto& mlp = std::get<MlpParams>(params);
        std::vector<const std::vector<double>*> cols;
        for (const auto& name : spec.features) cols.push_back(&series.column(name));
        std::size_t tcol = cols.size();
        std::vector<double> row(cols.size());
        for (std::size_t i = 0; i < series.length(); ++i) {
            for (std::size_t c = 0; c < cols.size(); ++c) {
                row[c] = normalize_value(stats, c, (*cols[c])[i]);
            }
            out.push_back(denormalize_value(stats, tcol, mlp_forward(mlp, row)));
        }
    } else {
        const auto& lstm = std::get<LstmParams>(params);
        const auto& tgt = series.column(spec.target);
        std::size_t lookback = lstm.lookback;
        if (series.length() < lookback) {
            throw SeriesShorterThanLookback("need " + std::to_string(lookback) + " rows, got " +
                                            std::to_string(series.length()));
        }
        std::size_t tcol = spec.features.size();
        for (std::size_t j = 0; j + lookback <= series.length(); ++j) {
            std::vector<double> window(lookback);
            for (std::size_t t = 0; t < lookback; ++t) {
                window[t] = normalize_value(stats, tcol, tgt[j + t]);
            }
            out.push_back(denormalize_value(stats, tcol, lstm_forward_flat(lstm, window)));
        }
    }
    return out;
}

std::vector<double> aggregate_cluster(const std::vector<std::vector<double>>& node_predictions) {
    if (node_predictions.empty()) throw EmptyCluster("no node predictions");
    std::size_t n = node_predictions.front().size();
    for (const auto& v : node_predictions) {
        if (v.size() != n) {
            throw LengthMismatch(std::to_string(v.size()) + " vs " + std::to_string(n));
        }
    }
    std::vector<double> sum(n, 0.0);
    for (const auto& v : node_predictions) {
        for (std::size_t i = 0; i < n; ++i) sum[i] += v[i];
    }
    return sum;
}

std::vector<SummaryRow> summarize(const std::vector<double>& predictions,
                                  const std::vector<Instant>& timestamps, Resolution resolution) {
    if (predictions.size() != timestamps.size()) {
        throw LengthMismatch(std::to_string(predictions.size()) + " predictions vs " +
                             std::to_string(timestamps.size()) + " timestamps");
    }
    auto bucket_start = [&](Instant t) {
        switch (resolution) {
            case Resolution::Daily: return day_start(t);
            case Resolution::Weekly: return week_start(t);
            case Resolution::Monthly: return month_start(t);
            default: return t;  // Raw: every row its own bucket
        }
    };
    std::vector<SummaryRow> rows;
    std::map<Instant, std::vector<double>> buckets;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        buckets[bucket_start(timestamps[i])].push_back(predictions[i]);
    }
    for (const auto& [start, vals] : buckets) {
        SummaryRow r{start, vals[0], 0.0, vals[0]};
        double acc = 0;
        for (double v : vals) {
            r.min = std::min(r.min, v);
            r.max = std::max(r.max, v);
            acc += v;
        }
        r.avg = acc / static_cast<double>(vals.size());
        rows.push_back(r);
    }
    return rows;
}

SurfaceGrid surface(const MlpParams& params, const NormStats& stats,
                    std::pair<double, double> x_range, std::pair<double, double> y_range,
                    std::size_t n, const std::string& x_name, const std::string& y_name) {
    if (params.input_dim() != 2) throw WrongInputDim("surface model must take 2 inputs");
    if (n < 2) throw BadRange("need at least 2 grid points per axis");
    if (!(x_range.first < x_range.second) || !(y_range.first < y_range.second)) {
        throw BadRange("axis ranges must be non-empty and ascending");
    }
    SurfaceGrid g;
    g.x_axis_name = x_name;
    g.y_axis_name = y_name;
    for (std::size_t i = 0; i < n; ++i) {
        double t = static_cast<double>(i) / static_cast<double>(n - 1);
        g.x_values.push_back(x_range.first + t * (x_range.second - x_range.first));
        g.y_values.push_back(y_range.first + t * (y_range.second - y_range.first));
    }
    g.z.assign(n, std::vector<double>(n));
    std::vector<double> row(2);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            row[0] = normalize_value(stats, 0, g.x_values[i]);
            row[1] = normalize_value(stats, 1, g.y_values[j]);
            g.z[j][i] = denormalize_value(stats, 2, mlp_forward(params, row));
        }
    }
    return g;
}

Params merge_models(const std::vector<Params>& params_list, const std::vector<double>& weights) {
    if (params_list.empty()) throw EmptyInput("merge needs at least one model");
    if (weights.size() != params_list.size()) {
        throw LengthMismatch(std::to_string(weights.size()) + " weights for " +
                             std::to_string(params_list.size()) + " models");
    }
    double total = 0;
    for (double w : weights) {
        if (w < 0) throw OutOfRange("merge weights must be >= 0");
        total += w;
    }
    if (total <= 0) throw AllZeroWeights("weight sum must be positive");

    return std::visit(
        [&](const auto& first) -> Params {
            using P = std::decay_t<decltype(first)>;
            std::vector<double> acc(flatten(first).size(), 0.0);
            for (std::size_t k = 0; k < params_list.size(); ++k) {
                const P* p = std::get_if<P>(&params_list[k]);
                if (!p || !p->same_architecture(first)) {
                    throw ArchitectureMismatch("model " + std::to_string(k));
                }
                auto flat = flatten(*p);
                double w = weights[k] / total;
                for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * flat[i];
            }
            P merged = first;
            unflatten(merged, acc);
            return merged;
        },
        params_list.front());
}

}  // namespace gridseer
