#pragma once

#include <string>
#include <variant>
#include <vector>

#include "gridseer/lstm.hpp"
#include "gridseer/mlp.hpp"
#include "gridseer/norm.hpp"
#include "gridseer/telemetry.hpp"
#include "gridseer/train.hpp"

namespace gridseer {

enum class QuestionId {
    NodePower,
    ClusterPower,
    ResourceUsage,
    Temperature,
    NetworkEnergy,
    CpuForecast,
};

std::string to_string(QuestionId id);
QuestionId question_from_string(const std::string& name);

enum class ModelFamily { Mlp, Lstm };

// Binds a question to concrete feature columns, a target column, a model
// family and the reporting resolution. CpuForecast is the only LSTM
// question; it is autoregressive (the feature column is the target's own
// history), every other question keeps target out of its features.
struct QuestionSpec {
    QuestionId id;
    std::vector<std::string> features;
    std::string target;
    ModelFamily model_family;
    Resolution resolution;
};

struct SummaryRow {
    Instant period_start;
    double min, avg, max;
};

struct SurfaceGrid {
    std::string x_axis_name, y_axis_name;
    std::vector<double> x_values, y_values;           // strictly ascending
    std::vector<std::vector<double>> z;               // z[j][i], |y| rows of |x|
};

using Params = std::variant<MlpParams, LstmParams>;

// Fixed binding table; pure and total.
QuestionSpec resolve_question(QuestionId id);

// The resource-usage question covers four independent per-target models;
// this lists all of them (targets cpu_pct, mem_pct, disk_io_mbps, net_mbps).
std::vector<QuestionSpec> resource_usage_specs();

// Builds the normalization basis (feature columns then target) from a
// training series.
NormStats fit_norm_stats(const QuestionSpec& spec, const TelemetrySeries& train);

// Model-ready dataset from a series: normalized feature rows (MLP) or
// flattened lookback windows over the target history (LSTM).
Dataset make_dataset(const QuestionSpec& spec, const NormStats& stats,
                     const TelemetrySeries& series, std::size_t lookback);

// One denormalized prediction per eligible row. For the LSTM, windows slide
// over the series; prediction j forecasts the step after window j, so a
// series of exactly lookback rows yields one (out-of-sample) prediction.
std::vector<double> predict_series(const QuestionSpec& spec, const Params& params,
                                   const NormStats& stats, const TelemetrySeries& series);

// Element-wise sum of aligned per-node prediction vectors.
std::vector<double> aggregate_cluster(const std::vector<std::vector<double>>& node_predictions);

// Per calendar bucket (min, mean, max) of predictions.
std::vector<SummaryRow> summarize(const std::vector<double>& predictions,
                                  const std::vector<Instant>& timestamps, Resolution resolution);

// Tabulates a 2-input model over an n x n grid; pure evaluation, never
// interpolation. Stats must cover [x, y, target].
SurfaceGrid surface(const MlpParams& params, const NormStats& stats,
                    std::pair<double, double> x_range, std::pair<double, double> y_range,
                    std::size_t n, const std::string& x_name = "cpu_pct",
                    const std::string& y_name = "net_mbps");

// Weighted parameter averaging of structurally identical models.
Params merge_models(const std::vector<Params>& params_list, const std::vector<double>& weights);

}  // namespace gridseer
