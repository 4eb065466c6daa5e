#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gridseer/bundle.hpp"
#include "gridseer/catalog.hpp"
#include "gridseer/errors.hpp"
#include "gridseer/registry.hpp"
#include "gridseer/sha256.hpp"
#include "gridseer/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace gridseer;

namespace {

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidInput: return 2;
        case ErrorKind::Network: return 3;
        case ErrorKind::Verification: return 4;
        default: return 1;
    }
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingInputFile(path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputNotWritable(path.string());
    out << text;
    if (!out) throw OutputNotWritable(path.string());
}

std::string default_registry() {
    const char* env = std::getenv("GRIDSEER_REGISTRY");
    return env ? env : "http://127.0.0.1:8080";
}

struct PredictionFile {
    std::string header;
    std::vector<Instant> timestamps;
    std::vector<std::string> nodes;
    std::vector<double> values;
};

PredictionFile read_predictions(const fs::path& path) {
    std::istringstream in(read_text(path));
    PredictionFile pf;
    if (!std::getline(in, pf.header)) throw MissingHeader(path.string() + " is empty");
    if (pf.header.rfind("timestamp,node_id,predicted_", 0) != 0) {
        throw MissingHeader(path.string() + " is not a predictions file");
    }
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++row;
        auto c1 = line.find(',');
        auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            throw RaggedRow(path.string() + " row " + std::to_string(row));
        }
        pf.timestamps.push_back(parse_iso8601(line.substr(0, c1)));
        pf.nodes.push_back(line.substr(c1 + 1, c2 - c1 - 1));
        char* end = nullptr;
        pf.values.push_back(std::strtod(line.c_str() + c2 + 1, &end));
        if (end != line.c_str() + line.size()) {
            throw OutOfRange(path.string() + " row " + std::to_string(row));
        }
    }
    return pf;
}

struct TrainFlags {
    std::string question;
    std::string input;
    std::string node;
    std::string out;
    std::string resolution = "raw";
    std::string target;  // resource_usage variant selector
    std::string publisher = "anonymous";
    std::uint64_t seed = 0;
    std::size_t epochs = 200;
    double learning_rate = 0.05;
    std::size_t hidden = 32;
    std::size_t lookback = 48;
    bool json_out = false;
};

int cmd_train(const TrainFlags& f) {
    QuestionId qid = question_from_string(f.question);
    QuestionSpec spec = resolve_question(qid);
    if (qid == QuestionId::ResourceUsage && !f.target.empty()) {
        bool found = false;
        for (const auto& s : resource_usage_specs()) {
            if (s.target == f.target) {
                spec = s;
                found = true;
            }
        }
        if (!found) throw OutOfRange("no resource_usage model with target '" + f.target + "'");
    }
    spec.resolution = resolution_from_string(f.resolution);

    std::string csv = read_text(f.input);
    auto records = parse_csv(csv);
    TelemetrySeries series = build_series(records, f.node, infer_interval(records, f.node));
    if (spec.resolution != Resolution::Raw) {
        series = resample(series, spec.resolution, Agg::Mean);
    }
    auto [train_series, test_series] = split(series, SplitSpec{});
    NormStats stats = fit_norm_stats(spec, train_series);

    TrainConfig cfg;
    cfg.seed = f.seed;
    cfg.epochs = f.epochs;
    cfg.learning_rate = f.learning_rate;

    Params params;
    if (spec.model_family == ModelFamily::Mlp) {
        Dataset train_ds = make_dataset(spec, stats, train_series, 0);
        MlpParams init = init_mlp({spec.features.size(), f.hidden, f.hidden, 1}, f.seed);
        params = train(init, train_ds, cfg).params;
    } else {
        Dataset train_ds = make_dataset(spec, stats, train_series, f.lookback);
        LstmParams init = init_lstm(1, f.hidden, f.lookback, f.seed);
        params = train(init, train_ds, cfg).params;
    }

    // Evaluate on the chronological test suffix, in target units.
    std::vector<double> actual, predicted;
    if (spec.model_family == ModelFamily::Mlp) {
        predicted = predict_series(spec, params, stats, test_series);
        actual = test_series.column(spec.target);
    } else {
        Dataset test_ds = make_dataset(spec, stats, test_series, f.lookback);
        const auto& lstm = std::get<LstmParams>(params);
        std::size_t tcol = spec.features.size();
        for (std::size_t i = 0; i < test_ds.size(); ++i) {
            predicted.push_back(
                denormalize_value(stats, tcol, lstm_forward_flat(lstm, test_ds.inputs[i])));
            actual.push_back(denormalize_value(stats, tcol, test_ds.targets[i]));
        }
    }
    Metrics m = compute_metrics(actual, predicted);
    double r2 = r_squared(actual, predicted);

    ModelBundle bundle;
    bundle.manifest.question = qid;
    bundle.manifest.model_family = spec.model_family;
    bundle.manifest.input_columns = spec.features;
    bundle.manifest.target_column = spec.target;
    bundle.manifest.resolution = spec.resolution;
    bundle.manifest.lookback = spec.model_family == ModelFamily::Lstm ? f.lookback : 0;
    bundle.manifest.created_at = series.timestamps.back();
    bundle.manifest.publisher = f.publisher;
    bundle.manifest.train_fingerprint =
        "rows=" + std::to_string(series.length()) + ";span=" +
        format_iso8601(series.timestamps.front()) + "/" +
        format_iso8601(series.timestamps.back()) + ";input_sha256=" + sha256_hex(csv);
    bundle.norm_stats = stats;
    bundle.params = std::move(params);

    auto bytes = pack(bundle);
    write_file(f.out, bytes);
    ModelBundle packed = unpack(bytes);

    if (f.json_out) {
        json j;
        j["bundle_id"] = packed.manifest.bundle_id;
        j["mae"] = m.mae;
        j["mse"] = m.mse;
        j["r2"] = r2;
        j["n_test"] = m.n;
        std::cout << j.dump() << "\n";
    } else {
        std::cout << "trained " << to_string(qid) << " model for node " << f.node << "\n"
                  << "  test MAE " << format_double(m.mae) << ", MSE " << format_double(m.mse)
                  << ", R2 " << format_double(r2) << " (" << m.n << " samples)\n"
                  << "  bundle " << packed.manifest.bundle_id << " -> " << f.out << "\n";
    }
    return 0;
}

int cmd_run(const std::string& bundle_path, const std::string& input_dir,
            const std::string& output_dir, bool json_out) {
    ModelBundle bundle = unpack(read_file(bundle_path));
    RunReport report = run_bundle(bundle, input_dir, output_dir);
    if (json_out) {
        json j;
        j["rows_read"] = report.rows_read;
        j["predictions_written"] = report.predictions_written;
        if (report.metrics) {
            j["mae"] = report.metrics->mae;
            j["mse"] = report.metrics->mse;
        } else {
            j["mae"] = nullptr;
            j["mse"] = nullptr;
        }
        j["wall_time_s"] = report.wall_time;
        std::cout << j.dump() << "\n";
    } else {
        std::cout << "read " << report.rows_read << " rows, wrote " << report.predictions_written
                  << " predictions\n";
        if (report.metrics) {
            std::cout << "  MAE " << format_double(report.metrics->mae) << ", MSE "
                      << format_double(report.metrics->mse) << " over " << report.metrics->n
                      << " rows with ground truth\n";
        }
    }
    return 0;
}

int cmd_summarize(const std::string& predictions, const std::string& resolution,
                  const std::string& out) {
    PredictionFile pf = read_predictions(predictions);
    auto rows = summarize(pf.values, pf.timestamps, resolution_from_string(resolution));
    std::string csv = "period_start,min,avg,max\n";
    for (const auto& r : rows) {
        csv += format_iso8601(r.period_start) + "," + format_double(r.min) + "," +
               format_double(r.avg) + "," + format_double(r.max) + "\n";
    }
    if (out.empty()) {
        std::cout << csv;
    } else {
        write_text(out, csv);
    }
    return 0;
}

int cmd_surface(const std::string& bundle_path, const std::string& out, std::size_t n,
                std::vector<double> x_range, std::vector<double> y_range) {
    ModelBundle bundle = unpack(read_file(bundle_path));
    const auto* mlp = std::get_if<MlpParams>(&bundle.params);
    if (!mlp) throw WrongInputDim("surface needs an MLP bundle");
    const NormStats& st = bundle.norm_stats;
    std::pair<double, double> xr =
        x_range.size() == 2 ? std::pair{x_range[0], x_range[1]} : std::pair{st.min[0], st.max[0]};
    std::pair<double, double> yr =
        y_range.size() == 2 ? std::pair{y_range[0], y_range[1]} : std::pair{st.min[1], st.max[1]};
    SurfaceGrid g = surface(*mlp, st, xr, yr, n, bundle.manifest.input_columns[0],
                            bundle.manifest.input_columns[1]);

    // First row: x axis; first column: y axis; body: z values.
    std::string csv = g.y_axis_name + "\\" + g.x_axis_name;
    for (double x : g.x_values) csv += "," + format_double(x);
    csv += "\n";
    for (std::size_t j = 0; j < g.y_values.size(); ++j) {
        csv += format_double(g.y_values[j]);
        for (double z : g.z[j]) csv += "," + format_double(z);
        csv += "\n";
    }
    write_text(out, csv);
    return 0;
}

int cmd_aggregate(const std::vector<std::string>& inputs, const std::string& out) {
    std::vector<std::vector<double>> vectors;
    PredictionFile first;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        PredictionFile pf = read_predictions(inputs[k]);
        if (k == 0) {
            first = pf;
        } else {
            if (pf.header != first.header || pf.timestamps != first.timestamps) {
                throw LengthMismatch("prediction files are not aligned");
            }
        }
        vectors.push_back(std::move(pf.values));
    }
    auto sum = aggregate_cluster(vectors);
    std::string csv = first.header + "\n";
    for (std::size_t i = 0; i < sum.size(); ++i) {
        csv += format_iso8601(first.timestamps[i]) + ",cluster," + format_double(sum[i]) + "\n";
    }
    write_text(out, csv);
    return 0;
}

int cmd_synth(const std::string& config_path, const std::string& out_dir) {
    SynthConfig config;
    if (!config_path.empty()) config = synth_config_from_json(read_text(config_path));
    fs::create_directories(out_dir);
    auto cluster = gen_cluster(config, config.nodes);
    std::vector<TelemetryRecord> all;
    std::vector<GroundTruth> truths;
    for (auto& [records, truth] : cluster) {
        all.insert(all.end(), records.begin(), records.end());
        truths.push_back(std::move(truth));
    }
    write_text(fs::path(out_dir) / "telemetry.csv", serialize_csv(all));
    write_text(fs::path(out_dir) / "groundtruth.json", ground_truth_to_json(truths));
    std::cout << "wrote " << all.size() << " rows for " << config.nodes << " node(s) to "
              << out_dir << "\n";
    return 0;
}

int cmd_merge(const std::vector<std::string>& inputs, std::vector<double> weights,
              const std::string& out) {
    if (weights.empty()) weights.assign(inputs.size(), 1.0);
    std::vector<Params> params_list;
    ModelBundle base = unpack(read_file(inputs[0]));
    std::vector<std::string> ids;
    for (const auto& path : inputs) {
        ModelBundle b = unpack(read_file(path));
        ids.push_back(b.manifest.bundle_id);
        params_list.push_back(std::move(b.params));
    }
    base.params = merge_models(params_list, weights);
    std::string fp = "merged_from=";
    for (std::size_t i = 0; i < ids.size(); ++i) fp += (i ? "+" : "") + ids[i].substr(0, 12);
    base.manifest.train_fingerprint = fp;
    auto bytes = pack(base);
    write_file(out, bytes);
    std::cout << "merged " << inputs.size() << " bundles -> " << out << " ("
              << unpack(bytes).manifest.bundle_id << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"model-to-data telemetry forecasting toolkit"};
    app.require_subcommand(1);

    // validate
    auto* validate = app.add_subcommand("validate", "parse a telemetry CSV and report violations");
    std::string v_input;
    validate->add_option("--input", v_input, "telemetry CSV path")->required();

    // train
    TrainFlags tf;
    auto* train_cmd = app.add_subcommand("train", "train a model and pack it as a bundle");
    train_cmd->add_option("--question", tf.question)->required();
    train_cmd->add_option("--input", tf.input)->required();
    train_cmd->add_option("--node", tf.node)->required();
    train_cmd->add_option("--out", tf.out)->required();
    train_cmd->add_option("--seed", tf.seed);
    train_cmd->add_option("--epochs", tf.epochs);
    train_cmd->add_option("--resolution", tf.resolution);
    train_cmd->add_option("--target", tf.target, "resource_usage target column");
    train_cmd->add_option("--lr", tf.learning_rate);
    train_cmd->add_option("--hidden", tf.hidden);
    train_cmd->add_option("--lookback", tf.lookback);
    train_cmd->add_option("--publisher", tf.publisher);
    train_cmd->add_flag("--json", tf.json_out);

    // run
    auto* run_cmd = app.add_subcommand("run", "run a bundle against an input directory");
    std::string r_bundle, r_in, r_out;
    bool r_json = false;
    run_cmd->add_option("--bundle", r_bundle)->required();
    run_cmd->add_option("--input-dir", r_in)->required();
    run_cmd->add_option("--output-dir", r_out)->required();
    run_cmd->add_flag("--json", r_json);

    // summarize
    auto* sum_cmd = app.add_subcommand("summarize", "min/avg/max per calendar period");
    std::string s_pred, s_res = "daily", s_out;
    sum_cmd->add_option("--predictions", s_pred)->required();
    sum_cmd->add_option("--resolution", s_res);
    sum_cmd->add_option("--out", s_out);

    // surface
    auto* surf_cmd = app.add_subcommand("surface", "tabulate a 2-input model over a grid");
    std::string g_bundle, g_out;
    std::size_t g_n = 50;
    std::vector<double> g_x, g_y;
    surf_cmd->add_option("--bundle", g_bundle)->required();
    surf_cmd->add_option("--out", g_out)->required();
    surf_cmd->add_option("--n", g_n);
    surf_cmd->add_option("--x-range", g_x)->expected(2);
    surf_cmd->add_option("--y-range", g_y)->expected(2);

    // aggregate
    auto* agg_cmd = app.add_subcommand("aggregate", "sum aligned per-node prediction files");
    std::vector<std::string> a_inputs;
    std::string a_out;
    agg_cmd->add_option("--inputs", a_inputs)->required()->expected(-1);
    agg_cmd->add_option("--out", a_out)->required();

    // publish / pull / serve
    auto* pub_cmd = app.add_subcommand("publish", "push a bundle to a registry");
    std::string p_bundle, p_registry = default_registry();
    pub_cmd->add_option("--bundle", p_bundle)->required();
    pub_cmd->add_option("--registry", p_registry);

    auto* pull_cmd = app.add_subcommand("pull", "fetch a bundle by id");
    std::string l_id, l_registry = default_registry(), l_out;
    pull_cmd->add_option("--id", l_id)->required();
    pull_cmd->add_option("--registry", l_registry);
    pull_cmd->add_option("--out", l_out)->required();

    auto* serve_cmd = app.add_subcommand("serve", "run the registry service");
    int srv_port = 8080;
    const char* env_dir = std::getenv("GRIDSEER_REGISTRY_DIR");
    std::string srv_dir = env_dir ? env_dir : "registry-data";
    serve_cmd->add_option("--port", srv_port);
    serve_cmd->add_option("--dir", srv_dir);

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate synthetic telemetry");
    std::string sy_config, sy_out;
    synth_cmd->add_option("--config", sy_config);
    synth_cmd->add_option("--out-dir", sy_out)->required();

    // merge
    auto* merge_cmd = app.add_subcommand("merge", "weighted parameter average of bundles");
    std::vector<std::string> m_inputs;
    std::vector<double> m_weights;
    std::string m_out;
    merge_cmd->add_option("--inputs", m_inputs)->required()->expected(-1);
    merge_cmd->add_option("--weights", m_weights)->expected(-1);
    merge_cmd->add_option("--out", m_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*validate) {
            auto records = parse_csv(read_text(v_input));
            std::cout << records.size() << " rows OK\n";
            return 0;
        }
        if (*train_cmd) return cmd_train(tf);
        if (*run_cmd) return cmd_run(r_bundle, r_in, r_out, r_json);
        if (*sum_cmd) return cmd_summarize(s_pred, s_res, s_out);
        if (*surf_cmd) return cmd_surface(g_bundle, g_out, g_n, g_x, g_y);
        if (*agg_cmd) return cmd_aggregate(a_inputs, a_out);
        if (*pub_cmd) {
            RegistryClient client(p_registry);
            RegistryEntry entry = client.publish(read_file(p_bundle));
            std::cout << entry_to_json(entry) << "\n";
            return 0;
        }
        if (*pull_cmd) {
            RegistryClient client(l_registry);
            auto bytes = client.fetch(l_id);
            write_file(l_out, bytes);
            std::cout << "pulled " << l_id << " (" << bytes.size() << " bytes)\n";
            return 0;
        }
        if (*serve_cmd) {
            RegistryServer server(srv_dir);
            std::cout << "serving registry from " << srv_dir << " on port " << srv_port << "\n";
            return server.listen("0.0.0.0", srv_port) ? 0 : 1;
        }
        if (*synth_cmd) return cmd_synth(sy_config, sy_out);
        if (*merge_cmd) return cmd_merge(m_inputs, m_weights, m_out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
