#include "gridseer/bundle.hpp"

#include <chrono>
#include <cstring>
#include <fstream>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "gridseer/errors.hpp"
#include "gridseer/sha256.hpp"

namespace gridseer {

namespace {

using json = nlohmann::json;

constexpr std::size_t kManifestOffset = 16;
constexpr std::size_t kMaxFingerprint = 1024;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(v & 0xff);
    out.push_back((v >> 8) & 0xff);
    out.push_back((v >> 16) & 0xff);
    out.push_back((v >> 24) & 0xff);
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t pos) {
    return static_cast<std::uint32_t>(in[pos]) | (static_cast<std::uint32_t>(in[pos + 1]) << 8) |
           (static_cast<std::uint32_t>(in[pos + 2]) << 16) |
           (static_cast<std::uint32_t>(in[pos + 3]) << 24);
}

void put_doubles(std::vector<std::uint8_t>& out, const std::vector<double>& vals) {
    static_assert(sizeof(double) == 8);
    std::size_t pos = out.size();
    out.resize(pos + vals.size() * 8);
    std::memcpy(out.data() + pos, vals.data(), vals.size() * 8);  // host is little-endian
}

std::string family_name(ModelFamily f) { return f == ModelFamily::Mlp ? "mlp" : "lstm"; }

ModelFamily family_from_string(const std::string& s) {
    if (s == "mlp") return ModelFamily::Mlp;
    if (s == "lstm") return ModelFamily::Lstm;
    throw MalformedPayload("unknown model family '" + s + "'");
}

json manifest_to_json(const Manifest& m, const std::string& id) {
    json j;
    j["bundle_id"] = id;
    j["schema_version"] = m.schema_version;
    j["question"] = to_string(m.question);
    j["model_family"] = family_name(m.model_family);
    j["input_columns"] = m.input_columns;
    j["target_column"] = m.target_column;
    j["resolution"] = to_string(m.resolution);
    j["lookback"] = m.lookback;
    j["created_at"] = format_iso8601(m.created_at);
    j["publisher"] = m.publisher;
    j["train_fingerprint"] = m.train_fingerprint;
    return j;
}

Manifest manifest_from_json(const json& j) {
    Manifest m;
    m.schema_version = j.at("schema_version").get<std::uint32_t>();
    m.bundle_id = j.at("bundle_id").get<std::string>();
    m.question = question_from_string(j.at("question").get<std::string>());
    m.model_family = family_from_string(j.at("model_family").get<std::string>());
    m.input_columns = j.at("input_columns").get<std::vector<std::string>>();
    m.target_column = j.at("target_column").get<std::string>();
    m.resolution = resolution_from_string(j.at("resolution").get<std::string>());
    m.lookback = j.at("lookback").get<std::size_t>();
    m.created_at = parse_iso8601(j.at("created_at").get<std::string>());
    m.publisher = j.at("publisher").get<std::string>();
    m.train_fingerprint = j.at("train_fingerprint").get<std::string>();
    return m;
}

void validate_bundle(const ModelBundle& b) {
    const Manifest& m = b.manifest;
    if (m.train_fingerprint.size() > kMaxFingerprint) {
        throw InconsistentManifest("train_fingerprint exceeds 1 KiB");
    }
    if (m.input_columns.empty()) throw InconsistentManifest("no input columns");
    if (b.norm_stats.cols() != m.input_columns.size() + 1) {
        throw InconsistentManifest("norm stats cover " + std::to_string(b.norm_stats.cols()) +
                                   " columns, manifest implies " +
                                   std::to_string(m.input_columns.size() + 1));
    }
    for (std::size_t c = 0; c < b.norm_stats.cols(); ++c) {
        if (!(b.norm_stats.min[c] <= b.norm_stats.max[c])) {
            throw InconsistentManifest("norm stats min > max");
        }
    }
    if (m.model_family == ModelFamily::Mlp) {
        const auto* p = std::get_if<MlpParams>(&b.params);
        if (!p) throw InconsistentManifest("manifest says mlp, params are lstm");
        if (p->input_dim() != m.input_columns.size()) {
            throw InconsistentManifest("mlp input dim vs input_columns");
        }
        if (m.lookback != 0) throw InconsistentManifest("mlp bundles carry no lookback");
    } else {
        const auto* p = std::get_if<LstmParams>(&b.params);
        if (!p) throw InconsistentManifest("manifest says lstm, params are mlp");
        if (p->input_dim != m.input_columns.size()) {
            throw InconsistentManifest("lstm input dim vs input_columns");
        }
        if (m.lookback != p->lookback || m.lookback < 1) {
            throw InconsistentManifest("manifest lookback vs lstm params");
        }
    }
    // Columns must match one of the question's bindings.
    bool ok = false;
    if (m.question == QuestionId::ResourceUsage) {
        for (const auto& s : resource_usage_specs()) {
            if (s.target == m.target_column && s.features == m.input_columns) ok = true;
        }
    } else {
        QuestionSpec s = resolve_question(m.question);
        ok = (s.target == m.target_column && s.features == m.input_columns);
    }
    if (!ok) {
        throw InconsistentManifest("input/target columns do not match question '" +
                                   to_string(m.question) + "'");
    }
}

std::vector<std::uint8_t> serialize_params(const ModelBundle& b) {
    std::vector<std::uint8_t> out;
    put_u32(out, static_cast<std::uint32_t>(b.norm_stats.cols()));
    std::vector<double> stats;
    for (std::size_t c = 0; c < b.norm_stats.cols(); ++c) {
        stats.push_back(b.norm_stats.min[c]);
        stats.push_back(b.norm_stats.max[c]);
    }
    put_doubles(out, stats);
    if (const auto* mlp = std::get_if<MlpParams>(&b.params)) {
        put_u32(out, static_cast<std::uint32_t>(mlp->layer_sizes.size()));
        for (std::size_t s : mlp->layer_sizes) put_u32(out, static_cast<std::uint32_t>(s));
        put_doubles(out, flatten(*mlp));
    } else {
        const auto& lstm = std::get<LstmParams>(b.params);
        put_u32(out, static_cast<std::uint32_t>(lstm.input_dim));
        put_u32(out, static_cast<std::uint32_t>(lstm.hidden_dim));
        put_u32(out, static_cast<std::uint32_t>(lstm.lookback));
        put_doubles(out, flatten(lstm));
    }
    return out;
}

class Reader {
public:
    Reader(const std::vector<std::uint8_t>& bytes, std::size_t pos) : bytes_(bytes), pos_(pos) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = get_u32(bytes_, pos_);
        pos_ += 4;
        return v;
    }
    std::vector<double> doubles(std::size_t n) {
        need(n * 8);
        std::vector<double> out(n);
        std::memcpy(out.data(), bytes_.data() + pos_, n * 8);
        pos_ += n * 8;
        return out;
    }
    bool exhausted() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) {
        if (pos_ + n > bytes_.size()) throw MalformedPayload("parameter block truncated");
    }
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_;
};

void parse_params(ModelBundle& b, Reader& r) {
    std::uint32_t ncols = r.u32();
    if (ncols == 0 || ncols > 4096) throw MalformedPayload("bad norm stats column count");
    auto stats = r.doubles(ncols * 2);
    for (std::uint32_t c = 0; c < ncols; ++c) {
        b.norm_stats.min.push_back(stats[2 * c]);
        b.norm_stats.max.push_back(stats[2 * c + 1]);
    }
    if (b.manifest.model_family == ModelFamily::Mlp) {
        std::uint32_t n_layers = r.u32();
        if (n_layers < 2 || n_layers > 64) throw MalformedPayload("bad layer count");
        std::vector<std::size_t> sizes;
        for (std::uint32_t i = 0; i < n_layers; ++i) {
            std::uint32_t s = r.u32();
            if (s == 0 || s > 65536) throw MalformedPayload("bad layer size");
            sizes.push_back(s);
        }
        if (sizes.back() != 1) throw MalformedPayload("output layer must be scalar");
        MlpParams p = init_mlp(sizes, 0);
        unflatten(p, r.doubles(p.param_count()));
        b.params = std::move(p);
    } else {
        std::uint32_t in = r.u32(), hidden = r.u32(), lookback = r.u32();
        if (in == 0 || hidden == 0 || lookback == 0 || in > 65536 || hidden > 65536 ||
            lookback > 1u << 20) {
            throw MalformedPayload("bad lstm dimensions");
        }
        LstmParams p = init_lstm(in, hidden, lookback, 0);
        unflatten(p, r.doubles(p.param_count()));
        b.params = std::move(p);
    }
    if (!r.exhausted()) throw MalformedPayload("trailing bytes after parameter block");
}

std::string compute_bundle_id(const std::vector<std::uint8_t>& bytes) {
    std::vector<std::uint8_t> payload;
    payload.reserve(bytes.size() - kBundleIdLength);
    payload.insert(payload.end(), bytes.begin(), bytes.begin() + kBundleIdOffset);
    payload.insert(payload.end(), bytes.begin() + kBundleIdOffset + kBundleIdLength, bytes.end());
    return sha256_hex(payload);
}

}  // namespace

QuestionSpec ModelBundle::spec() const {
    QuestionSpec s;
    s.id = manifest.question;
    s.features = manifest.input_columns;
    s.target = manifest.target_column;
    s.model_family = manifest.model_family;
    s.resolution = manifest.resolution;
    return s;
}

std::vector<std::uint8_t> pack(const ModelBundle& bundle) {
    validate_bundle(bundle);

    std::string placeholder(kBundleIdLength, '0');
    std::string manifest_json = manifest_to_json(bundle.manifest, placeholder).dump();

    std::vector<std::uint8_t> out;
    out.insert(out.end(), kBundleMagic, kBundleMagic + 8);
    put_u32(out, kBundleSchemaVersion);
    put_u32(out, static_cast<std::uint32_t>(manifest_json.size()));
    out.insert(out.end(), manifest_json.begin(), manifest_json.end());
    auto params = serialize_params(bundle);
    out.insert(out.end(), params.begin(), params.end());

    std::string id = compute_bundle_id(out);
    std::copy(id.begin(), id.end(), out.begin() + kBundleIdOffset);
    return out;
}

ModelBundle unpack(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < kBundleIdOffset + kBundleIdLength) {
        throw MalformedPayload("too short to be a bundle");
    }
    std::string claimed(bytes.begin() + kBundleIdOffset,
                        bytes.begin() + kBundleIdOffset + kBundleIdLength);
    if (compute_bundle_id(bytes) != claimed) {
        throw HashMismatch("bundle id does not match payload hash");
    }
    if (std::memcmp(bytes.data(), kBundleMagic, 8) != 0) throw MalformedPayload("bad magic");
    std::uint32_t version = get_u32(bytes, 8);
    if (version != kBundleSchemaVersion) {
        throw UnsupportedSchemaVersion("header version " + std::to_string(version));
    }
    std::uint32_t manifest_len = get_u32(bytes, 12);
    if (kManifestOffset + manifest_len > bytes.size()) {
        throw MalformedPayload("manifest length exceeds file size");
    }
    std::string manifest_json(bytes.begin() + kManifestOffset,
                              bytes.begin() + kManifestOffset + manifest_len);
    ModelBundle b;
    try {
        b.manifest = manifest_from_json(json::parse(manifest_json));
    } catch (const json::exception& e) {
        throw MalformedPayload(std::string("manifest: ") + e.what());
    }
    if (b.manifest.schema_version != kBundleSchemaVersion) {
        throw UnsupportedSchemaVersion("manifest version " +
                                       std::to_string(b.manifest.schema_version));
    }
    Reader r(bytes, kManifestOffset + manifest_len);
    parse_params(b, r);
    validate_bundle(b);
    return b;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingInputFile(path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputNotWritable(path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw OutputNotWritable(path.string());
}

RunReport run_bundle(const ModelBundle& bundle, const std::filesystem::path& input_dir,
                     const std::filesystem::path& output_dir) {
    auto t0 = std::chrono::steady_clock::now();
    auto input_path = input_dir / "telemetry.csv";
    std::error_code ec;
    if (!std::filesystem::exists(input_path, ec) || ec) {
        throw MissingInputFile(input_path.string());
    }
    auto raw = read_file(input_path);
    auto records = parse_csv(std::string(raw.begin(), raw.end()));
    if (records.empty()) throw MissingInputFile("telemetry.csv has no data rows");

    std::filesystem::create_directories(output_dir, ec);
    if (ec) throw OutputNotWritable(output_dir.string());

    QuestionSpec spec = bundle.spec();

    std::set<std::string> node_ids;
    for (const auto& r : records) node_ids.insert(r.node_id);

    std::string pred_csv = "timestamp,node_id,predicted_" + spec.target + "\n";
    std::vector<double> all_actual, all_pred;
    std::size_t written = 0;

    for (const auto& node : node_ids) {
        TelemetrySeries series = build_series(records, node, infer_interval(records, node));
        if (bundle.manifest.resolution != Resolution::Raw) {
            series = resample(series, bundle.manifest.resolution, Agg::Mean);
        }
        for (const auto& col : spec.features) {
            if (!series.has_column(col)) {
                throw MissingFeatureColumn("input lacks column '" + col + "'");
            }
        }
        auto preds = predict_series(spec, bundle.params, bundle.norm_stats, series);

        bool has_target = series.has_column(spec.target);
        std::size_t offset =
            spec.model_family == ModelFamily::Lstm ? bundle.manifest.lookback : 0;
        for (std::size_t j = 0; j < preds.size(); ++j) {
            std::size_t row = j + offset;
            Instant t = row < series.length()
                            ? series.timestamps[row]
                            : series.timestamps.back() + series.interval;  // one-step forecast
            pred_csv += format_iso8601(t);
            pred_csv += ',';
            pred_csv += node;
            pred_csv += ',';
            pred_csv += format_double(preds[j]);
            pred_csv += '\n';
            ++written;
            if (has_target && row < series.length()) {
                all_actual.push_back(series.column(spec.target)[row]);
                all_pred.push_back(preds[j]);
            }
        }
    }

    std::vector<std::uint8_t> pred_bytes(pred_csv.begin(), pred_csv.end());
    write_file(output_dir / "predictions.csv", pred_bytes);

    RunReport report;
    report.rows_read = records.size();
    report.predictions_written = written;

    json metrics_json;
    if (!all_actual.empty()) {
        report.metrics = compute_metrics(all_actual, all_pred);
        metrics_json["mae"] = report.metrics->mae;
        metrics_json["mse"] = report.metrics->mse;
        metrics_json["n"] = report.metrics->n;
    } else {
        metrics_json["mae"] = nullptr;
        metrics_json["mse"] = nullptr;
        metrics_json["n"] = nullptr;
    }
    std::string metrics_str = metrics_json.dump() + "\n";
    write_file(output_dir / "metrics.json",
               std::vector<std::uint8_t>(metrics_str.begin(), metrics_str.end()));

    report.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

}  // namespace gridseer
