#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <unistd.h>

#include <json.hpp>

#include "gridseer/bundle.hpp"
#include "gridseer/errors.hpp"
#include "gridseer/sha256.hpp"
#include "gridseer/synth.hpp"
#include "test_util.hpp"

using namespace gridseer;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("gridseer_test_" + tag + "_" +
                                              std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string shell_sha256(const fs::path& file) {
    std::string cmd = "sha256sum " + file.string();
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[256] = {};
    REQUIRE(fgets(buf, sizeof(buf), pipe) != nullptr);
    pclose(pipe);
    return std::string(buf, 64);
}

// Recompute and splice the content id after an edit, mirroring the layout
// contract from the outside.
void reseal(std::vector<std::uint8_t>& bytes) {
    std::vector<std::uint8_t> excised;
    excised.insert(excised.end(), bytes.begin(), bytes.begin() + kBundleIdOffset);
    excised.insert(excised.end(), bytes.begin() + kBundleIdOffset + kBundleIdLength, bytes.end());
    std::string id = sha256_hex(excised.data(), excised.size());
    std::copy(id.begin(), id.end(), bytes.begin() + kBundleIdOffset);
}

}  // namespace

TEST_CASE("pack/unpack round trip") {
    ModelBundle b = testutil::make_mlp_bundle(7);
    auto bytes = pack(b);
    ModelBundle back = unpack(bytes);

    CHECK(back.manifest.bundle_id.size() == 64);
    CHECK(back.manifest.question == b.manifest.question);
    CHECK(back.manifest.input_columns == b.manifest.input_columns);
    CHECK(back.manifest.target_column == "power_w");
    CHECK(back.manifest.publisher == "tester");
    CHECK(back.norm_stats.min == b.norm_stats.min);
    CHECK(back.norm_stats.max == b.norm_stats.max);
    CHECK(flatten(std::get<MlpParams>(back.params)) == flatten(std::get<MlpParams>(b.params)));

    SUBCASE("round-tripped bundle predicts bit-identically") {
        auto& p0 = std::get<MlpParams>(b.params);
        auto& p1 = std::get<MlpParams>(back.params);
        Rng rng(4);
        for (int i = 0; i < 50; ++i) {
            std::vector<double> x = {rng.next_uniform(-2, 2), rng.next_uniform(-2, 2)};
            CHECK(mlp_forward(p0, x) == mlp_forward(p1, x));
        }
    }
    SUBCASE("lstm bundle round trips too") {
        ModelBundle l = testutil::make_lstm_bundle(9);
        ModelBundle lb = unpack(pack(l));
        CHECK(lb.manifest.lookback == 6);
        CHECK(flatten(std::get<LstmParams>(lb.params)) ==
              flatten(std::get<LstmParams>(l.params)));
    }
}

TEST_CASE("pack is deterministic and layout holds") {
    ModelBundle b = testutil::make_mlp_bundle(21);
    auto a1 = pack(b);
    auto a2 = pack(b);
    CHECK(a1 == a2);

    CHECK(std::string(a1.begin(), a1.begin() + 8) == "GRIDSEER");
    std::string prefix(a1.begin() + 16, a1.begin() + kBundleIdOffset);
    CHECK(prefix == "{\"bundle_id\":\"");
    for (std::size_t i = 0; i < kBundleIdLength; ++i) {
        char c = static_cast<char>(a1[kBundleIdOffset + i]);
        CHECK(((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')));
    }
}

TEST_CASE("bundle_id matches an external sha256sum of the excised file") {
    ModelBundle b = testutil::make_mlp_bundle(33);
    auto bytes = pack(b);
    std::string id(bytes.begin() + kBundleIdOffset,
                   bytes.begin() + kBundleIdOffset + kBundleIdLength);

    std::vector<std::uint8_t> excised;
    excised.insert(excised.end(), bytes.begin(), bytes.begin() + kBundleIdOffset);
    excised.insert(excised.end(), bytes.begin() + kBundleIdOffset + kBundleIdLength, bytes.end());

    fs::path dir = fresh_dir("sha");
    write_file(dir / "excised.bin", excised);
    CHECK(shell_sha256(dir / "excised.bin") == id);
    fs::remove_all(dir);
}

TEST_CASE("tampering") {
    ModelBundle b = testutil::make_mlp_bundle(50);
    auto bytes = pack(b);

    SUBCASE("a flipped byte anywhere reports HashMismatch") {
        // magic, version field, id itself, manifest body, first and last
        // parameter bytes
        std::vector<std::size_t> offsets = {0,  8,  12, kBundleIdOffset, kBundleIdOffset + 63,
                                            100, bytes.size() / 2, bytes.size() - 1};
        for (std::size_t off : offsets) {
            auto copy = bytes;
            copy[off] ^= 0x01;
            CHECK_THROWS_AS(unpack(copy), HashMismatch);
        }
    }
    SUBCASE("truncation") {
        auto copy = bytes;
        copy.resize(copy.size() - 1);
        CHECK_THROWS_AS(unpack(copy), HashMismatch);
        // below the minimum length there is no hash to check
        CHECK_THROWS_AS(unpack(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 20)),
                        MalformedPayload);
        CHECK_THROWS_AS(unpack({}), MalformedPayload);
    }
    SUBCASE("patched header version with a recomputed hash is rejected by kind") {
        auto copy = bytes;
        copy[8] = 99;
        reseal(copy);
        CHECK_THROWS_AS(unpack(copy), UnsupportedSchemaVersion);
    }
    SUBCASE("resealed garbage manifest is MalformedPayload, not HashMismatch") {
        auto copy = bytes;
        copy[kBundleIdOffset + kBundleIdLength] ^= 0x40;  // breaks the JSON quote
        reseal(copy);
        CHECK_THROWS(unpack(copy));
        CHECK_THROWS_AS(unpack(copy), MalformedPayload);
    }
}

TEST_CASE("run_bundle") {
    SynthConfig cfg;
    cfg.duration = 6 * 3600;
    cfg.seed = 404;
    auto [records, truth] = gen_node(cfg, 0);

    fs::path in = fresh_dir("run_in");
    fs::path out = fresh_dir("run_out");
    {
        std::ofstream f(in / "telemetry.csv");
        f << serialize_csv(records);
    }

    ModelBundle b = testutil::make_mlp_bundle(3);

    SUBCASE("writes predictions and metrics") {
        RunReport rep = run_bundle(b, in, out);
        CHECK(rep.rows_read == records.size());
        CHECK(rep.predictions_written == records.size());
        REQUIRE(rep.metrics.has_value());
        CHECK(rep.metrics->n == records.size());

        std::ifstream pf(out / "predictions.csv");
        std::string header;
        std::getline(pf, header);
        CHECK(header == "timestamp,node_id,predicted_power_w");
        std::size_t lines = 0;
        for (std::string line; std::getline(pf, line);) ++lines;
        CHECK(lines == records.size());

        std::ifstream mf(out / "metrics.json");
        auto mj = nlohmann::json::parse(mf);
        CHECK(mj["mae"].get<double>() == doctest::Approx(rep.metrics->mae));
        CHECK(mj["mse"].get<double>() == doctest::Approx(rep.metrics->mse));
        CHECK(mj["n"].get<std::size_t>() == rep.metrics->n);
    }
    SUBCASE("reruns are byte-identical") {
        run_bundle(b, in, out);
        auto preds1 = read_file(out / "predictions.csv");
        auto met1 = read_file(out / "metrics.json");
        fs::path out2 = fresh_dir("run_out2");
        run_bundle(b, in, out2);
        CHECK(read_file(out2 / "predictions.csv") == preds1);
        CHECK(read_file(out2 / "metrics.json") == met1);
        fs::remove_all(out2);
    }
    SUBCASE("target column absent yields null metrics") {
        for (auto& r : records) r.power_w.reset();
        std::ofstream(in / "telemetry.csv") << serialize_csv(records);
        RunReport rep = run_bundle(b, in, out);
        CHECK(rep.predictions_written == records.size());
        CHECK(!rep.metrics.has_value());
        std::ifstream mf(out / "metrics.json");
        auto mj = nlohmann::json::parse(mf);
        CHECK(mj["mae"].is_null());
        CHECK(mj["mse"].is_null());
    }
    SUBCASE("missing telemetry.csv") {
        fs::path empty = fresh_dir("run_empty");
        CHECK_THROWS_AS(run_bundle(b, empty, out), MissingInputFile);
        fs::remove_all(empty);
    }
    SUBCASE("lstm bundle offsets predictions by lookback") {
        ModelBundle l = testutil::make_lstm_bundle(5);
        RunReport rep = run_bundle(l, in, out);
        CHECK(rep.predictions_written == records.size() - l.manifest.lookback + 1);
        std::ifstream pf(out / "predictions.csv");
        std::string header;
        std::getline(pf, header);
        CHECK(header == "timestamp,node_id,predicted_cpu_pct");
    }

    fs::remove_all(in);
    fs::remove_all(out);
}

TEST_CASE("manifest consistency is enforced on unpack") {
    ModelBundle b = testutil::make_mlp_bundle(61);
    b.manifest.input_columns = {"cpu_pct"};  // binding says {cpu_pct, net_mbps}
    CHECK_THROWS_AS(unpack(pack(b)), InconsistentManifest);

    ModelBundle c = testutil::make_lstm_bundle(62);
    c.manifest.lookback = 0;
    CHECK_THROWS_AS(unpack(pack(c)), InconsistentManifest);
}
