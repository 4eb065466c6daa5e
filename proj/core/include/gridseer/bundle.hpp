#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gridseer/catalog.hpp"
#include "gridseer/metrics.hpp"
#include "gridseer/norm.hpp"
#include "gridseer/time.hpp"

namespace gridseer {

// On-disk bundle layout (extension .mdl), all integers little-endian:
//   bytes [0, 8)    magic "GRIDSEER"
//   bytes [8, 12)   schema version (u32)
//   bytes [12, 16)  manifest length (u32)
//   bytes [16, ...) manifest JSON (canonical: sorted keys, no whitespace)
//   remainder       parameter block (IEEE-754 doubles, little-endian)
//
// The canonical manifest always starts {"bundle_id":"<64 hex>", so the id
// occupies a fixed byte span. bundle_id is the SHA-256 of the whole file
// with those 64 hex characters excised, which makes any single-byte tamper
// detectable as a hash mismatch.
constexpr char kBundleMagic[9] = "GRIDSEER";
constexpr std::uint32_t kBundleSchemaVersion = 1;
constexpr std::size_t kBundleIdOffset = 30;  // 16 + strlen("{\"bundle_id\":\"")
constexpr std::size_t kBundleIdLength = 64;

struct Manifest {
    std::uint32_t schema_version = kBundleSchemaVersion;
    std::string bundle_id;  // lowercase hex, filled in by pack()
    QuestionId question = QuestionId::NodePower;
    ModelFamily model_family = ModelFamily::Mlp;
    std::vector<std::string> input_columns;
    std::string target_column;
    Resolution resolution = Resolution::Raw;
    std::size_t lookback = 0;  // Lstm only; 0 for Mlp
    Instant created_at = 0;
    std::string publisher;
    std::string train_fingerprint;  // free text, counts/ranges/hashes only, <= 1 KiB
};

struct ModelBundle {
    Manifest manifest;
    NormStats norm_stats;
    Params params;

    QuestionSpec spec() const;
};

struct RunReport {
    std::size_t rows_read = 0;
    std::size_t predictions_written = 0;
    std::optional<Metrics> metrics;
    double wall_time = 0;  // seconds
};

// Canonical serialization; byte-identical for identical bundles.
std::vector<std::uint8_t> pack(const ModelBundle& bundle);

// Parses and hash-verifies. Hash is checked before anything else, so a
// flipped byte anywhere in a previously valid bundle reports HashMismatch.
ModelBundle unpack(const std::vector<std::uint8_t>& bytes);

// Black-box run contract: reads input_dir/telemetry.csv, writes
// predictions.csv and metrics.json into output_dir, touches nothing else.
RunReport run_bundle(const ModelBundle& bundle, const std::filesystem::path& input_dir,
                     const std::filesystem::path& output_dir);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace gridseer
