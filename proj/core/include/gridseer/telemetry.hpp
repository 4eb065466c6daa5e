#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gridseer/time.hpp"

namespace gridseer {

// One row of the ingest CSV. Optional columns are absent, never sentinel-coded.
struct TelemetryRecord {
    Instant timestamp = 0;
    std::string node_id;
    double cpu_pct = 0;
    double mem_pct = 0;
    double disk_io_mbps = 0;
    double disk_used_pct = 0;
    double net_mbps = 0;
    std::optional<double> power_w;
    std::optional<double> temp_c;
};

enum class Resolution { Raw, Daily, Weekly, Monthly };
enum class Agg { Min, Mean, Max };

std::string to_string(Resolution r);
Resolution resolution_from_string(const std::string& s);

// Regular-interval per-node series in column-major layout. `timestamps` is
// authoritative; for Raw/Daily/Weekly resolutions row i sits at
// start + i*interval, Monthly rows sit at calendar month starts.
struct TelemetrySeries {
    std::string node_id;
    Instant interval = 0;  // seconds, > 0
    Instant start = 0;
    Resolution resolution = Resolution::Raw;
    std::vector<Instant> timestamps;
    std::vector<std::string> columns;           // names of present numeric columns
    std::vector<std::vector<double>> data;      // one vector per column

    std::size_t length() const { return timestamps.size(); }
    bool has_column(const std::string& name) const;
    const std::vector<double>& column(const std::string& name) const;
};

struct SplitSpec {
    double train_fraction = 0.7;  // (0, 1); split is always contiguous in time
};

struct OutlierPolicy {
    enum class Kind { None, ZScore } kind = Kind::None;
    double threshold = 3.0;  // only meaningful for ZScore
};

struct OutlierMask {
    std::vector<bool> flags;  // one per row
    OutlierPolicy policy;
};

// Required CSV header, in order.
extern const char* const kCsvHeader;

// CSV ingest/emit. parse_csv(serialize_csv(r)) is the identity.
std::vector<TelemetryRecord> parse_csv(const std::string& text);
std::string serialize_csv(const std::vector<TelemetryRecord>& records);

// Filters to node_id, sorts by time, fills gaps up to 24 h by linear
// interpolation onto the grid first_ts + i*interval. An optional column is
// carried only when every record for the node has it.
TelemetrySeries build_series(const std::vector<TelemetryRecord>& records,
                             const std::string& node_id, Instant interval);

// Calendar-bucket downsampling. Partial leading/trailing buckets (where the
// sample grid does not cover the bucket) are dropped.
TelemetrySeries resample(const TelemetrySeries& series, Resolution resolution, Agg agg);

// Chronological prefix/suffix split; |train| = floor(train_fraction * N).
std::pair<TelemetrySeries, TelemetrySeries> split(const TelemetrySeries& series,
                                                  const SplitSpec& spec);

// Flags rows where any column deviates from its mean by more than
// threshold standard deviations. Zero-variance columns never flag.
OutlierMask flag_outliers(const TelemetrySeries& series, const OutlierPolicy& policy);

// Smallest positive timestamp gap among a node's records; falls back to
// 60 s for single-record inputs.
Instant infer_interval(const std::vector<TelemetryRecord>& records, const std::string& node_id);

// Shortest round-trip decimal form of a double (used by every CSV writer so
// that output bytes are deterministic).
std::string format_double(double v);

}  // namespace gridseer
