#include "gridseer/telemetry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

#include "gridseer/errors.hpp"

namespace gridseer {

const char* const kCsvHeader =
    "timestamp,node_id,cpu_pct,mem_pct,disk_io_mbps,disk_used_pct,net_mbps,power_w,temp_c";

namespace {

constexpr Instant kMaxGapSeconds = 24 * 3600;

const std::vector<std::string> kNumericColumns = {
    "cpu_pct", "mem_pct", "disk_io_mbps", "disk_used_pct", "net_mbps", "power_w", "temp_c"};

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            out.push_back(line.substr(pos));
            break;
        }
        out.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return out;
}

double parse_number(const std::string& cell, std::size_t row, const std::string& col) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + cell.size() || cell.empty() || !std::isfinite(v)) {
        throw OutOfRange("row " + std::to_string(row) + ", column " + col + ": '" + cell +
                         "' is not a finite number");
    }
    return v;
}

void check_range(double v, double lo, double hi, std::size_t row, const std::string& col) {
    if (v < lo || v > hi) {
        throw OutOfRange("row " + std::to_string(row) + ", column " + col + ": " +
                         format_double(v) + " outside [" + format_double(lo) + ", " +
                         format_double(hi) + "]");
    }
}

constexpr double kInf = std::numeric_limits<double>::infinity();

std::optional<double> column_value(const TelemetryRecord& r, std::size_t col_index) {
    switch (col_index) {
        case 0: return r.cpu_pct;
        case 1: return r.mem_pct;
        case 2: return r.disk_io_mbps;
        case 3: return r.disk_used_pct;
        case 4: return r.net_mbps;
        case 5: return r.power_w;
        default: return r.temp_c;
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string to_string(Resolution r) {
    switch (r) {
        case Resolution::Raw: return "raw";
        case Resolution::Daily: return "daily";
        case Resolution::Weekly: return "weekly";
        default: return "monthly";
    }
}

Resolution resolution_from_string(const std::string& s) {
    if (s == "raw") return Resolution::Raw;
    if (s == "daily") return Resolution::Daily;
    if (s == "weekly") return Resolution::Weekly;
    if (s == "monthly") return Resolution::Monthly;
    throw OutOfRange("unknown resolution '" + s + "'");
}

bool TelemetrySeries::has_column(const std::string& name) const {
    return std::find(columns.begin(), columns.end(), name) != columns.end();
}

const std::vector<double>& TelemetrySeries::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return data[i];
    }
    throw MissingFeatureColumn("series for node '" + node_id + "' lacks column '" + name + "'");
}

std::vector<TelemetryRecord> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw MissingHeader("input is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) {
        throw MissingHeader("expected header '" + std::string(kCsvHeader) + "', got '" + line +
                            "'");
    }

    std::vector<TelemetryRecord> records;
    std::size_t row = 0;  // data-row index, header excluded
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row;
        auto cells = split_line(line);
        if (cells.size() != 9) {
            throw RaggedRow("row " + std::to_string(row) + " has " +
                            std::to_string(cells.size()) + " cells, expected 9");
        }
        TelemetryRecord r;
        r.timestamp = parse_iso8601(cells[0]);
        if (cells[1].empty()) throw OutOfRange("row " + std::to_string(row) + ": empty node_id");
        r.node_id = cells[1];
        r.cpu_pct = parse_number(cells[2], row, "cpu_pct");
        check_range(r.cpu_pct, 0, 100, row, "cpu_pct");
        r.mem_pct = parse_number(cells[3], row, "mem_pct");
        check_range(r.mem_pct, 0, 100, row, "mem_pct");
        r.disk_io_mbps = parse_number(cells[4], row, "disk_io_mbps");
        check_range(r.disk_io_mbps, 0, kInf, row, "disk_io_mbps");
        r.disk_used_pct = parse_number(cells[5], row, "disk_used_pct");
        check_range(r.disk_used_pct, 0, 100, row, "disk_used_pct");
        r.net_mbps = parse_number(cells[6], row, "net_mbps");
        check_range(r.net_mbps, 0, kInf, row, "net_mbps");
        if (!cells[7].empty()) {
            r.power_w = parse_number(cells[7], row, "power_w");
            check_range(*r.power_w, 0, kInf, row, "power_w");
        }
        if (!cells[8].empty()) {
            r.temp_c = parse_number(cells[8], row, "temp_c");
        }
        records.push_back(std::move(r));
    }
    return records;
}

std::string serialize_csv(const std::vector<TelemetryRecord>& records) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const auto& r : records) {
        out += format_iso8601(r.timestamp);
        out += ',';
        out += r.node_id;
        out += ',';
        out += format_double(r.cpu_pct);
        out += ',';
        out += format_double(r.mem_pct);
        out += ',';
        out += format_double(r.disk_io_mbps);
        out += ',';
        out += format_double(r.disk_used_pct);
        out += ',';
        out += format_double(r.net_mbps);
        out += ',';
        if (r.power_w) out += format_double(*r.power_w);
        out += ',';
        if (r.temp_c) out += format_double(*r.temp_c);
        out += '\n';
    }
    return out;
}

TelemetrySeries build_series(const std::vector<TelemetryRecord>& records,
                             const std::string& node_id, Instant interval) {
    if (interval <= 0) throw OutOfRange("interval must be positive");
    std::vector<const TelemetryRecord*> rows;
    for (const auto& r : records) {
        if (r.node_id == node_id) rows.push_back(&r);
    }
    if (rows.empty()) throw NoRecordsForNode("node '" + node_id + "'");
    std::stable_sort(rows.begin(), rows.end(),
                     [](auto* a, auto* b) { return a->timestamp < b->timestamp; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i]->timestamp == rows[i - 1]->timestamp) {
            throw DuplicateTimestamp("node '" + node_id + "' at " +
                                     format_iso8601(rows[i]->timestamp));
        }
        if (rows[i]->timestamp - rows[i - 1]->timestamp > kMaxGapSeconds) {
            throw GapExceedsLimit("gap of " +
                                  std::to_string(rows[i]->timestamp - rows[i - 1]->timestamp) +
                                  " s at " + format_iso8601(rows[i - 1]->timestamp));
        }
    }

    // An optional column is carried only when present on every record.
    bool has_power = std::all_of(rows.begin(), rows.end(),
                                 [](auto* r) { return r->power_w.has_value(); });
    bool has_temp = std::all_of(rows.begin(), rows.end(),
                                [](auto* r) { return r->temp_c.has_value(); });

    TelemetrySeries s;
    s.node_id = node_id;
    s.interval = interval;
    s.start = rows.front()->timestamp;
    s.resolution = Resolution::Raw;
    for (std::size_t c = 0; c < kNumericColumns.size(); ++c) {
        if (c == 5 && !has_power) continue;
        if (c == 6 && !has_temp) continue;
        s.columns.push_back(kNumericColumns[c]);
    }
    s.data.resize(s.columns.size());

    Instant last = rows.back()->timestamp;
    std::size_t src = 0;  // index of record at or before the current grid point
    for (Instant t = s.start; t <= last; t += interval) {
        while (src + 1 < rows.size() && rows[src + 1]->timestamp <= t) ++src;
        const TelemetryRecord* a = rows[src];
        const TelemetryRecord* b = (src + 1 < rows.size()) ? rows[src + 1] : rows[src];
        double frac = 0.0;
        if (b->timestamp > a->timestamp && t > a->timestamp) {
            frac = static_cast<double>(t - a->timestamp) /
                   static_cast<double>(b->timestamp - a->timestamp);
        }
        s.timestamps.push_back(t);
        std::size_t out_col = 0;
        for (std::size_t c = 0; c < kNumericColumns.size(); ++c) {
            if (c == 5 && !has_power) continue;
            if (c == 6 && !has_temp) continue;
            double va = *column_value(*a, c);
            double vb = *column_value(*b, c);
            s.data[out_col].push_back(va + frac * (vb - va));
            ++out_col;
        }
    }
    return s;
}

namespace {

struct Bucket {
    Instant start;
    Instant end;  // exclusive
};

Bucket bucket_of(Instant t, Resolution res) {
    switch (res) {
        case Resolution::Daily: {
            Instant s = day_start(t);
            return {s, s + kSecondsPerDay};
        }
        case Resolution::Weekly: {
            Instant s = week_start(t);
            return {s, s + kSecondsPerWeek};
        }
        case Resolution::Monthly: return {month_start(t), month_end(t)};
        default: throw OutOfRange("resample target must be Daily, Weekly or Monthly");
    }
}

Instant ceil_div(Instant a, Instant b) {
    Instant q = a / b;
    if (a % b != 0 && ((a > 0) == (b > 0))) ++q;
    return q;
}

// Number of grid points t ≡ phase (mod interval) falling in [lo, hi).
Instant grid_points_in(Instant lo, Instant hi, Instant phase, Instant interval) {
    return ceil_div(hi - phase, interval) - ceil_div(lo - phase, interval);
}

}  // namespace

TelemetrySeries resample(const TelemetrySeries& series, Resolution resolution, Agg agg) {
    if (series.resolution != Resolution::Raw) {
        throw OutOfRange("resample input must have Raw resolution");
    }
    if (series.length() == 0) throw SpanTooShort("empty series");

    Instant phase = ((series.start % series.interval) + series.interval) % series.interval;

    // Group rows by bucket in time order.
    std::vector<std::pair<Bucket, std::pair<std::size_t, std::size_t>>> groups;  // [first,last)
    for (std::size_t i = 0; i < series.length(); ++i) {
        Bucket b = bucket_of(series.timestamps[i], resolution);
        if (groups.empty() || groups.back().first.start != b.start) {
            groups.push_back({b, {i, i + 1}});
        } else {
            groups.back().second.second = i + 1;
        }
    }

    TelemetrySeries out;
    out.node_id = series.node_id;
    out.resolution = resolution;
    out.interval = resolution == Resolution::Daily    ? kSecondsPerDay
                   : resolution == Resolution::Weekly ? kSecondsPerWeek
                                                      : 30 * kSecondsPerDay;  // nominal; see timestamps
    out.columns = series.columns;
    out.data.resize(series.columns.size());

    for (const auto& [bucket, range] : groups) {
        auto [first, last] = range;
        Instant expected = grid_points_in(bucket.start, bucket.end, phase, series.interval);
        if (static_cast<Instant>(last - first) != expected) continue;  // partial bucket
        out.timestamps.push_back(bucket.start);
        for (std::size_t c = 0; c < series.columns.size(); ++c) {
            const auto& col = series.data[c];
            double acc = col[first];
            for (std::size_t i = first + 1; i < last; ++i) {
                switch (agg) {
                    case Agg::Min: acc = std::min(acc, col[i]); break;
                    case Agg::Max: acc = std::max(acc, col[i]); break;
                    case Agg::Mean: acc += col[i]; break;
                }
            }
            if (agg == Agg::Mean) acc /= static_cast<double>(last - first);
            out.data[c].push_back(acc);
        }
    }
    if (out.timestamps.empty()) {
        throw SpanTooShort("series does not cover one full " + to_string(resolution) + " bucket");
    }
    out.start = out.timestamps.front();
    return out;
}

std::pair<TelemetrySeries, TelemetrySeries> split(const TelemetrySeries& series,
                                                  const SplitSpec& spec) {
    if (spec.train_fraction <= 0.0 || spec.train_fraction >= 1.0) {
        throw OutOfRange("train_fraction must be in (0, 1)");
    }
    std::size_t n = series.length();
    if (n < 4) throw SeriesTooShort("need at least 4 rows, got " + std::to_string(n));
    auto n_train = static_cast<std::size_t>(
        std::floor(spec.train_fraction * static_cast<double>(n)));

    auto slice = [&](std::size_t lo, std::size_t hi) {
        TelemetrySeries s;
        s.node_id = series.node_id;
        s.interval = series.interval;
        s.resolution = series.resolution;
        s.columns = series.columns;
        s.timestamps.assign(series.timestamps.begin() + lo, series.timestamps.begin() + hi);
        s.start = s.timestamps.empty() ? series.start : s.timestamps.front();
        for (const auto& col : series.data) {
            s.data.emplace_back(col.begin() + lo, col.begin() + hi);
        }
        return s;
    };
    return {slice(0, n_train), slice(n_train, n)};
}

Instant infer_interval(const std::vector<TelemetryRecord>& records, const std::string& node_id) {
    std::vector<Instant> ts;
    for (const auto& r : records) {
        if (r.node_id == node_id) ts.push_back(r.timestamp);
    }
    std::sort(ts.begin(), ts.end());
    Instant interval = 60;
    bool have = false;
    for (std::size_t i = 1; i < ts.size(); ++i) {
        Instant d = ts[i] - ts[i - 1];
        if (d > 0 && (!have || d < interval)) {
            interval = d;
            have = true;
        }
    }
    return interval;
}

OutlierMask flag_outliers(const TelemetrySeries& series, const OutlierPolicy& policy) {
    OutlierMask mask;
    mask.policy = policy;
    mask.flags.assign(series.length(), false);
    if (policy.kind == OutlierPolicy::Kind::None || series.length() == 0) return mask;

    for (std::size_t c = 0; c < series.columns.size(); ++c) {
        const auto& col = series.data[c];
        double mean = 0;
        for (double v : col) mean += v;
        mean /= static_cast<double>(col.size());
        double var = 0;
        for (double v : col) var += (v - mean) * (v - mean);
        var /= static_cast<double>(col.size());
        double sd = std::sqrt(var);
        if (sd == 0.0) continue;  // degenerate variance: no outliers
        for (std::size_t i = 0; i < col.size(); ++i) {
            if (std::abs(col[i] - mean) > policy.threshold * sd) mask.flags[i] = true;
        }
    }
    return mask;
}

}  // namespace gridseer
