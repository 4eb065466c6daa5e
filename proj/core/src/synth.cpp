#include "gridseer/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "gridseer/errors.hpp"
#include "gridseer/rng.hpp"

namespace gridseer {

namespace {

using json = nlohmann::json;

constexpr Instant kBurstWidth = 600;  // 10 minutes

double get_or(const json& j, const char* key, double fallback) {
    return j.contains(key) ? j.at(key).get<double>() : fallback;
}

double clamp_counted(double v, double lo, double hi, std::size_t& events) {
    if (v < lo) {
        ++events;
        return lo;
    }
    if (v > hi) {
        ++events;
        return hi;
    }
    return v;
}

void validate(const SynthConfig& c) {
    if (c.nodes < 1) throw OutOfRange("nodes must be >= 1");
    if (c.interval <= 0 || c.duration < c.interval) throw OutOfRange("bad duration/interval");
    for (double sigma : {c.cpu.noise_sigma_pct, c.power.noise_sigma_w, c.temp.noise_sigma_c,
                         c.net.noise_sigma, c.mem.noise_sigma, c.disk_io.noise_sigma,
                         c.disk_used.noise_sigma}) {
        if (sigma < 0) throw OutOfRange("noise sigma must be >= 0");
    }
}

}  // namespace

std::string synth_config_to_json(const SynthConfig& c) {
    json j;
    j["nodes"] = c.nodes;
    j["duration_s"] = c.duration;
    j["interval_s"] = c.interval;
    j["start"] = format_iso8601(c.start);
    j["seed"] = c.seed;
    j["cpu"] = {{"base_pct", c.cpu.base_pct},
                {"diurnal_amplitude_pct", c.cpu.diurnal_amplitude_pct},
                {"weekly_amplitude_pct", c.cpu.weekly_amplitude_pct},
                {"burst_rate_per_day", c.cpu.burst_rate_per_day},
                {"burst_height_pct", c.cpu.burst_height_pct},
                {"noise_sigma_pct", c.cpu.noise_sigma_pct}};
    j["power"] = {{"watts_per_cpu_pct", c.power.watts_per_cpu_pct},
                  {"watts_per_net_mbps", c.power.watts_per_net_mbps},
                  {"idle_watts", c.power.idle_watts},
                  {"noise_sigma_w", c.power.noise_sigma_w}};
    j["temp"] = {{"deg_per_cpu_pct", c.temp.deg_per_cpu_pct},
                 {"deg_per_mem_pct", c.temp.deg_per_mem_pct},
                 {"deg_per_disk_io_mbps", c.temp.deg_per_disk_io_mbps},
                 {"ambient_c", c.temp.ambient_c},
                 {"noise_sigma_c", c.temp.noise_sigma_c}};
    j["net"] = {{"mean", c.net.mean}, {"noise_sigma", c.net.noise_sigma}};
    j["mem"] = {{"mean", c.mem.mean}, {"noise_sigma", c.mem.noise_sigma}};
    j["disk_io"] = {{"mean", c.disk_io.mean}, {"noise_sigma", c.disk_io.noise_sigma}};
    j["disk_used"] = {{"mean", c.disk_used.mean}, {"noise_sigma", c.disk_used.noise_sigma}};
    return j.dump(2);
}

SynthConfig synth_config_from_json(const std::string& text) {
    SynthConfig c;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw OutOfRange(std::string("bad synth config json: ") + e.what());
    }
    if (j.contains("nodes")) c.nodes = j.at("nodes").get<std::size_t>();
    if (j.contains("duration_s")) c.duration = j.at("duration_s").get<Instant>();
    if (j.contains("interval_s")) c.interval = j.at("interval_s").get<Instant>();
    if (j.contains("start")) c.start = parse_iso8601(j.at("start").get<std::string>());
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("cpu")) {
        const auto& s = j.at("cpu");
        c.cpu.base_pct = get_or(s, "base_pct", c.cpu.base_pct);
        c.cpu.diurnal_amplitude_pct = get_or(s, "diurnal_amplitude_pct", c.cpu.diurnal_amplitude_pct);
        c.cpu.weekly_amplitude_pct = get_or(s, "weekly_amplitude_pct", c.cpu.weekly_amplitude_pct);
        c.cpu.burst_rate_per_day = get_or(s, "burst_rate_per_day", c.cpu.burst_rate_per_day);
        c.cpu.burst_height_pct = get_or(s, "burst_height_pct", c.cpu.burst_height_pct);
        c.cpu.noise_sigma_pct = get_or(s, "noise_sigma_pct", c.cpu.noise_sigma_pct);
    }
    if (j.contains("power")) {
        const auto& s = j.at("power");
        c.power.watts_per_cpu_pct = get_or(s, "watts_per_cpu_pct", c.power.watts_per_cpu_pct);
        c.power.watts_per_net_mbps = get_or(s, "watts_per_net_mbps", c.power.watts_per_net_mbps);
        c.power.idle_watts = get_or(s, "idle_watts", c.power.idle_watts);
        c.power.noise_sigma_w = get_or(s, "noise_sigma_w", c.power.noise_sigma_w);
    }
    if (j.contains("temp")) {
        const auto& s = j.at("temp");
        c.temp.deg_per_cpu_pct = get_or(s, "deg_per_cpu_pct", c.temp.deg_per_cpu_pct);
        c.temp.deg_per_mem_pct = get_or(s, "deg_per_mem_pct", c.temp.deg_per_mem_pct);
        c.temp.deg_per_disk_io_mbps =
            get_or(s, "deg_per_disk_io_mbps", c.temp.deg_per_disk_io_mbps);
        c.temp.ambient_c = get_or(s, "ambient_c", c.temp.ambient_c);
        c.temp.noise_sigma_c = get_or(s, "noise_sigma_c", c.temp.noise_sigma_c);
    }
    auto level = [&](const char* key, LevelPattern& p) {
        if (!j.contains(key)) return;
        const auto& s = j.at(key);
        p.mean = get_or(s, "mean", p.mean);
        p.noise_sigma = get_or(s, "noise_sigma", p.noise_sigma);
    };
    level("net", c.net);
    level("mem", c.mem);
    level("disk_io", c.disk_io);
    level("disk_used", c.disk_used);
    validate(c);
    return c;
}

std::pair<std::vector<TelemetryRecord>, GroundTruth> gen_node(const SynthConfig& config,
                                                              std::size_t node_index) {
    validate(config);
    Rng rng(mix_seed(config.seed, node_index));
    std::size_t n = static_cast<std::size_t>(config.duration / config.interval);

    // Burst pulses are drawn first so the per-row noise stream does not
    // depend on how many bursts landed.
    std::vector<std::pair<Instant, Instant>> bursts;  // [begin, end) offsets
    std::size_t days = static_cast<std::size_t>((config.duration + kSecondsPerDay - 1) / kSecondsPerDay);
    for (std::size_t d = 0; d < days; ++d) {
        int count = config.cpu.burst_rate_per_day > 0
                        ? rng.next_poisson(config.cpu.burst_rate_per_day)
                        : 0;
        for (int b = 0; b < count; ++b) {
            auto begin = static_cast<Instant>(d * kSecondsPerDay +
                                              rng.next_unit() * kSecondsPerDay);
            bursts.emplace_back(begin, begin + kBurstWidth);
        }
    }

    GroundTruth truth;
    truth.config = config;
    truth.node_index = node_index;

    std::vector<TelemetryRecord> records;
    records.reserve(n);
    const std::string node_id = "n" + std::to_string(node_index);
    constexpr double two_pi = 2.0 * std::numbers::pi;

    for (std::size_t i = 0; i < n; ++i) {
        Instant offset = static_cast<Instant>(i) * config.interval;
        double t = static_cast<double>(offset);

        double cpu_latent = config.cpu.base_pct +
                            config.cpu.diurnal_amplitude_pct * std::sin(two_pi * t / 86400.0) +
                            config.cpu.weekly_amplitude_pct * std::sin(two_pi * t / 604800.0);
        for (const auto& [b0, b1] : bursts) {
            if (offset >= b0 && offset < b1) cpu_latent += config.cpu.burst_height_pct;
        }
        double mem_latent = config.mem.mean;
        double disk_io_latent = config.disk_io.mean;
        double disk_used_latent = config.disk_used.mean;
        double net_latent = config.net.mean;
        double power_latent = config.power.watts_per_cpu_pct * cpu_latent +
                              config.power.watts_per_net_mbps * net_latent +
                              config.power.idle_watts;
        double temp_latent = config.temp.deg_per_cpu_pct * cpu_latent +
                             config.temp.deg_per_mem_pct * mem_latent +
                             config.temp.deg_per_disk_io_mbps * disk_io_latent +
                             config.temp.ambient_c;

        TelemetryRecord r;
        r.timestamp = config.start + offset;
        r.node_id = node_id;
        r.cpu_pct = clamp_counted(cpu_latent + config.cpu.noise_sigma_pct * rng.next_gauss(), 0,
                                  100, truth.clamp_events);
        r.mem_pct = clamp_counted(mem_latent + config.mem.noise_sigma * rng.next_gauss(), 0, 100,
                                  truth.clamp_events);
        r.disk_io_mbps =
            clamp_counted(disk_io_latent + config.disk_io.noise_sigma * rng.next_gauss(), 0,
                          std::numeric_limits<double>::infinity(), truth.clamp_events);
        r.disk_used_pct = clamp_counted(
            disk_used_latent + config.disk_used.noise_sigma * rng.next_gauss(), 0, 100,
            truth.clamp_events);
        r.net_mbps = clamp_counted(net_latent + config.net.noise_sigma * rng.next_gauss(), 0,
                                   std::numeric_limits<double>::infinity(), truth.clamp_events);
        // Power/temp laws use the realized (noisy) inputs plus their own
        // observation noise, so a regression can recover the coefficients.
        double power_obs = config.power.watts_per_cpu_pct * r.cpu_pct +
                           config.power.watts_per_net_mbps * r.net_mbps + config.power.idle_watts +
                           config.power.noise_sigma_w * rng.next_gauss();
        r.power_w = clamp_counted(power_obs, 0, std::numeric_limits<double>::infinity(),
                                  truth.clamp_events);
        r.temp_c = config.temp.deg_per_cpu_pct * r.cpu_pct +
                   config.temp.deg_per_mem_pct * r.mem_pct +
                   config.temp.deg_per_disk_io_mbps * r.disk_io_mbps + config.temp.ambient_c +
                   config.temp.noise_sigma_c * rng.next_gauss();

        truth.cpu.push_back(cpu_latent);
        truth.mem.push_back(mem_latent);
        truth.disk_io.push_back(disk_io_latent);
        truth.disk_used.push_back(disk_used_latent);
        truth.net.push_back(net_latent);
        truth.power.push_back(power_latent);
        truth.temp.push_back(temp_latent);
        records.push_back(std::move(r));
    }
    return {std::move(records), std::move(truth)};
}

std::vector<std::pair<std::vector<TelemetryRecord>, GroundTruth>> gen_cluster(
    const SynthConfig& config, std::size_t k) {
    if (k < 1) throw OutOfRange("cluster size must be >= 1");
    std::vector<std::pair<std::vector<TelemetryRecord>, GroundTruth>> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(gen_node(config, i));
    return out;
}

std::string ground_truth_to_json(const std::vector<GroundTruth>& truths) {
    json out = json::array();
    for (const auto& t : truths) {
        json j;
        j["config"] = json::parse(synth_config_to_json(t.config));
        j["node_index"] = t.node_index;
        j["clamp_events"] = t.clamp_events;
        j["latents"] = {{"cpu_pct", t.cpu},       {"mem_pct", t.mem},
                        {"disk_io_mbps", t.disk_io}, {"disk_used_pct", t.disk_used},
                        {"net_mbps", t.net},      {"power_w", t.power},
                        {"temp_c", t.temp}};
        out.push_back(std::move(j));
    }
    return out.dump();
}

}  // namespace gridseer
