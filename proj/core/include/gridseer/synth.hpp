#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridseer/telemetry.hpp"

namespace gridseer {

// Seeded synthetic telemetry. The generative laws (linear power, linear
// temperature, diurnal/weekly CPU with Poisson bursts) are recorded as
// ground truth so tests can check models against the exact formulas.
struct CpuPattern {
    double base_pct = 40;
    double diurnal_amplitude_pct = 20;
    double weekly_amplitude_pct = 5;
    double burst_rate_per_day = 2;   // Poisson arrivals; pulses are 10 min wide
    double burst_height_pct = 20;
    double noise_sigma_pct = 3;
};

struct PowerLaw {
    double watts_per_cpu_pct = 1.5;
    double watts_per_net_mbps = 0.8;
    double idle_watts = 20;
    double noise_sigma_w = 2;
};

struct TempLaw {
    double deg_per_cpu_pct = 0.2;
    double deg_per_mem_pct = 0.05;
    double deg_per_disk_io_mbps = 0.1;
    double ambient_c = 18;
    double noise_sigma_c = 0.5;
};

struct LevelPattern {  // mean + gaussian noise, clamped to the column's range
    double mean = 0;
    double noise_sigma = 0;
};

struct SynthConfig {
    std::size_t nodes = 1;
    Instant duration = 7 * kSecondsPerDay;
    Instant interval = 60;
    Instant start = 1640995200;  // 2022-01-01T00:00:00Z
    std::uint64_t seed = 42;
    CpuPattern cpu;
    PowerLaw power;
    TempLaw temp;
    LevelPattern net{10, 2};
    LevelPattern mem{50, 5};
    LevelPattern disk_io{5, 1};
    LevelPattern disk_used{60, 0.5};
};

struct GroundTruth {
    SynthConfig config;
    std::size_t node_index = 0;
    // Noiseless latent series, one value per emitted row.
    std::vector<double> cpu, mem, disk_io, disk_used, net, power, temp;
    std::size_t clamp_events = 0;
};

std::string synth_config_to_json(const SynthConfig& config);
SynthConfig synth_config_from_json(const std::string& text);
std::string ground_truth_to_json(const std::vector<GroundTruth>& truths);

// Deterministic per (config.seed, node_index); the node stream seed is
// mix_seed(seed, node_index).
std::pair<std::vector<TelemetryRecord>, GroundTruth> gen_node(const SynthConfig& config,
                                                              std::size_t node_index);

// K independent nodes with node ids "n0".."n{K-1}".
std::vector<std::pair<std::vector<TelemetryRecord>, GroundTruth>> gen_cluster(
    const SynthConfig& config, std::size_t k);

}  // namespace gridseer
