#include <benchmark/benchmark.h>

#include "gridseer/bundle.hpp"
#include "gridseer/lstm.hpp"
#include "gridseer/mlp.hpp"
#include "gridseer/rng.hpp"
#include "gridseer/sha256.hpp"
#include "gridseer/telemetry.hpp"
#include "gridseer/train.hpp"

using namespace gridseer;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.next_uniform(-1, 1);
    return v;
}

void bm_mlp_forward(benchmark::State& state) {
    MlpParams p = init_mlp({4, 32, 32, 1}, 1);
    Rng rng(1);
    auto x = random_vec(rng, 4);
    for (auto _ : state) benchmark::DoNotOptimize(mlp_forward(p, x));
}
BENCHMARK(bm_mlp_forward);

void bm_mlp_backward(benchmark::State& state) {
    MlpParams p = init_mlp({4, 32, 32, 1}, 1);
    MlpParams grad = zero_like(p);
    Rng rng(1);
    auto x = random_vec(rng, 4);
    for (auto _ : state) benchmark::DoNotOptimize(mlp_backward(p, x, 0.5, grad));
}
BENCHMARK(bm_mlp_backward);

void bm_lstm_forward(benchmark::State& state) {
    LstmParams p = init_lstm(1, 32, 48, 1);
    Rng rng(2);
    auto w = random_vec(rng, 48);
    for (auto _ : state) benchmark::DoNotOptimize(lstm_forward_flat(p, w));
}
BENCHMARK(bm_lstm_forward);

void bm_lstm_backward(benchmark::State& state) {
    LstmParams p = init_lstm(1, 32, 48, 1);
    LstmParams grad = zero_like(p);
    Rng rng(2);
    auto w = random_vec(rng, 48);
    for (auto _ : state) benchmark::DoNotOptimize(lstm_backward(p, w, 0.5, grad));
}
BENCHMARK(bm_lstm_backward);

void bm_resample_daily(benchmark::State& state) {
    std::size_t n = static_cast<std::size_t>(state.range(0));
    Rng rng(3);
    TelemetrySeries s;
    s.node_id = "n0";
    s.interval = 60;
    s.start = 1'640'995'200;
    s.columns = {"cpu_pct"};
    s.data = {random_vec(rng, n)};
    for (std::size_t i = 0; i < n; ++i) s.timestamps.push_back(s.start + Instant(i) * 60);
    for (auto _ : state) benchmark::DoNotOptimize(resample(s, Resolution::Daily, Agg::Mean));
}
BENCHMARK(bm_resample_daily)->Arg(10'000)->Arg(100'000);

void bm_pack(benchmark::State& state) {
    ModelBundle b;
    b.manifest.question = QuestionId::NodePower;
    b.manifest.model_family = ModelFamily::Mlp;
    b.manifest.input_columns = {"cpu_pct", "net_mbps"};
    b.manifest.target_column = "power_w";
    b.manifest.publisher = "bench";
    b.norm_stats.min = {0, 0, 0};
    b.norm_stats.max = {100, 50, 348};
    b.params = init_mlp({2, 64, 64, 1}, 4);
    for (auto _ : state) benchmark::DoNotOptimize(pack(b));
}
BENCHMARK(bm_pack);

void bm_sha256_1mib(benchmark::State& state) {
    std::vector<std::uint8_t> bytes(1 << 20, 0xab);
    for (auto _ : state) benchmark::DoNotOptimize(sha256_hex(bytes.data(), bytes.size()));
}
BENCHMARK(bm_sha256_1mib);

}  // namespace

BENCHMARK_MAIN();
