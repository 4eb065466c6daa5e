// Acceptance gate: one pass/fail line per criterion, exit code = number of
// failures. Oracles here are independent re-derivations (normal equations,
// brute-force folds, byte scans), never the library's own code paths.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/inotify.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gridseer/bundle.hpp"
#include "gridseer/catalog.hpp"
#include "gridseer/errors.hpp"
#include "gridseer/metrics.hpp"
#include "gridseer/registry.hpp"
#include "gridseer/rng.hpp"
#include "gridseer/synth.hpp"
#include "gridseer/telemetry.hpp"
#include "gridseer/train.hpp"
#include "test_util.hpp"

using namespace gridseer;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

fs::path fresh_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() /
                 ("gridseer_accept_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

Dataset random_dataset(Rng& rng, std::size_t n, std::size_t dim) {
    Dataset ds;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x(dim);
        for (double& v : x) v = rng.next_uniform(-1, 1);
        ds.inputs.push_back(std::move(x));
        ds.targets.push_back(rng.next_uniform(-1, 1));
    }
    return ds;
}

// Gaussian elimination with partial pivoting; the closed-form least squares
// oracle solves (X'X) beta = X'y with this.
std::vector<double> solve_linear(std::vector<std::vector<double>> a, std::vector<double> b) {
    std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        }
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t c = i + 1; c < n; ++c) acc -= a[i][c] * x[c];
        x[i] = acc / a[i][i];
    }
    return x;
}

struct TrainedMlp {
    QuestionSpec spec;
    NormStats stats;
    MlpParams params;
    TelemetrySeries test;
};

TrainedMlp train_mlp_question(QuestionId question, const std::vector<TelemetryRecord>& records,
                              const std::vector<std::size_t>& hidden, const TrainConfig& cfg) {
    TrainedMlp out{resolve_question(question), {}, MlpParams{}, {}};
    TelemetrySeries series = build_series(records, "n0", infer_interval(records, "n0"));
    auto [train_s, test_s] = split(series, SplitSpec{0.7});
    out.stats = fit_norm_stats(out.spec, train_s);
    Dataset ds = make_dataset(out.spec, out.stats, train_s, 0);
    std::vector<std::size_t> layers;
    layers.push_back(out.spec.features.size());
    for (std::size_t h : hidden) layers.push_back(h);
    layers.push_back(1);
    out.params = train(init_mlp(layers, cfg.seed), ds, cfg).params;
    out.test = test_s;
    return out;
}

// ---- criterion 7 support: a byte-recording TCP proxy ----

class RecordingProxy {
public:
    RecordingProxy(int upstream_port) : upstream_port_(upstream_port) {
        listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
        int one = 1;
        ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        addr.sin_port = 0;
        ::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr));
        ::listen(listen_fd_, 16);
        socklen_t len = sizeof(addr);
        ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
        port_ = ntohs(addr.sin_port);
        accept_thread_ = std::thread([this] { accept_loop(); });
    }

    ~RecordingProxy() { stop(); }

    int port() const { return port_; }

    void stop() {
        if (listen_fd_ >= 0) {
            ::shutdown(listen_fd_, SHUT_RDWR);
            ::close(listen_fd_);
            listen_fd_ = -1;
        }
        if (accept_thread_.joinable()) accept_thread_.join();
        for (auto& t : workers_) {
            if (t.joinable()) t.join();
        }
        workers_.clear();
    }

    std::vector<std::uint8_t> captured() {
        std::lock_guard<std::mutex> lock(mutex_);
        return bytes_;
    }

private:
    void accept_loop() {
        for (;;) {
            int client = ::accept(listen_fd_, nullptr, nullptr);
            if (client < 0) return;
            int server = ::socket(AF_INET, SOCK_STREAM, 0);
            sockaddr_in up{};
            up.sin_family = AF_INET;
            up.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
            up.sin_port = htons(static_cast<std::uint16_t>(upstream_port_));
            if (::connect(server, reinterpret_cast<sockaddr*>(&up), sizeof(up)) != 0) {
                ::close(client);
                ::close(server);
                continue;
            }
            workers_.emplace_back([this, client, server] { pump(client, server); });
            workers_.emplace_back([this, server, client] { pump(server, client); });
        }
    }

    void pump(int from, int to) {
        std::uint8_t buf[4096];
        for (;;) {
            ssize_t n = ::recv(from, buf, sizeof(buf), 0);
            if (n <= 0) break;
            {
                std::lock_guard<std::mutex> lock(mutex_);
                bytes_.insert(bytes_.end(), buf, buf + n);
            }
            ssize_t off = 0;
            while (off < n) {
                ssize_t w = ::send(to, buf + off, static_cast<std::size_t>(n - off), MSG_NOSIGNAL);
                if (w <= 0) { ::shutdown(from, SHUT_RD); return; }
                off += w;
            }
        }
        ::shutdown(to, SHUT_WR);
    }

    int upstream_port_;
    int listen_fd_ = -1;
    int port_ = 0;
    std::thread accept_thread_;
    std::vector<std::thread> workers_;
    std::mutex mutex_;
    std::vector<std::uint8_t> bytes_;
};

std::size_t count_occurrences(const std::vector<std::uint8_t>& haystack,
                              const std::vector<std::uint8_t>& needle) {
    if (needle.empty() || haystack.size() < needle.size()) return 0;
    std::size_t count = 0;
    auto it = haystack.begin();
    for (;;) {
        it = std::search(it, haystack.end(), needle.begin(), needle.end());
        if (it == haystack.end()) return count;
        ++count;
        ++it;
    }
}

// ---- criteria ----

Outcome c1_gradients() {
    auto t0 = std::chrono::steady_clock::now();
    Rng rng(101);
    double mlp_max = 0, lstm_max = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        MlpParams mp = init_mlp({3, 6, 1}, seed);  // 31 params
        mlp_max = std::max(mlp_max, grad_check(mp, random_dataset(rng, 8, 3)));
        LstmParams lp = init_lstm(1, 4, 5, seed);  // 101 params
        lstm_max = std::max(lstm_max, grad_check(lp, random_dataset(rng, 6, 5)));
    }
    double dt = seconds_since(t0);
    bool pass = mlp_max < 1e-5 && lstm_max < 1e-4 && dt < 10;
    return {pass, "mlp max rel err " + fmt(mlp_max) + ", lstm max rel err " + fmt(lstm_max) +
                      ", " + fmt(dt) + "s"};
}

Outcome c2_linear_recovery() {
    auto t0 = std::chrono::steady_clock::now();
    SynthConfig cfg;
    cfg.duration = 5000 * 60;
    cfg.interval = 60;
    cfg.seed = 20260824;
    auto [records, truth] = gen_node(cfg, 0);

    TrainConfig tc;
    tc.epochs = 60;
    tc.learning_rate = 0.05;
    tc.seed = 1;
    TrainedMlp m = train_mlp_question(QuestionId::NodePower, records, {32, 32}, tc);

    auto preds = predict_series(m.spec, Params{m.params}, m.stats, m.test);
    const auto& actual = m.test.column("power_w");
    double model_mse = mse(actual, preds);
    double r2 = r_squared(actual, preds);

    // closed-form least squares on the raw training rows [cpu, net, 1]
    TelemetrySeries series = build_series(records, "n0", 60);
    auto [train_s, test_s] = split(series, SplitSpec{0.7});
    const auto& tc_cpu = train_s.column("cpu_pct");
    const auto& tc_net = train_s.column("net_mbps");
    const auto& tc_pow = train_s.column("power_w");
    std::vector<std::vector<double>> xtx(3, std::vector<double>(3, 0.0));
    std::vector<double> xty(3, 0.0);
    for (std::size_t i = 0; i < train_s.length(); ++i) {
        double row[3] = {tc_cpu[i], tc_net[i], 1.0};
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) xtx[a][b] += row[a] * row[b];
            xty[a] += row[a] * tc_pow[i];
        }
    }
    auto beta = solve_linear(xtx, xty);
    const auto& te_cpu = test_s.column("cpu_pct");
    const auto& te_net = test_s.column("net_mbps");
    const auto& te_pow = test_s.column("power_w");
    double ols_sse = 0;
    for (std::size_t i = 0; i < test_s.length(); ++i) {
        double e = te_pow[i] - (beta[0] * te_cpu[i] + beta[1] * te_net[i] + beta[2]);
        ols_sse += e * e;
    }
    double ols_mse = ols_sse / static_cast<double>(test_s.length());

    double dt = seconds_since(t0);
    bool pass = model_mse <= 1.5 * ols_mse && r2 >= 0.95 && dt < 60;
    return {pass, "model mse " + fmt(model_mse) + " vs ols mse " + fmt(ols_mse) + " (ratio " +
                      fmt(model_mse / ols_mse) + "), r2 " + fmt(r2) + ", " + fmt(dt) + "s"};
}

Outcome c3_lstm_skill() {
    auto t0 = std::chrono::steady_clock::now();
    SynthConfig cfg;  // defaults: 7 days at 60 s, diurnal 20 %, sigma 3 %
    auto [records, truth] = gen_node(cfg, 0);

    QuestionSpec spec = resolve_question(QuestionId::CpuForecast);
    const std::size_t lookback = 48;
    TelemetrySeries series = build_series(records, "n0", 60);
    auto [train_s, test_s] = split(series, SplitSpec{0.7});
    NormStats stats = fit_norm_stats(spec, train_s);
    Dataset train_ds = make_dataset(spec, stats, train_s, lookback);
    Dataset test_ds = make_dataset(spec, stats, test_s, lookback);

    TrainConfig tc;
    tc.epochs = 12;
    tc.learning_rate = 0.05;
    tc.batch_size = 64;
    tc.seed = 3;
    LstmParams trained = train(init_lstm(1, 32, lookback, 3), train_ds, tc).params;

    std::vector<double> preds, actual, persist;
    for (std::size_t i = 0; i < test_ds.size(); ++i) {
        preds.push_back(denormalize_value(stats, 1, lstm_forward_flat(trained, test_ds.inputs[i])));
        actual.push_back(denormalize_value(stats, 1, test_ds.targets[i]));
        persist.push_back(denormalize_value(stats, 1, test_ds.inputs[i].back()));
    }
    double lstm_mae = mae(actual, preds);
    double persist_mae = mae(actual, persist);

    double dt = seconds_since(t0);
    bool pass = lstm_mae <= 5.0 && lstm_mae < persist_mae && dt < 300;
    return {pass, "lstm mae " + fmt(lstm_mae) + " pct vs persistence " + fmt(persist_mae) +
                      " pct, " + fmt(dt) + "s"};
}

Outcome c4_temperature() {
    auto t0 = std::chrono::steady_clock::now();
    SynthConfig cfg;
    cfg.duration = 3000 * 60;
    cfg.seed = 404040;
    double sigma = cfg.temp.noise_sigma_c;
    auto [records, truth] = gen_node(cfg, 0);

    TrainConfig tc;
    tc.epochs = 60;
    tc.learning_rate = 0.05;
    tc.seed = 4;
    TrainedMlp m = train_mlp_question(QuestionId::Temperature, records, {32}, tc);
    auto preds = predict_series(m.spec, Params{m.params}, m.stats, m.test);
    double model_mse = mse(m.test.column("temp_c"), preds);

    double dt = seconds_since(t0);
    bool pass = model_mse <= 2 * sigma * sigma && dt < 60;
    return {pass, "test mse " + fmt(model_mse) + " vs bound " + fmt(2 * sigma * sigma) + ", " +
                      fmt(dt) + "s"};
}

Outcome c5_aggregation() {
    Rng rng(505);
    double worst = 0;
    for (std::size_t k = 1; k <= 16; ++k) {
        std::size_t n = 100 + rng.next_u64() % 900;
        std::vector<std::vector<double>> vecs(k, std::vector<double>(n));
        for (auto& v : vecs) {
            for (double& x : v) x = rng.next_uniform(-500, 500);
        }
        auto got = aggregate_cluster(vecs);
        for (std::size_t i = 0; i < n; ++i) {
            double sum = 0;
            for (const auto& v : vecs) sum += v[i];
            double rel = std::abs(got[i] - sum) / std::max(std::abs(sum), 1e-30);
            worst = std::max(worst, rel);
        }
    }
    return {worst <= 1e-9, "max relative error " + fmt(worst) + " over K in 1..16"};
}

Outcome c6_bundle_integrity() {
    Rng rng(606);
    std::size_t roundtrips = 0, tampers = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        ModelBundle b = seed % 2 == 0
                            ? testutil::make_mlp_bundle(seed, 4 + seed % 9)
                            : testutil::make_lstm_bundle(seed, 3 + seed % 4, 4 + seed % 5);
        auto bytes = pack(b);
        ModelBundle back = unpack(bytes);
        bool identical = true;
        for (int trial = 0; trial < 5 && identical; ++trial) {
            if (seed % 2 == 0) {
                const auto& p0 = std::get<MlpParams>(b.params);
                const auto& p1 = std::get<MlpParams>(back.params);
                std::vector<double> x = {rng.next_uniform(-2, 2), rng.next_uniform(-2, 2)};
                identical = mlp_forward(p0, x) == mlp_forward(p1, x);
            } else {
                const auto& p0 = std::get<LstmParams>(b.params);
                const auto& p1 = std::get<LstmParams>(back.params);
                std::vector<double> w(p0.lookback);
                for (double& v : w) v = rng.next_uniform(-2, 2);
                identical = lstm_forward_flat(p0, w) == lstm_forward_flat(p1, w);
            }
        }
        if (identical) ++roundtrips;

        if (seed == 0) {
            // exhaustive single-byte tamper over one whole bundle
            bool all_caught = true;
            for (std::size_t off = 0; off < bytes.size(); ++off) {
                auto copy = bytes;
                copy[off] ^= 0x01;
                try {
                    unpack(copy);
                    all_caught = false;
                } catch (const HashMismatch&) {
                } catch (...) {
                    all_caught = false;
                }
            }
            if (all_caught) ++tampers;
        } else {
            auto copy = bytes;
            copy[rng.next_u64() % copy.size()] ^= static_cast<std::uint8_t>(
                1 + rng.next_u64() % 255);
            try {
                unpack(copy);
            } catch (const HashMismatch&) {
                ++tampers;
            } catch (...) {
            }
        }
    }
    bool pass = roundtrips == 100 && tampers == 100;
    return {pass, std::to_string(roundtrips) + "/100 round trips bit-identical, " +
                      std::to_string(tampers) + "/100 tamper cases caught as HashMismatch"};
}

Outcome c7_privacy() {
    const double sentinel = 73.7391;
    fs::path reg_dir = fresh_dir("c7_reg");
    fs::path work = fresh_dir("c7_work");

    RegistryServer server(reg_dir);
    int sport = server.start_async();
    RecordingProxy proxy(sport);
    RegistryClient client("http://127.0.0.1:" + std::to_string(proxy.port()));

    // local telemetry with the sentinel planted in every column it can hold
    SynthConfig cfg;
    cfg.duration = 4 * 3600;
    cfg.seed = 707;
    auto [records, truth] = gen_node(cfg, 0);
    for (std::size_t i = 10; i < records.size(); i += 37) {
        records[i].cpu_pct = sentinel;
        records[i].net_mbps = sentinel;
        records[i].power_w = sentinel;
    }
    {
        std::ofstream f(work / "telemetry.csv");
        f << serialize_csv(records);
    }

    auto bytes = pack(testutil::make_mlp_bundle(7));
    RegistryEntry entry = client.publish(bytes);
    client.list();
    auto fetched = client.fetch(entry.bundle_id);
    ModelBundle bundle = unpack(fetched);
    fs::path out = work / "out";
    run_bundle(bundle, work, out);

    proxy.stop();
    server.stop();
    auto wire = proxy.captured();

    std::string text = "73.7391";
    std::vector<std::uint8_t> text_needle(text.begin(), text.end());
    std::vector<std::uint8_t> le_needle(8), be_needle(8);
    std::memcpy(le_needle.data(), &sentinel, 8);
    for (int i = 0; i < 8; ++i) be_needle[i] = le_needle[7 - i];

    std::size_t hits = count_occurrences(wire, text_needle) +
                       count_occurrences(wire, le_needle) + count_occurrences(wire, be_needle);
    bool ran = fs::exists(out / "predictions.csv") && fetched == bytes;
    fs::remove_all(reg_dir);
    fs::remove_all(work);

    bool pass = ran && !wire.empty() && hits == 0;
    return {pass, std::to_string(wire.size()) + " wire bytes captured, " + std::to_string(hits) +
                      " sentinel occurrences (text/le/be)"};
}

Outcome c8_run_contract() {
#ifndef GRIDSEER_BIN
    return {false, "cli binary path not compiled in"};
#else
    fs::path root = fresh_dir("c8");
    fs::path input = root / "input";
    fs::path canary = root / "canary";
    fs::path out1 = root / "out1";
    fs::path out2 = root / "out2";
    fs::create_directories(input);
    fs::create_directories(canary);
    fs::create_directories(out1);
    fs::create_directories(out2);
    {
        std::ofstream f(canary / "canary.txt");
        f << "untouched\n";
    }
    SynthConfig cfg;
    cfg.duration = 4 * 3600;
    cfg.seed = 808;
    auto [records, truth] = gen_node(cfg, 0);
    {
        std::ofstream f(input / "telemetry.csv");
        f << serialize_csv(records);
    }
    fs::path bundle_dir = fresh_dir("c8_bundle");
    write_file(bundle_dir / "m.mdl", pack(testutil::make_mlp_bundle(8)));

    int ifd = inotify_init1(IN_NONBLOCK);
    std::uint32_t mask = IN_CREATE | IN_DELETE | IN_MODIFY | IN_ATTRIB | IN_MOVED_FROM |
                         IN_MOVED_TO | IN_DELETE_SELF | IN_MOVE_SELF;
    inotify_add_watch(ifd, root.c_str(), mask);
    inotify_add_watch(ifd, input.c_str(), mask);
    inotify_add_watch(ifd, canary.c_str(), mask);

    auto run_once = [&](const fs::path& out) {
        std::string cmd = std::string(GRIDSEER_BIN) + " run --bundle " +
                          (bundle_dir / "m.mdl").string() + " --input-dir " + input.string() +
                          " --output-dir " + out.string() + " >/dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    int rc1 = run_once(out1);
    int rc2 = run_once(out2);

    std::size_t events = 0;
    char evbuf[4096];
    for (;;) {
        ssize_t n = ::read(ifd, evbuf, sizeof(evbuf));
        if (n <= 0) break;
        ssize_t off = 0;
        while (off < n) {
            auto* ev = reinterpret_cast<inotify_event*>(evbuf + off);
            ++events;
            off += static_cast<ssize_t>(sizeof(inotify_event)) + ev->len;
        }
    }
    ::close(ifd);

    bool outputs_ok = fs::exists(out1 / "predictions.csv") && fs::exists(out1 / "metrics.json");
    bool identical = outputs_ok &&
                     read_file(out1 / "predictions.csv") == read_file(out2 / "predictions.csv") &&
                     read_file(out1 / "metrics.json") == read_file(out2 / "metrics.json");
    std::string canary_after;
    {
        std::ifstream f(canary / "canary.txt");
        std::getline(f, canary_after);
    }

    fs::remove_all(root);
    fs::remove_all(bundle_dir);

    bool pass = rc1 == 0 && rc2 == 0 && outputs_ok && identical && events == 0 &&
                canary_after == "untouched";
    return {pass, "exit codes " + std::to_string(rc1) + "/" + std::to_string(rc2) +
                      ", outputs byte-identical: " + (identical ? "yes" : "no") + ", " +
                      std::to_string(events) + " writes observed outside the output dirs"};
#endif
}

Outcome c9_oracles() {
    Rng rng(909);
    const Resolution resolutions[] = {Resolution::Daily, Resolution::Weekly, Resolution::Monthly};
    const Agg aggs[] = {Agg::Min, Agg::Mean, Agg::Max};
    const Instant intervals[] = {60, 300, 3600, 7200, 43200};

    std::size_t resample_ok = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        Instant interval = intervals[rng.next_u64() % 5];
        std::size_t n = 2 + rng.next_u64() % 1200;
        Instant start = 1'577'836'800 + static_cast<Instant>(rng.next_u64() % 40'000'000);
        std::vector<Instant> ts(n);
        std::vector<double> vals(n);
        for (std::size_t i = 0; i < n; ++i) {
            ts[i] = start + static_cast<Instant>(i) * interval;
            vals[i] = rng.next_uniform(-100, 100);
        }
        Resolution res = resolutions[trial % 3];
        Agg agg = aggs[(trial / 3) % 3];
        auto expected = testutil::resample_oracle(ts, vals, interval, res, agg);
        auto series = testutil::series_of(ts, vals, interval);
        if (expected.empty()) {
            try {
                resample(series, res, agg);
            } catch (const SpanTooShort&) {
                ++resample_ok;
            }
            continue;
        }
        auto out = resample(series, res, agg);
        bool good = out.data[0].size() == expected.size();
        for (std::size_t i = 0; good && i < expected.size(); ++i) {
            good = std::abs(out.data[0][i] - expected[i]) <=
                   1e-12 * std::max(1.0, std::abs(expected[i]));
        }
        if (good) ++resample_ok;
    }

    std::size_t summarize_ok = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t n = 1 + rng.next_u64() % 500;
        Instant start = 1'577'836'800 + static_cast<Instant>(rng.next_u64() % 40'000'000);
        Instant step = 600 + static_cast<Instant>(rng.next_u64() % 7200);
        std::vector<Instant> ts(n);
        std::vector<double> preds(n);
        for (std::size_t i = 0; i < n; ++i) {
            ts[i] = start + static_cast<Instant>(i) * step;
            preds[i] = rng.next_uniform(-100, 100);
        }
        Resolution res = resolutions[trial % 3];
        auto rows = summarize(preds, ts, res);
        std::map<std::string, std::vector<double>> oracle;
        for (std::size_t i = 0; i < n; ++i) {
            oracle[testutil::bucket_key(ts[i], res)].push_back(preds[i]);
        }
        bool good = rows.size() == oracle.size();
        std::size_t k = 0;
        for (const auto& [key, vals] : oracle) {
            if (!good) break;
            double mn = *std::min_element(vals.begin(), vals.end());
            double mx = *std::max_element(vals.begin(), vals.end());
            double sum = 0;
            for (double v : vals) sum += v;
            good = rows[k].min == mn && rows[k].max == mx &&
                   std::abs(rows[k].avg - sum / static_cast<double>(vals.size())) <= 1e-12 * 100;
            ++k;
        }
        if (good) ++summarize_ok;
    }

    std::size_t metrics_ok = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t n = 1 + rng.next_u64() % 400;
        std::vector<double> y(n), yhat(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = rng.next_uniform(-1000, 1000);
            yhat[i] = rng.next_uniform(-1000, 1000);
        }
        double sum_abs = 0, sum_sq = 0;
        for (std::size_t i = 0; i < n; ++i) {
            sum_abs += std::abs(y[i] - yhat[i]);
            sum_sq += (y[i] - yhat[i]) * (y[i] - yhat[i]);
        }
        double dn = static_cast<double>(n);
        if (std::abs(mae(y, yhat) - sum_abs / dn) <= 1e-12 * std::max(1.0, sum_abs / dn) &&
            std::abs(mse(y, yhat) - sum_sq / dn) <= 1e-12 * std::max(1.0, sum_sq / dn)) {
            ++metrics_ok;
        }
    }

    bool pass = resample_ok == 1000 && summarize_ok == 1000 && metrics_ok == 1000;
    return {pass, "resample " + std::to_string(resample_ok) + "/1000, summarize " +
                      std::to_string(summarize_ok) + "/1000, metrics " +
                      std::to_string(metrics_ok) + "/1000"};
}

}  // namespace

int main() {
    struct Entry {
        const char* name;
        std::function<Outcome()> fn;
    };
    const Entry entries[] = {
        {"criterion 1 gradient correctness", c1_gradients},
        {"criterion 2 linear recovery vs least squares", c2_linear_recovery},
        {"criterion 3 lstm forecast skill", c3_lstm_skill},
        {"criterion 4 temperature noise floor", c4_temperature},
        {"criterion 5 cluster aggregation", c5_aggregation},
        {"criterion 6 bundle integrity", c6_bundle_integrity},
        {"criterion 7 privacy over the wire", c7_privacy},
        {"criterion 8 run contract", c8_run_contract},
        {"criterion 9 brute-force oracles", c9_oracles},
    };
    int failures = 0;
    for (const auto& e : entries) {
        Outcome o;
        try {
            o = e.fn();
        } catch (const std::exception& ex) {
            o = {false, std::string("exception: ") + ex.what()};
        }
        if (!o.pass) ++failures;
        std::cout << e.name << ": " << (o.pass ? "PASS" : "FAIL") << " (" << o.detail << ")\n";
    }
    return failures;
}
