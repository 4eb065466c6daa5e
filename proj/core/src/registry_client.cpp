#include <nlohmann/json.hpp>

#include <httplib.h>

#include "gridseer/errors.hpp"
#include "gridseer/registry.hpp"
#include "gridseer/sha256.hpp"

namespace gridseer {

namespace {

using json = nlohmann::json;

// Accepts "host", "host:port", "http://host:port".
std::pair<std::string, int> parse_url(const std::string& url) {
    std::string rest = url;
    if (rest.rfind("http://", 0) == 0) rest = rest.substr(7);
    while (!rest.empty() && rest.back() == '/') rest.pop_back();
    auto colon = rest.rfind(':');
    if (colon == std::string::npos) return {rest, 80};
    int port = std::stoi(rest.substr(colon + 1));
    return {rest.substr(0, colon), port};
}

}  // namespace

RegistryClient::RegistryClient(const std::string& base_url) {
    auto [host, port] = parse_url(base_url);
    host_ = host;
    port_ = port;
}

RegistryEntry RegistryClient::publish(const std::vector<std::uint8_t>& bundle_bytes) {
    httplib::Client cli(host_, port_);
    auto res = cli.Post("/v1/bundles", std::string(bundle_bytes.begin(), bundle_bytes.end()),
                        "application/octet-stream");
    if (!res) throw NetworkError("POST /v1/bundles: " + httplib::to_string(res.error()));
    if (res->status == 400) throw InvalidBundle(res->body);
    if (res->status == 507) throw StorageFull(res->body);
    if (res->status != 201) throw NetworkError("unexpected status " + std::to_string(res->status));
    return entry_from_json(res->body);
}

std::vector<RegistryEntry> RegistryClient::list(std::optional<QuestionId> filter) {
    httplib::Client cli(host_, port_);
    std::string path = "/v1/bundles";
    if (filter) path += "?question=" + to_string(*filter);
    auto res = cli.Get(path);
    if (!res) throw NetworkError("GET " + path + ": " + httplib::to_string(res.error()));
    if (res->status != 200) throw NetworkError("unexpected status " + std::to_string(res->status));
    std::vector<RegistryEntry> out;
    try {
        for (const auto& j : json::parse(res->body)) out.push_back(entry_from_json(j.dump()));
    } catch (const json::exception& e) {
        throw NetworkError(std::string("bad list json: ") + e.what());
    }
    return out;
}

std::vector<std::uint8_t> RegistryClient::fetch(const std::string& bundle_id) {
    httplib::Client cli(host_, port_);
    auto res = cli.Get("/v1/bundles/" + bundle_id);
    if (!res) throw NetworkError("GET bundle: " + httplib::to_string(res.error()));
    if (res->status == 404) throw NotFound("bundle " + bundle_id);
    if (res->status != 200) throw NetworkError("unexpected status " + std::to_string(res->status));
    std::vector<std::uint8_t> bytes(res->body.begin(), res->body.end());
    // Self-verifying download: the id must match the payload hash.
    ModelBundle b = unpack(bytes);
    if (b.manifest.bundle_id != bundle_id) {
        throw HashMismatch("served bundle id " + b.manifest.bundle_id + " != requested " +
                           bundle_id);
    }
    return bytes;
}

Manifest RegistryClient::fetch_manifest(const std::string& bundle_id) {
    httplib::Client cli(host_, port_);
    auto res = cli.Get("/v1/bundles/" + bundle_id + "/manifest");
    if (!res) throw NetworkError("GET manifest: " + httplib::to_string(res.error()));
    if (res->status == 404) throw NotFound("bundle " + bundle_id);
    if (res->status != 200) throw NetworkError("unexpected status " + std::to_string(res->status));
    try {
        json j = json::parse(res->body);
        Manifest m;
        m.schema_version = j.at("schema_version").get<std::uint32_t>();
        m.bundle_id = j.at("bundle_id").get<std::string>();
        m.question = question_from_string(j.at("question").get<std::string>());
        m.model_family = j.at("model_family").get<std::string>() == "mlp" ? ModelFamily::Mlp
                                                                          : ModelFamily::Lstm;
        m.input_columns = j.at("input_columns").get<std::vector<std::string>>();
        m.target_column = j.at("target_column").get<std::string>();
        m.resolution = resolution_from_string(j.at("resolution").get<std::string>());
        m.lookback = j.at("lookback").get<std::size_t>();
        m.created_at = parse_iso8601(j.at("created_at").get<std::string>());
        m.publisher = j.at("publisher").get<std::string>();
        m.train_fingerprint = j.at("train_fingerprint").get<std::string>();
        return m;
    } catch (const json::exception& e) {
        throw NetworkError(std::string("bad manifest json: ") + e.what());
    }
}

bool RegistryClient::healthy() {
    httplib::Client cli(host_, port_);
    auto res = cli.Get("/v1/health");
    return res && res->status == 200;
}

}  // namespace gridseer
