#include <algorithm>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "gridseer/errors.hpp"
#include "gridseer/registry.hpp"
#include "gridseer/sha256.hpp"

namespace gridseer {

namespace {

using json = nlohmann::json;

json entry_json(const RegistryEntry& e) {
    json j;
    j["bundle_id"] = e.bundle_id;
    j["question"] = to_string(e.question);
    j["publisher"] = e.publisher;
    j["created_at"] = format_iso8601(e.created_at);
    j["size_bytes"] = e.size_bytes;
    j["version"] = e.version;
    return j;
}

RegistryEntry entry_from(const json& j) {
    RegistryEntry e;
    e.bundle_id = j.at("bundle_id").get<std::string>();
    e.question = question_from_string(j.at("question").get<std::string>());
    e.publisher = j.at("publisher").get<std::string>();
    e.created_at = parse_iso8601(j.at("created_at").get<std::string>());
    e.size_bytes = j.at("size_bytes").get<std::uint64_t>();
    e.version = j.at("version").get<std::uint64_t>();
    return e;
}

}  // namespace

std::string entry_to_json(const RegistryEntry& e) { return entry_json(e).dump(); }

RegistryEntry entry_from_json(const std::string& text) {
    try {
        return entry_from(json::parse(text));
    } catch (const json::exception& e) {
        throw NetworkError(std::string("bad entry json: ") + e.what());
    }
}

RegistryStore::RegistryStore(const std::filesystem::path& dir) : dir_(dir) {
    std::filesystem::create_directories(dir_ / "blobs");
    std::filesystem::create_directories(dir_ / "tmp");
    std::ifstream index(dir_ / "index.jsonl");
    std::string line;
    while (std::getline(index, line)) {
        if (line.empty()) continue;
        try {
            entries_.push_back(entry_from(json::parse(line)));
        } catch (const json::exception&) {
            // torn trailing line from a crashed publish; ignore
        }
    }
}

RegistryEntry RegistryStore::publish(const std::vector<std::uint8_t>& bundle_bytes) {
    ModelBundle bundle;
    try {
        bundle = unpack(bundle_bytes);
    } catch (const Error& e) {
        throw InvalidBundle(e.what());
    }
    const std::string& id = bundle.manifest.bundle_id;

    std::lock_guard<std::mutex> lock(mutex_);
    for (const auto& e : entries_) {
        if (e.bundle_id == id) return e;  // idempotent re-publish
    }

    RegistryEntry entry;
    entry.bundle_id = id;
    entry.question = bundle.manifest.question;
    entry.publisher = bundle.manifest.publisher;
    entry.created_at = bundle.manifest.created_at;
    entry.size_bytes = bundle_bytes.size();
    entry.version = 1;
    for (const auto& e : entries_) {
        if (e.publisher == entry.publisher && e.question == entry.question) {
            entry.version = std::max(entry.version, e.version + 1);
        }
    }

    auto tmp = dir_ / "tmp" / (id + ".partial");
    auto blob = dir_ / "blobs" / id;
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw StorageFull("cannot open " + tmp.string());
        out.write(reinterpret_cast<const char*>(bundle_bytes.data()),
                  static_cast<std::streamsize>(bundle_bytes.size()));
        out.flush();
        if (!out) throw StorageFull("short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, blob, ec);
    if (ec) throw StorageFull("rename: " + ec.message());

    // Index line goes in only after the blob is durably in place.
    {
        std::ofstream index(dir_ / "index.jsonl", std::ios::app);
        if (!index) throw StorageFull("cannot append index");
        index << entry_json(entry).dump() << "\n";
        index.flush();
        if (!index) throw StorageFull("short index write");
    }
    entries_.push_back(entry);
    return entry;
}

std::vector<RegistryEntry> RegistryStore::list(std::optional<QuestionId> filter) const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::vector<RegistryEntry> out;
    for (const auto& e : entries_) {
        if (!filter || e.question == *filter) out.push_back(e);
    }
    std::sort(out.begin(), out.end(), [](const RegistryEntry& a, const RegistryEntry& b) {
        if (a.question != b.question) return to_string(a.question) < to_string(b.question);
        if (a.publisher != b.publisher) return a.publisher < b.publisher;
        return a.version < b.version;
    });
    return out;
}

std::vector<std::uint8_t> RegistryStore::fetch(const std::string& bundle_id) const {
    bool well_formed = bundle_id.size() == 64 &&
                       std::all_of(bundle_id.begin(), bundle_id.end(), [](char c) {
                           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
                       });
    auto blob = dir_ / "blobs" / bundle_id;
    std::error_code ec;
    if (!well_formed || !std::filesystem::exists(blob, ec) || ec) {
        throw NotFound("bundle " + bundle_id);
    }
    return read_file(blob);
}

Manifest RegistryStore::fetch_manifest(const std::string& bundle_id) const {
    return unpack(fetch(bundle_id)).manifest;
}

struct RegistryServer::Impl {
    RegistryStore store;
    httplib::Server server;
    std::thread thread;

    explicit Impl(const std::filesystem::path& dir) : store(dir) {
        server.Post("/v1/bundles", [this](const httplib::Request& req, httplib::Response& res) {
            try {
                std::vector<std::uint8_t> bytes(req.body.begin(), req.body.end());
                RegistryEntry entry = store.publish(bytes);
                res.status = 201;
                res.set_content(entry_json(entry).dump(), "application/json");
            } catch (const InvalidBundle& e) {
                res.status = 400;
                res.set_content(e.what(), "text/plain");
            } catch (const StorageFull& e) {
                res.status = 507;
                res.set_content(e.what(), "text/plain");
            }
        });
        server.Get("/v1/bundles", [this](const httplib::Request& req, httplib::Response& res) {
            std::optional<QuestionId> filter;
            if (req.has_param("question")) {
                try {
                    filter = question_from_string(req.get_param_value("question"));
                } catch (const Error& e) {
                    res.status = 400;
                    res.set_content(e.what(), "text/plain");
                    return;
                }
            }
            json out = json::array();
            for (const auto& e : store.list(filter)) out.push_back(entry_json(e));
            res.set_content(out.dump(), "application/json");
        });
        server.Get(R"(/v1/bundles/([0-9a-f]{64})/manifest)",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       try {
                           auto bytes = store.fetch(req.matches[1]);
                           res.set_content(manifest_slice(bytes), "application/json");
                       } catch (const NotFound& e) {
                           res.status = 404;
                           res.set_content(e.what(), "text/plain");
                       }
                   });
        server.Get(R"(/v1/bundles/([0-9a-f]{64}))",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       try {
                           auto bytes = store.fetch(req.matches[1]);
                           res.set_content(std::string(bytes.begin(), bytes.end()),
                                           "application/octet-stream");
                       } catch (const NotFound& e) {
                           res.status = 404;
                           res.set_content(e.what(), "text/plain");
                       }
                   });
        server.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("ok", "text/plain");
        });
    }

    // Manifest JSON straight out of the stored bytes, so clients can read
    // metadata without downloading the parameter block.
    static std::string manifest_slice(const std::vector<std::uint8_t>& bytes) {
        std::uint32_t len = static_cast<std::uint32_t>(bytes[12]) |
                            (static_cast<std::uint32_t>(bytes[13]) << 8) |
                            (static_cast<std::uint32_t>(bytes[14]) << 16) |
                            (static_cast<std::uint32_t>(bytes[15]) << 24);
        return std::string(bytes.begin() + 16, bytes.begin() + 16 + len);
    }
};

RegistryServer::RegistryServer(const std::filesystem::path& dir)
    : impl_(std::make_unique<Impl>(dir)) {}

RegistryServer::~RegistryServer() { stop(); }

bool RegistryServer::listen(const std::string& host, int port) {
    return impl_->server.listen(host, port);
}

int RegistryServer::start_async(const std::string& host) {
    int port = impl_->server.bind_to_any_port(host);
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return port;
}

void RegistryServer::stop() {
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace gridseer
