#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "gridseer/bundle.hpp"
#include "gridseer/catalog.hpp"

namespace gridseer {

struct RegistryEntry {
    std::string bundle_id;
    QuestionId question = QuestionId::NodePower;
    std::string publisher;
    Instant created_at = 0;
    std::uint64_t size_bytes = 0;
    std::uint64_t version = 1;  // monotonic per (publisher, question)
};

// Directory-backed content-addressed store: blobs/<id> plus an append-only
// index.jsonl. Blobs land via atomic rename before their index line is
// appended, so a listable entry always fetches intact.
class RegistryStore {
public:
    explicit RegistryStore(const std::filesystem::path& dir);

    RegistryEntry publish(const std::vector<std::uint8_t>& bundle_bytes);
    std::vector<RegistryEntry> list(std::optional<QuestionId> filter = std::nullopt) const;
    std::vector<std::uint8_t> fetch(const std::string& bundle_id) const;
    Manifest fetch_manifest(const std::string& bundle_id) const;

private:
    std::filesystem::path dir_;
    mutable std::mutex mutex_;
    std::vector<RegistryEntry> entries_;
};

// Runs the HTTP registry service on top of a RegistryStore.
class RegistryServer {
public:
    explicit RegistryServer(const std::filesystem::path& dir);
    ~RegistryServer();

    // Blocks until stop() is called.
    bool listen(const std::string& host, int port);
    // Binds to any free port and serves from a background thread. Returns
    // the bound port.
    int start_async(const std::string& host = "127.0.0.1");
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// HTTP client for the registry endpoints. fetch() re-verifies the content
// hash after download.
class RegistryClient {
public:
    explicit RegistryClient(const std::string& base_url);

    RegistryEntry publish(const std::vector<std::uint8_t>& bundle_bytes);
    std::vector<RegistryEntry> list(std::optional<QuestionId> filter = std::nullopt);
    std::vector<std::uint8_t> fetch(const std::string& bundle_id);
    Manifest fetch_manifest(const std::string& bundle_id);
    bool healthy();

private:
    std::string host_;
    int port_;
};

std::string entry_to_json(const RegistryEntry& e);
RegistryEntry entry_from_json(const std::string& text);

}  // namespace gridseer
