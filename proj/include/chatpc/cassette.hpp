#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "chatpc/problem.hpp"

namespace chatpc {

struct CassetteEntry {
    std::string fingerprint;
    CiQuery query{"x", "y"};
    std::string model;
    std::vector<std::string> completions;
    std::string created_at;  // ISO 8601 UTC
};

/// Append-only record/replay store for raw completions, one JSON record per
/// line. Lookups return the most recent entry for a fingerprint. Writes are
/// serialized; lookups may run concurrently with writes.
class CassetteStore {
public:
    /// Opens (or creates) a file-backed store. An empty path gives a purely
    /// in-memory store.
    explicit CassetteStore(std::string path = {});

    void record(const CassetteEntry& entry);
    std::optional<CassetteEntry> lookup(const std::string& fingerprint) const;

    std::size_t size() const;
    const std::string& path() const { return path_; }

private:
    std::string path_;
    mutable std::mutex mu_;
    std::map<std::string, CassetteEntry> latest_;
};

std::string now_utc_iso8601();

}  // namespace chatpc
