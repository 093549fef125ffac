#include "chatpc/cassette.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "chatpc/errors.hpp"

namespace chatpc {

using nlohmann::json;

namespace {

json entry_to_json(const CassetteEntry& e) {
    return json{{"fingerprint", e.fingerprint},
                {"query", {{"x", e.query.x}, {"y", e.query.y}, {"z", e.query.z}}},
                {"model", e.model},
                {"completions", e.completions},
                {"created_at", e.created_at}};
}

CassetteEntry entry_from_json(const json& j) {
    CassetteEntry e;
    e.fingerprint = j.at("fingerprint").get<std::string>();
    const auto& q = j.at("query");
    e.query = CiQuery(q.at("x").get<std::string>(), q.at("y").get<std::string>(),
                      q.at("z").get<std::vector<std::string>>());
    e.model = j.at("model").get<std::string>();
    e.completions = j.at("completions").get<std::vector<std::string>>();
    e.created_at = j.value("created_at", "");
    return e;
}

}  // namespace

CassetteStore::CassetteStore(std::string path) : path_(std::move(path)) {
    if (path_.empty()) return;
    std::ifstream in(path_);
    if (!in) return;  // fresh store; the file appears on first record
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            CassetteEntry e = entry_from_json(json::parse(line));
            latest_[e.fingerprint] = std::move(e);  // later lines win
        } catch (const std::exception& ex) {
            std::ostringstream msg;
            msg << "cassette " << path_ << " line " << lineno << ": " << ex.what();
            throw StoreIoError(msg.str());
        }
    }
}

void CassetteStore::record(const CassetteEntry& entry) {
    if (entry.completions.empty())
        throw StoreIoError("cassette entry must hold at least one completion");
    std::lock_guard<std::mutex> lock(mu_);
    if (!path_.empty()) {
        std::ofstream out(path_, std::ios::app);
        if (!out) throw StoreIoError("cannot open cassette for append: " + path_);
        out << entry_to_json(entry).dump() << "\n";
        out.flush();
        if (!out) throw StoreIoError("write to cassette failed: " + path_);
    }
    latest_[entry.fingerprint] = entry;
}

std::optional<CassetteEntry> CassetteStore::lookup(const std::string& fingerprint) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = latest_.find(fingerprint);
    if (it == latest_.end()) return std::nullopt;
    return it->second;
}

std::size_t CassetteStore::size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return latest_.size();
}

std::string now_utc_iso8601() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace chatpc
