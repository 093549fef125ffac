#include "chatpc/problem.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "chatpc/errors.hpp"
#include "chatpc/util.hpp"

namespace chatpc {

using nlohmann::json;

CiQuery::CiQuery(std::string x_, std::string y_, std::vector<std::string> z_)
    : x(std::move(x_)), y(std::move(y_)), z(std::move(z_)) {
    if (x == y) throw InvalidQuery("ci query: x == y");
    std::set<std::string> seen;
    for (const auto& name : z) {
        if (name == x || name == y)
            throw InvalidQuery("ci query: conditioning set contains an endpoint");
        if (!seen.insert(name).second)
            throw InvalidQuery("ci query: duplicate conditioning variable " + name);
    }
}

CiQuery CiQuery::canonical() const {
    std::vector<std::string> zs = z;
    std::sort(zs.begin(), zs.end());
    auto [lo, hi] = canonical_pair(x, y);
    return {lo, hi, std::move(zs)};
}

std::string CiQuery::display() const {
    std::string out = x + " _||_ " + y;
    if (!z.empty()) out += " | " + join(z, ", ");
    return out;
}

const Variable& Problem::variable(const std::string& name) const {
    for (const auto& v : variables)
        if (v.name == name) return v;
    throw UnknownVariable("unknown variable: " + name + " (problem " + id + ")");
}

bool Problem::has_variable(const std::string& name) const {
    return std::any_of(variables.begin(), variables.end(),
                       [&](const Variable& v) { return v.name == name; });
}

std::vector<std::string> Problem::variable_names() const {
    std::vector<std::string> out;
    out.reserve(variables.size());
    for (const auto& v : variables) out.push_back(v.name);
    return out;
}

bool operator==(const Problem& a, const Problem& b) {
    auto truth_edges = [](const Problem& p) {
        return p.ground_truth ? p.ground_truth->edge_names()
                              : std::vector<std::pair<std::string, std::string>>{};
    };
    return a.id == b.id && a.field == b.field && a.context == b.context &&
           a.variables == b.variables && a.provenance == b.provenance && a.notes == b.notes &&
           a.pairs == b.pairs && a.ground_truth.has_value() == b.ground_truth.has_value() &&
           truth_edges(a) == truth_edges(b);
}

namespace {

std::string require_string(const json& j, const char* key) {
    if (!j.contains(key)) throw SchemaError(std::string("missing field: ") + key);
    if (!j.at(key).is_string()) throw SchemaError(std::string("field must be a string: ") + key);
    return j.at(key).get<std::string>();
}

}  // namespace

Problem load_problem(std::istream& in) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("problem file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("problem file must hold a JSON object");

    Problem p;
    p.id = require_string(j, "id");
    p.field = require_string(j, "field");
    p.context = require_string(j, "context");

    if (!j.contains("variables") || !j.at("variables").is_array())
        throw SchemaError("missing field: variables (array)");
    std::set<std::string> names;
    for (const auto& vj : j.at("variables")) {
        if (!vj.is_object()) throw SchemaError("variables entries must be objects");
        Variable v{require_string(vj, "name"), require_string(vj, "description")};
        if (v.name.empty()) throw SchemaError("variable name must be non-empty");
        if (v.description.empty())
            throw SchemaError("variable description must be non-empty: " + v.name);
        if (!names.insert(v.name).second) throw SchemaError("duplicate variable name: " + v.name);
        p.variables.push_back(std::move(v));
    }
    if (p.variables.size() < 2) throw SchemaError("a problem needs at least 2 variables");

    if (j.contains("ground_truth")) {
        const auto& gt = j.at("ground_truth");
        if (!gt.is_object() || !gt.contains("edges") || !gt.at("edges").is_array())
            throw SchemaError("ground_truth must be an object with an edges array");
        std::vector<std::pair<std::string, std::string>> edges;
        for (const auto& ej : gt.at("edges")) {
            if (!ej.is_array() || ej.size() != 2 || !ej[0].is_string() || !ej[1].is_string())
                throw SchemaError("ground_truth.edges entries must be [parent, child] pairs");
            edges.emplace_back(ej[0].get<std::string>(), ej[1].get<std::string>());
        }
        p.ground_truth = Dag(p.variable_names(), edges);  // GraphError propagates
    }

    if (j.contains("provenance")) p.provenance = require_string(j, "provenance");
    if (j.contains("notes")) p.notes = require_string(j, "notes");

    if (j.contains("pairs")) {
        if (!j.at("pairs").is_array()) throw SchemaError("pairs must be an array");
        for (const auto& pj : j.at("pairs")) {
            if (!pj.is_array() || pj.size() != 2 || !pj[0].is_string() || !pj[1].is_string())
                throw SchemaError("pairs entries must be [x, y]");
            auto x = pj[0].get<std::string>(), y = pj[1].get<std::string>();
            if (!names.count(x)) throw SchemaError("pairs references unknown variable: " + x);
            if (!names.count(y)) throw SchemaError("pairs references unknown variable: " + y);
            if (x == y) throw SchemaError("pairs entry repeats one variable: " + x);
            p.pairs.emplace_back(std::move(x), std::move(y));
        }
    }
    return p;
}

Problem load_problem_string(const std::string& text) {
    std::istringstream in(text);
    return load_problem(in);
}

Problem load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open problem file: " + path);
    return load_problem(in);
}

std::string serialize_problem(const Problem& p) {
    json j;
    j["id"] = p.id;
    j["field"] = p.field;
    j["context"] = p.context;
    j["variables"] = json::array();
    for (const auto& v : p.variables)
        j["variables"].push_back({{"name", v.name}, {"description", v.description}});
    if (p.ground_truth) {
        json edges = json::array();
        for (const auto& [a, b] : p.ground_truth->edge_names()) edges.push_back({a, b});
        j["ground_truth"] = {{"edges", edges}};
    }
    if (p.provenance) j["provenance"] = *p.provenance;
    if (p.notes) j["notes"] = *p.notes;
    if (!p.pairs.empty()) {
        json pairs = json::array();
        for (const auto& [x, y] : p.pairs) pairs.push_back({x, y});
        j["pairs"] = pairs;
    }
    return j.dump(2) + "\n";
}

std::vector<CiQuery> enumerate_ci_statements(const Problem& problem, int max_cond_size,
                                             bool both_orders) {
    const int n = static_cast<int>(problem.variables.size());
    const int cap = n - 2;
    if (max_cond_size == kUnlimitedCondSize) {
        max_cond_size = cap;
    } else if (max_cond_size < 0 || max_cond_size > cap) {
        throw InvalidQuery("max_cond_size must lie in [0, |variables| - 2]");
    }

    std::vector<std::string> sorted = problem.variable_names();
    std::sort(sorted.begin(), sorted.end());

    std::vector<CiQuery> out;
    auto emit_pair = [&](const std::string& x, const std::string& y) {
        std::vector<std::string> rest;
        for (const auto& v : sorted)
            if (v != x && v != y) rest.push_back(v);
        for (int k = 0; k <= max_cond_size; ++k) {
            // Subsets of size k in lexicographic rank order.
            std::vector<int> comb(static_cast<std::size_t>(k));
            for (int i = 0; i < k; ++i) comb[static_cast<std::size_t>(i)] = i;
            const int m = static_cast<int>(rest.size());
            if (k > m) break;
            while (true) {
                std::vector<std::string> z;
                z.reserve(static_cast<std::size_t>(k));
                for (int idx : comb) z.push_back(rest[static_cast<std::size_t>(idx)]);
                out.emplace_back(x, y, std::move(z));
                int i = k - 1;
                while (i >= 0 && comb[static_cast<std::size_t>(i)] == m - k + i) --i;
                if (i < 0) break;
                ++comb[static_cast<std::size_t>(i)];
                for (int t = i + 1; t < k; ++t)
                    comb[static_cast<std::size_t>(t)] = comb[static_cast<std::size_t>(t - 1)] + 1;
            }
        }
    };

    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (both_orders) {
            for (std::size_t j = 0; j < sorted.size(); ++j)
                if (i != j) emit_pair(sorted[i], sorted[j]);
        } else {
            for (std::size_t j = i + 1; j < sorted.size(); ++j) emit_pair(sorted[i], sorted[j]);
        }
    }
    return out;
}

CiLabel ground_truth_label(const Problem& problem, const CiQuery& q) {
    if (!problem.ground_truth)
        throw NoGroundTruth("problem " + problem.id + " carries no ground-truth graph");
    return d_separated(*problem.ground_truth, q.x, q.y, q.z) ? CiLabel::INDEPENDENT
                                                             : CiLabel::DEPENDENT;
}

const char* to_string(CiLabel label) {
    return label == CiLabel::INDEPENDENT ? "INDEPENDENT" : "DEPENDENT";
}

}  // namespace chatpc
