#include "chatpc/pc.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <exception>
#include <functional>
#include <set>
#include <thread>

namespace chatpc {

namespace {

struct QueryRecord {
    CiQuery query;
    std::string verdict;
    bool removed = false;
};

struct PairTask {
    int a = 0, b = 0;  // node indices, a < b
    std::vector<QueryRecord> log;
    std::optional<std::vector<std::string>> sepset;  // set => edge removed
    std::exception_ptr error;
};

// Size-k subsets of `pool` in lexicographic index order.
void for_each_subset(const std::vector<int>& pool, int k,
                     const std::function<bool(const std::vector<int>&)>& fn) {
    const int m = static_cast<int>(pool.size());
    if (k > m) return;
    std::vector<int> comb(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) comb[static_cast<std::size_t>(i)] = i;
    std::vector<int> subset(static_cast<std::size_t>(k));
    while (true) {
        for (int i = 0; i < k; ++i)
            subset[static_cast<std::size_t>(i)] = pool[static_cast<std::size_t>(
                comb[static_cast<std::size_t>(i)])];
        if (!fn(subset)) return;
        int i = k - 1;
        while (i >= 0 && comb[static_cast<std::size_t>(i)] == m - k + i) --i;
        if (i < 0) return;
        ++comb[static_cast<std::size_t>(i)];
        for (int t = i + 1; t < k; ++t)
            comb[static_cast<std::size_t>(t)] = comb[static_cast<std::size_t>(t - 1)] + 1;
    }
}

}  // namespace

SkeletonResult pc_skeleton(const Problem& problem, const CiOracle& oracle,
                           const PcOptions& opts) {
    if (opts.max_cond_size != kUnlimitedCondSize && opts.max_cond_size < 0)
        throw InvalidQuery("max_cond_size must be >= 0 or unlimited");

    const std::vector<std::string> names = problem.variable_names();
    const int n = static_cast<int>(names.size());
    Pdag g = Pdag::complete(names);
    SepSets sepsets;
    PcTrace trace;

    auto budget_check = [&]() {
        if (opts.query_budget && trace.total_queries >= *opts.query_budget)
            throw QueryBudgetExceeded(trace, g);
    };

    // Runs one pair's level-l tests; returns once a separating set is found.
    auto run_task = [&](PairTask& task, int level,
                        const std::vector<std::vector<int>>& adj,
                        std::atomic<long>* global_count) {
        std::set<std::vector<std::string>> tested;
        const std::string& x = names[static_cast<std::size_t>(task.a)];
        const std::string& y = names[static_cast<std::size_t>(task.b)];
        for (int side = 0; side < 2 && !task.sepset; ++side) {
            const int self = side == 0 ? task.a : task.b;
            const int other = side == 0 ? task.b : task.a;
            std::vector<int> pool;
            for (int v : adj[static_cast<std::size_t>(self)])
                if (v != other) pool.push_back(v);
            for_each_subset(pool, level, [&](const std::vector<int>& subset) {
                std::vector<std::string> z;
                z.reserve(subset.size());
                for (int v : subset) z.push_back(names[static_cast<std::size_t>(v)]);
                if (!tested.insert(z).second) return true;  // same set from the other side
                if (global_count != nullptr && opts.query_budget &&
                    global_count->load() >= *opts.query_budget)
                    return false;  // merge step surfaces the budget error
                CiQuery q(x, y, z);
                OracleVerdict verdict = oracle.query(problem, q);
                if (global_count != nullptr) global_count->fetch_add(1);
                Outcome outcome = verdict.decision.outcome;
                if (outcome == Outcome::UNDECIDED)
                    outcome = opts.undecided_keeps_edge ? Outcome::DEPENDENT
                                                        : Outcome::INDEPENDENT;
                const bool removed = outcome == Outcome::INDEPENDENT;
                task.log.push_back({q, to_string(verdict.decision.outcome), removed});
                if (removed) {
                    task.sepset = z;
                    return false;
                }
                return true;
            });
        }
    };

    // Merges one finished task into the shared trace/graph, enforcing the
    // budget in deterministic task order.
    auto merge_task = [&](PairTask& task) {
        for (std::size_t i = 0; i < task.log.size(); ++i) {
            budget_check();
            const QueryRecord& rec = task.log[i];
            ++trace.total_queries;
            TraceEntry entry;
            entry.action = rec.removed ? "edge_removed" : "edge_kept";
            entry.query = rec.query;
            entry.verdict = rec.verdict;
            if (rec.removed) entry.detail = rec.query.z;
            trace.entries.push_back(std::move(entry));
            if (rec.removed) {
                g.remove_edge(task.a, task.b);
                auto zs = rec.query.z;
                std::sort(zs.begin(), zs.end());
                sepsets[canonical_pair(names[static_cast<std::size_t>(task.a)],
                                       names[static_cast<std::size_t>(task.b)])] = zs;
            }
        }
        if (task.error) std::rethrow_exception(task.error);
    };

    int level = 0;
    while (true) {
        if (opts.max_cond_size != kUnlimitedCondSize && level > opts.max_cond_size) break;

        // Adjacency snapshot; under stable every test this level sees it.
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) adj[static_cast<std::size_t>(i)] = g.adjacency(i);

        std::vector<PairTask> tasks;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
                if (!g.has_undirected(a, b)) continue;
                const long da = static_cast<long>(adj[static_cast<std::size_t>(a)].size()) - 1;
                const long db = static_cast<long>(adj[static_cast<std::size_t>(b)].size()) - 1;
                if (da >= level || db >= level) {
                    PairTask task;
                    task.a = a;
                    task.b = b;
                    tasks.push_back(std::move(task));
                }
            }
        if (tasks.empty()) break;

        if (!opts.stable || opts.jobs <= 1) {
            // Sequential; non-stable mode re-reads adjacency after removals.
            for (auto& task : tasks) {
                if (!g.has_undirected(task.a, task.b)) continue;  // removed this level
                if (!opts.stable)
                    for (int i = 0; i < n; ++i) adj[static_cast<std::size_t>(i)] = g.adjacency(i);
                budget_check();
                std::atomic<long> count{trace.total_queries};
                run_task(task, level, adj, &count);
                merge_task(task);
            }
        } else {
            std::atomic<long> count{trace.total_queries};
            std::atomic<std::size_t> next{0};
            auto worker = [&] {
                while (true) {
                    const std::size_t idx = next.fetch_add(1);
                    if (idx >= tasks.size()) return;
                    try {
                        run_task(tasks[idx], level, adj, &count);
                    } catch (...) {
                        tasks[idx].error = std::current_exception();
                    }
                }
            };
            std::vector<std::thread> pool;
            const int threads = std::min<int>(opts.jobs, static_cast<int>(tasks.size()));
            pool.reserve(static_cast<std::size_t>(threads));
            for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
            for (auto& task : tasks) merge_task(task);
        }
        ++level;
    }

    return {std::move(g), std::move(sepsets), std::move(trace)};
}

Pdag orient_v_structures(const Pdag& skeleton, const SepSets& sepsets, PcTrace* trace) {
    Pdag g = skeleton;
    const int n = static_cast<int>(g.num_nodes());

    // Demanded orientations (parent -> collider), with the witnessing triple.
    std::set<std::pair<int, int>> demands;
    std::vector<std::array<int, 3>> triples;  // x, c, y
    for (int c = 0; c < n; ++c) {
        auto nbrs = g.adjacency(c);
        for (std::size_t i = 0; i < nbrs.size(); ++i)
            for (std::size_t j = i + 1; j < nbrs.size(); ++j) {
                const int x = nbrs[i], y = nbrs[j];
                if (g.adjacent(x, y)) continue;
                auto it = sepsets.find(canonical_pair(g.name_of(x), g.name_of(y)));
                if (it == sepsets.end()) continue;  // no recorded witness
                const auto& sep = it->second;
                if (std::find(sep.begin(), sep.end(), g.name_of(c)) != sep.end()) continue;
                demands.emplace(x, c);
                demands.emplace(y, c);
                triples.push_back({x, c, y});
            }
    }

    std::set<std::pair<int, int>> conflicted;
    for (const auto& [u, v] : demands)
        if (demands.count({v, u}))
            conflicted.emplace(std::min(u, v), std::max(u, v));

    for (const auto& [x, c, y] : triples) {
        bool applied = false;
        for (int parent : {x, y}) {
            if (conflicted.count({std::min(parent, c), std::max(parent, c)})) {
                if (trace)
                    trace->entries.push_back({"orientation_conflict",
                                              std::nullopt,
                                              std::nullopt,
                                              {g.name_of(parent), g.name_of(c)}});
                continue;
            }
            if (g.has_undirected(parent, c)) {
                g.orient(parent, c);
                applied = true;
            }
        }
        if (applied && trace)
            trace->entries.push_back({"collider_oriented",
                                      std::nullopt,
                                      std::nullopt,
                                      {g.name_of(x), g.name_of(c), g.name_of(y)}});
    }
    return g;
}

Pdag apply_meek_rules(const Pdag& pdag, PcTrace* trace) {
    std::vector<MeekConflict> conflicts;
    std::vector<MeekApplication> applications;
    Pdag out = meek_closure(pdag, &conflicts, &applications);
    if (trace) {
        for (const auto& app : applications)
            trace->entries.push_back(
                {"meek_applied", std::nullopt, std::nullopt, {app.from, app.to, app.rule}});
        for (const auto& c : conflicts)
            trace->entries.push_back(
                {"orientation_conflict", std::nullopt, std::nullopt, {c.from, c.to, c.rule}});
    }
    return out;
}

PcResult run_pc(const Problem& problem, const CiOracle& oracle, const PcOptions& opts) {
    SkeletonResult sk = pc_skeleton(problem, oracle, opts);
    if (!opts.orient) return {std::move(sk.skeleton), std::move(sk.trace)};
    Pdag oriented = orient_v_structures(sk.skeleton, sk.sepsets, &sk.trace);
    Pdag closed = apply_meek_rules(oriented, &sk.trace);
    return {std::move(closed), std::move(sk.trace)};
}

}  // namespace chatpc
