#include "chatpc/graph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

#include "chatpc/errors.hpp"
#include "chatpc/util.hpp"

namespace chatpc {

namespace {

std::map<std::string, int> build_index(const std::vector<std::string>& nodes) {
    std::map<std::string, int> idx;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].empty()) throw UnknownNode("empty node name");
        auto [it, inserted] = idx.emplace(nodes[i], static_cast<int>(i));
        if (!inserted) throw GraphError("duplicate node name: " + nodes[i]);
    }
    return idx;
}

// DFS back-edge search; on a cycle, reports the node sequence closing it.
void check_acyclic(const std::vector<std::string>& nodes,
                   const std::vector<std::vector<int>>& children) {
    const int n = static_cast<int>(nodes.size());
    std::vector<int> state(static_cast<std::size_t>(n), 0);  // 0 fresh, 1 on stack, 2 done
    std::vector<int> stack;
    std::function<void(int)> visit = [&](int u) {
        state[static_cast<std::size_t>(u)] = 1;
        stack.push_back(u);
        for (int v : children[static_cast<std::size_t>(u)]) {
            if (state[static_cast<std::size_t>(v)] == 1) {
                auto it = std::find(stack.begin(), stack.end(), v);
                std::string cycle;
                for (; it != stack.end(); ++it) cycle += nodes[static_cast<std::size_t>(*it)] + " -> ";
                cycle += nodes[static_cast<std::size_t>(v)];
                throw CycleDetected("cycle detected: " + cycle);
            }
            if (state[static_cast<std::size_t>(v)] == 0) visit(v);
        }
        stack.pop_back();
        state[static_cast<std::size_t>(u)] = 2;
    };
    for (int u = 0; u < n; ++u)
        if (state[static_cast<std::size_t>(u)] == 0) visit(u);
}

}  // namespace

void validate_dag(const std::vector<std::string>& nodes,
                  const std::vector<std::pair<std::string, std::string>>& edges) {
    auto idx = build_index(nodes);
    std::set<std::pair<int, int>> seen;
    std::vector<std::vector<int>> children(nodes.size());
    for (const auto& [p, c] : edges) {
        auto pi = idx.find(p);
        if (pi == idx.end()) throw UnknownNode("edge endpoint not declared: " + p);
        auto ci = idx.find(c);
        if (ci == idx.end()) throw UnknownNode("edge endpoint not declared: " + c);
        if (pi->second == ci->second) throw SelfLoop("self-loop on " + p);
        if (!seen.emplace(pi->second, ci->second).second)
            throw GraphError("duplicate edge " + p + " -> " + c);
        children[static_cast<std::size_t>(pi->second)].push_back(ci->second);
    }
    check_acyclic(nodes, children);
}

Dag::Dag(std::vector<std::string> nodes,
         const std::vector<std::pair<std::string, std::string>>& edges)
    : nodes_(std::move(nodes)) {
    validate_dag(nodes_, edges);
    index_ = build_index(nodes_);
    parents_.resize(nodes_.size());
    children_.resize(nodes_.size());
    for (const auto& [p, c] : edges) {
        int pi = index_.at(p), ci = index_.at(c);
        edges_.emplace_back(pi, ci);
        children_[static_cast<std::size_t>(pi)].push_back(ci);
        parents_[static_cast<std::size_t>(ci)].push_back(pi);
    }
    std::sort(edges_.begin(), edges_.end());
    for (auto& v : parents_) std::sort(v.begin(), v.end());
    for (auto& v : children_) std::sort(v.begin(), v.end());
}

std::vector<std::pair<std::string, std::string>> Dag::edge_names() const {
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(edges_.size());
    for (auto [p, c] : edges_)
        out.emplace_back(nodes_[static_cast<std::size_t>(p)], nodes_[static_cast<std::size_t>(c)]);
    return out;
}

int Dag::index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw UnknownNode("unknown node: " + name);
    return it->second;
}

bool Dag::has_node(const std::string& name) const { return index_.count(name) > 0; }

bool Dag::has_edge(int parent, int child) const {
    const auto& ch = children_[static_cast<std::size_t>(parent)];
    return std::binary_search(ch.begin(), ch.end(), child);
}

std::string Dag::to_dot() const {
    std::ostringstream os;
    os << "digraph g {\n";
    for (const auto& n : nodes_) os << "  \"" << n << "\";\n";
    for (auto [p, c] : edges_)
        os << "  \"" << nodes_[static_cast<std::size_t>(p)] << "\" -> \""
           << nodes_[static_cast<std::size_t>(c)] << "\";\n";
    os << "}\n";
    return os.str();
}

bool d_separated(const Dag& dag, const std::string& x, const std::string& y,
                 const std::vector<std::string>& z) {
    if (x == y) throw InvalidQuery("d_separated: x == y");
    const int xi = [&] {
        try {
            return dag.index_of(x);
        } catch (const UnknownNode& e) {
            throw InvalidQuery(e.what());
        }
    }();
    const int yi = [&] {
        try {
            return dag.index_of(y);
        } catch (const UnknownNode& e) {
            throw InvalidQuery(e.what());
        }
    }();
    const std::size_t n = dag.num_nodes();
    std::vector<char> in_z(n, 0);
    for (const auto& name : z) {
        int zi;
        try {
            zi = dag.index_of(name);
        } catch (const UnknownNode& e) {
            throw InvalidQuery(e.what());
        }
        if (zi == xi || zi == yi) throw InvalidQuery("d_separated: conditioning set contains an endpoint");
        in_z[static_cast<std::size_t>(zi)] = 1;
    }

    // Ancestral set of {x, y} ∪ z (closed under parents).
    std::vector<char> anc(n, 0);
    std::deque<int> work{xi, yi};
    for (std::size_t i = 0; i < n; ++i)
        if (in_z[i]) work.push_back(static_cast<int>(i));
    while (!work.empty()) {
        int u = work.front();
        work.pop_front();
        if (anc[static_cast<std::size_t>(u)]) continue;
        anc[static_cast<std::size_t>(u)] = 1;
        for (int p : dag.parents(u)) work.push_back(p);
    }

    // Moralize the induced subgraph: keep edges, marry parents.
    std::vector<std::set<int>> moral(n);
    auto link = [&](int a, int b) {
        moral[static_cast<std::size_t>(a)].insert(b);
        moral[static_cast<std::size_t>(b)].insert(a);
    };
    for (std::size_t w = 0; w < n; ++w) {
        if (!anc[w]) continue;
        const auto& ps = dag.parents(static_cast<int>(w));
        for (int p : ps) link(p, static_cast<int>(w));
        for (std::size_t i = 0; i < ps.size(); ++i)
            for (std::size_t j = i + 1; j < ps.size(); ++j) link(ps[i], ps[j]);
    }

    // Reachability from x avoiding z.
    std::vector<char> seen(n, 0);
    std::deque<int> bfs{xi};
    seen[static_cast<std::size_t>(xi)] = 1;
    while (!bfs.empty()) {
        int u = bfs.front();
        bfs.pop_front();
        if (u == yi) return false;
        for (int v : moral[static_cast<std::size_t>(u)]) {
            if (seen[static_cast<std::size_t>(v)] || in_z[static_cast<std::size_t>(v)]) continue;
            seen[static_cast<std::size_t>(v)] = 1;
            bfs.push_back(v);
        }
    }
    return true;
}

Pdag::Pdag(std::vector<std::string> nodes) : nodes_(std::move(nodes)) {
    index_ = build_index(nodes_);
}

Pdag Pdag::complete(std::vector<std::string> nodes) {
    Pdag p(std::move(nodes));
    const int n = static_cast<int>(p.num_nodes());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) p.add_undirected(i, j);
    return p;
}

Pdag Pdag::from_dag(const Dag& dag) {
    Pdag p(dag.nodes());
    for (auto [a, b] : dag.edges()) p.add_directed(a, b);
    return p;
}

int Pdag::index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw UnknownNode("unknown node: " + name);
    return it->second;
}

void Pdag::check_index(int i) const {
    if (i < 0 || i >= static_cast<int>(nodes_.size())) throw UnknownNode("node index out of range");
}

bool Pdag::has_directed(int from, int to) const { return directed_.count({from, to}) > 0; }

bool Pdag::has_undirected(int a, int b) const {
    return undirected_.count({std::min(a, b), std::max(a, b)}) > 0;
}

bool Pdag::adjacent(int a, int b) const {
    return has_undirected(a, b) || has_directed(a, b) || has_directed(b, a);
}

void Pdag::add_directed(int from, int to) {
    check_index(from);
    check_index(to);
    if (from == to) throw SelfLoop("self-loop on " + nodes_[static_cast<std::size_t>(from)]);
    if (adjacent(from, to)) throw GraphError("pair already linked");
    directed_.emplace(from, to);
}

void Pdag::add_undirected(int a, int b) {
    check_index(a);
    check_index(b);
    if (a == b) throw SelfLoop("self-loop on " + nodes_[static_cast<std::size_t>(a)]);
    if (adjacent(a, b)) throw GraphError("pair already linked");
    undirected_.emplace(std::min(a, b), std::max(a, b));
}

void Pdag::remove_edge(int a, int b) {
    directed_.erase({a, b});
    directed_.erase({b, a});
    undirected_.erase({std::min(a, b), std::max(a, b)});
}

void Pdag::orient(int from, int to) {
    if (!has_undirected(from, to)) throw GraphError("orient: edge is not undirected");
    undirected_.erase({std::min(from, to), std::max(from, to)});
    directed_.emplace(from, to);
}

std::vector<int> Pdag::adjacency(int i) const {
    std::set<int> out;
    for (auto [a, b] : directed_) {
        if (a == i) out.insert(b);
        if (b == i) out.insert(a);
    }
    for (auto [a, b] : undirected_) {
        if (a == i) out.insert(b);
        if (b == i) out.insert(a);
    }
    return {out.begin(), out.end()};
}

std::vector<int> Pdag::parents_of(int i) const {
    std::vector<int> out;
    for (auto [a, b] : directed_)
        if (b == i) out.push_back(a);
    return out;
}

std::vector<int> Pdag::undirected_neighbors(int i) const {
    std::vector<int> out;
    for (auto [a, b] : undirected_) {
        if (a == i) out.push_back(b);
        if (b == i) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t Pdag::num_edges() const { return directed_.size() + undirected_.size(); }

std::vector<std::pair<std::string, std::string>> Pdag::directed_edge_names() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (auto [a, b] : directed_)
        out.emplace_back(nodes_[static_cast<std::size_t>(a)], nodes_[static_cast<std::size_t>(b)]);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::pair<std::string, std::string>> Pdag::undirected_edge_names() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (auto [a, b] : undirected_)
        out.push_back(canonical_pair(nodes_[static_cast<std::size_t>(a)],
                                     nodes_[static_cast<std::size_t>(b)]));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::pair<std::string, std::string>> Pdag::skeleton_pairs() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (auto [a, b] : directed_)
        out.push_back(canonical_pair(nodes_[static_cast<std::size_t>(a)],
                                     nodes_[static_cast<std::size_t>(b)]));
    for (auto [a, b] : undirected_)
        out.push_back(canonical_pair(nodes_[static_cast<std::size_t>(a)],
                                     nodes_[static_cast<std::size_t>(b)]));
    std::sort(out.begin(), out.end());
    return out;
}

bool Pdag::equals(const Pdag& other) const {
    std::set<std::string> a(nodes_.begin(), nodes_.end());
    std::set<std::string> b(other.nodes_.begin(), other.nodes_.end());
    if (a != b) return false;
    auto da = directed_edge_names();
    auto db = other.directed_edge_names();
    auto ua = undirected_edge_names();
    auto ub = other.undirected_edge_names();
    return da == db && ua == ub;
}

std::string Pdag::to_dot() const {
    // Mixed graphs use digraph syntax; undirected edges render arrowhead-free.
    std::ostringstream os;
    os << "digraph g {\n";
    for (const auto& n : nodes_) os << "  \"" << n << "\";\n";
    for (const auto& [a, b] : directed_edge_names()) os << "  \"" << a << "\" -> \"" << b << "\";\n";
    for (const auto& [a, b] : undirected_edge_names())
        os << "  \"" << a << "\" -> \"" << b << "\" [dir=none];\n";
    os << "}\n";
    return os.str();
}

std::pair<std::string, std::string> canonical_pair(const std::string& a, const std::string& b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

namespace {

// True if adding from->to to the directed part would close a directed cycle.
bool creates_directed_cycle(const Pdag& g, int from, int to) {
    // Path to -> ... -> from through directed edges?
    std::deque<int> work{to};
    std::set<int> seen{to};
    while (!work.empty()) {
        int u = work.front();
        work.pop_front();
        if (u == from) return true;
        for (int i = 0; i < static_cast<int>(g.num_nodes()); ++i) {
            if (g.has_directed(u, i) && !seen.count(i)) {
                seen.insert(i);
                work.push_back(i);
            }
        }
    }
    return false;
}

// Orients a-b as from->to unless the reverse is already directed or the
// orientation would close a directed cycle; conflicts are reported, not fatal.
bool try_orient(Pdag& g, int from, int to, const char* rule,
                std::vector<MeekConflict>* conflicts,
                std::vector<MeekApplication>* applications) {
    if (g.has_directed(from, to)) return false;
    if (g.has_directed(to, from) || creates_directed_cycle(g, from, to)) {
        if (conflicts)
            conflicts->push_back({g.name_of(from), g.name_of(to), rule});
        return false;
    }
    g.orient(from, to);
    if (applications) applications->push_back({g.name_of(from), g.name_of(to), rule});
    return true;
}

}  // namespace

Pdag meek_closure(const Pdag& pdag, std::vector<MeekConflict>* conflicts,
                  std::vector<MeekApplication>* applications) {
    Pdag g = pdag;
    const int n = static_cast<int>(g.num_nodes());
    bool changed = true;
    while (changed) {
        changed = false;
        // R1: a->b, b-c, a and c non-adjacent  =>  b->c
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                if (!g.has_directed(a, b)) continue;
                for (int c : g.undirected_neighbors(b)) {
                    if (c == a || g.adjacent(a, c)) continue;
                    changed |= try_orient(g, b, c, "R1", conflicts, applications);
                }
            }
        // R2: a->b->c, a-c  =>  a->c
        for (int a = 0; a < n; ++a)
            for (int c : g.undirected_neighbors(a)) {
                for (int b = 0; b < n; ++b) {
                    if (g.has_directed(a, b) && g.has_directed(b, c)) {
                        changed |= try_orient(g, a, c, "R2", conflicts, applications);
                        break;
                    }
                }
            }
        // R3: a-b, a-c, a-d, c->b, d->b, c and d non-adjacent  =>  a->b
        for (int a = 0; a < n; ++a) {
            auto nbrs = g.undirected_neighbors(a);
            for (int b : nbrs) {
                bool done = false;
                for (std::size_t i = 0; i < nbrs.size() && !done; ++i)
                    for (std::size_t j = i + 1; j < nbrs.size() && !done; ++j) {
                        int c = nbrs[i], d = nbrs[j];
                        if (c == b || d == b) continue;
                        if (g.has_directed(c, b) && g.has_directed(d, b) && !g.adjacent(c, d)) {
                            changed |= try_orient(g, a, b, "R3", conflicts, applications);
                            done = true;
                        }
                    }
            }
        }
        // R4: a-b, a-c, c->d, d->b, b and c non-adjacent, a and d adjacent  =>  a->b
        for (int a = 0; a < n; ++a) {
            auto nbrs = g.undirected_neighbors(a);
            for (int b : nbrs) {
                bool done = false;
                for (int c : nbrs) {
                    if (done || c == b || g.adjacent(c, b)) continue;
                    for (int d = 0; d < n; ++d) {
                        if (d == a || d == b || d == c) continue;
                        if (g.has_directed(c, d) && g.has_directed(d, b) && g.adjacent(a, d)) {
                            changed |= try_orient(g, a, b, "R4", conflicts, applications);
                            done = true;
                            break;
                        }
                    }
                }
            }
        }
    }
    return g;
}

Pdag cpdag_of(const Dag& dag) {
    Pdag p(dag.nodes());
    for (auto [a, b] : dag.edges()) p.add_undirected(a, b);
    // V-structures of the DAG: non-adjacent parents of a common child.
    for (int c = 0; c < static_cast<int>(dag.num_nodes()); ++c) {
        const auto& ps = dag.parents(c);
        for (std::size_t i = 0; i < ps.size(); ++i)
            for (std::size_t j = i + 1; j < ps.size(); ++j) {
                if (dag.adjacent(ps[i], ps[j])) continue;
                if (p.has_undirected(ps[i], c)) p.orient(ps[i], c);
                if (p.has_undirected(ps[j], c)) p.orient(ps[j], c);
            }
    }
    return meek_closure(p);
}

MetricsReport skeleton_metrics(const Pdag& predicted, const Dag& truth) {
    std::set<std::string> a(predicted.nodes().begin(), predicted.nodes().end());
    std::set<std::string> b(truth.nodes().begin(), truth.nodes().end());
    if (a != b) throw NodeSetMismatch("skeleton_metrics: node sets differ");

    std::set<std::pair<std::string, std::string>> truth_pairs;
    for (const auto& [p, c] : truth.edge_names()) truth_pairs.insert(canonical_pair(p, c));
    auto pred_list = predicted.skeleton_pairs();
    std::set<std::pair<std::string, std::string>> pred_pairs(pred_list.begin(), pred_list.end());

    long tp = 0, fp = 0, tn = 0, fn = 0;
    const auto& names = truth.nodes();
    for (std::size_t i = 0; i < names.size(); ++i)
        for (std::size_t j = i + 1; j < names.size(); ++j) {
            auto key = canonical_pair(names[i], names[j]);
            const bool in_truth = truth_pairs.count(key) > 0;
            const bool in_pred = pred_pairs.count(key) > 0;
            if (in_truth && in_pred)
                ++tp;
            else if (!in_truth && in_pred)
                ++fp;
            else if (in_truth && !in_pred)
                ++fn;
            else
                ++tn;
        }
    return make_metrics(tp, fp, tn, fn, 0, 0, "edge");
}

int shd(const Pdag& a, const Pdag& b) {
    std::set<std::string> an(a.nodes().begin(), a.nodes().end());
    std::set<std::string> bn(b.nodes().begin(), b.nodes().end());
    if (an != bn) throw NodeSetMismatch("shd: node sets differ");

    // Status per unordered pair: 0 absent, 1 undirected, 2 lo->hi, 3 hi->lo.
    auto status = [](const Pdag& g, int i, int j) {
        if (g.has_undirected(i, j)) return 1;
        if (g.has_directed(i, j)) return 2;
        if (g.has_directed(j, i)) return 3;
        return 0;
    };
    const std::vector<std::string> names(an.begin(), an.end());
    int dist = 0;
    for (std::size_t i = 0; i < names.size(); ++i)
        for (std::size_t j = i + 1; j < names.size(); ++j) {
            int sa = status(a, a.index_of(names[i]), a.index_of(names[j]));
            int sb = status(b, b.index_of(names[i]), b.index_of(names[j]));
            if (sa != sb) ++dist;
        }
    return dist;
}

}  // namespace chatpc
