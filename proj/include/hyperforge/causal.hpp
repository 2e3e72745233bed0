#ifndef HYPERFORGE_CAUSAL_HPP
#define HYPERFORGE_CAUSAL_HPP

#include <hyperforge/multiway.hpp>

#include <cmath>
#include <deque>

namespace hyperforge {

// Directed graph over updating events; an edge A -> B records that B consumed
// an instance produced by A. Single-trace graphs are acyclic; merged multiway
// variants may contain loops.
struct CausalGraph {
    struct Node {
        std::uint32_t rule = 0;
        std::uint32_t step = 0;
        std::string desc;
    };
    std::vector<Node> nodes;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges; // deduped, sorted

    std::vector<std::vector<std::uint32_t>> out_adjacency() const {
        std::vector<std::vector<std::uint32_t>> adj(nodes.size());
        for (auto& [a, b] : edges) adj[a].push_back(b);
        return adj;
    }
    std::vector<std::vector<std::uint32_t>> in_adjacency() const {
        std::vector<std::vector<std::uint32_t>> adj(nodes.size());
        for (auto& [a, b] : edges) adj[b].push_back(a);
        return adj;
    }

    bool acyclic() const {
        auto adj = out_adjacency();
        std::vector<int> state(nodes.size(), 0);
        std::function<bool(std::uint32_t)> visit = [&](std::uint32_t v) {
            state[v] = 1;
            for (auto w : adj[v]) {
                if (state[w] == 1) return false;
                if (state[w] == 0 && !visit(w)) return false;
            }
            state[v] = 2;
            return true;
        };
        for (std::uint32_t v = 0; v < nodes.size(); ++v)
            if (state[v] == 0 && !visit(v)) return false;
        return true;
    }
};

inline void dedupe_edges(std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

// Causal graph of a hypergraph trace. With `initial_event`, a pseudo-event
// producing the initial relations is prepended as node 0.
inline CausalGraph causal_graph(const Trace& tr, bool initial_event = false) {
    CausalGraph g;
    std::uint32_t offset = initial_event ? 1 : 0;
    if (initial_event) g.nodes.push_back({0, 0, "initial"});
    for (auto& ev : tr.events)
        g.nodes.push_back({ev.match.rule_index, ev.step, ""});
    for (std::size_t ei = 0; ei < tr.events.size(); ++ei) {
        for (auto id : tr.events[ei].match.inputs) {
            int c = tr.instances[id].creator;
            if (c >= 0)
                g.edges.push_back({static_cast<std::uint32_t>(c) + offset,
                                   static_cast<std::uint32_t>(ei) + offset});
            else if (initial_event)
                g.edges.push_back({0, static_cast<std::uint32_t>(ei) + offset});
        }
    }
    dedupe_edges(g.edges);
    return g;
}

inline CausalGraph causal_graph(const StringTrace& tr, bool initial_event = false) {
    CausalGraph g;
    std::uint32_t offset = initial_event ? 1 : 0;
    if (initial_event) g.nodes.push_back({0, 0, "initial"});
    for (auto& ev : tr.events)
        g.nodes.push_back({ev.rule_index, ev.step, ""});
    for (std::size_t ei = 0; ei < tr.events.size(); ++ei) {
        for (auto id : tr.events[ei].consumed) {
            int c = tr.tokens[id].creator;
            if (c >= 0)
                g.edges.push_back({static_cast<std::uint32_t>(c) + offset,
                                   static_cast<std::uint32_t>(ei) + offset});
            else if (initial_event)
                g.edges.push_back({0, static_cast<std::uint32_t>(ei) + offset});
        }
    }
    dedupe_edges(g.edges);
    return g;
}

// Multiway causal graph: union of causal relations over every branch of the
// unmerged expansion, with events deduped by canonical descriptor.
inline CausalGraph multiway_causal(const MultiwayTree& tree) {
    CausalGraph g;
    std::unordered_map<std::string, std::uint32_t> index;
    std::vector<std::uint32_t> node_of_event(tree.events.size());
    for (std::size_t e = 0; e < tree.events.size(); ++e) {
        auto it = index.find(tree.events[e].desc);
        if (it != index.end()) {
            node_of_event[e] = it->second;
        } else {
            std::uint32_t id = static_cast<std::uint32_t>(g.nodes.size());
            g.nodes.push_back({0, tree.events[e].layer, tree.events[e].desc});
            index[tree.events[e].desc] = id;
            node_of_event[e] = id;
        }
    }
    for (std::size_t e = 0; e < tree.events.size(); ++e) {
        for (auto id : tree.events[e].consumed) {
            auto it = tree.creator.find(id);
            if (it != tree.creator.end())
                g.edges.push_back({node_of_event[it->second], node_of_event[e]});
        }
    }
    dedupe_edges(g.edges);
    return g;
}

// Causal graph of the events along one root-to-leaf path of the expansion.
inline CausalGraph path_causal(const MultiwayTree& tree, const std::vector<int>& path) {
    CausalGraph g;
    std::unordered_map<int, std::uint32_t> node_of;
    for (auto e : path) {
        node_of[e] = static_cast<std::uint32_t>(g.nodes.size());
        g.nodes.push_back({0, tree.events[e].layer, tree.events[e].desc});
    }
    for (auto e : path) {
        for (auto id : tree.events[e].consumed) {
            auto it = tree.creator.find(id);
            if (it != tree.creator.end() && node_of.count(it->second))
                g.edges.push_back({node_of[it->second], node_of[e]});
        }
    }
    dedupe_edges(g.edges);
    return g;
}

// Canonical key for directed-graph isomorphism: nodes become elements carrying
// a unary relation, edges binary relations.
inline CanonicalKey causal_canonical_key(const CausalGraph& g, std::size_t element_bound = 256) {
    Hypergraph h;
    for (std::uint32_t v = 0; v < g.nodes.size(); ++v) h.relations.push_back({v});
    for (auto& [a, b] : g.edges) h.relations.push_back({a, b});
    return canonical_key(h, element_bound);
}

inline bool causal_isomorphic(const CausalGraph& a, const CausalGraph& b,
                              std::size_t element_bound = 256) {
    if (a.nodes.size() != b.nodes.size() || a.edges.size() != b.edges.size()) return false;
    return causal_canonical_key(a, element_bound) == causal_canonical_key(b, element_bound);
}

// ---- cones ---------------------------------------------------------------------

// C_t: number of events reachable from `event` within <= t directed hops
// (the start event itself counts, so C_0 = 1).
inline std::uint64_t cone_volume(const CausalGraph& g, std::uint32_t event, std::uint32_t t) {
    if (event >= g.nodes.size()) throw UnknownNode("cone_volume: unknown event");
    auto adj = g.out_adjacency();
    std::vector<std::int64_t> dist(g.nodes.size(), -1);
    std::deque<std::uint32_t> q{event};
    dist[event] = 0;
    std::uint64_t count = 1;
    while (!q.empty()) {
        auto u = q.front();
        q.pop_front();
        if (dist[u] == static_cast<std::int64_t>(t)) continue;
        for (auto v : adj[u])
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                ++count;
                q.push_back(v);
            }
    }
    return count;
}

// Reference d-dimensional directed grid DAG (edges from each lattice point to
// its +1 neighbors); node 0 is the origin corner.
inline CausalGraph directed_grid(std::uint32_t d, std::uint32_t n) {
    CausalGraph g;
    std::uint64_t total = 1;
    for (std::uint32_t i = 0; i < d; ++i) total *= n;
    if (total > 2000000) throw ResourceLimit("directed_grid: too large");
    g.nodes.resize(total);
    auto coord_step = [&](std::uint64_t idx, std::uint32_t axis) {
        std::uint64_t stride = 1;
        for (std::uint32_t i = 0; i < axis; ++i) stride *= n;
        std::uint64_t c = (idx / stride) % n;
        return std::make_pair(c, stride);
    };
    for (std::uint64_t v = 0; v < total; ++v) {
        std::uint32_t level = 0;
        for (std::uint32_t a = 0; a < d; ++a) {
            auto [c, stride] = coord_step(v, a);
            level += static_cast<std::uint32_t>(c);
            if (c + 1 < n)
                g.edges.push_back({static_cast<std::uint32_t>(v),
                                   static_cast<std::uint32_t>(v + stride)});
        }
        g.nodes[v].step = level;
    }
    dedupe_edges(g.edges);
    return g;
}

// ---- grid foliations (boosts) -----------------------------------------------------

struct BoostedFoliation {
    double beta = 0.0;
    double gamma = 1.0;
    std::vector<std::uint32_t> slice; // per event
    std::vector<std::uint32_t> replay_order;
    std::string final_string;
    std::uint32_t slice_count = 0;
    // true when no two directly connected events share a slice; for larger
    // |beta| discreteness lets lightlike-adjacent events round into one slice
    bool strict = true;

    std::uint32_t slices_to_event(std::size_t event) const { return slice[event] + 1; }
};

// Boosted foliation of a string trace with grid-like causal structure: slices
// by the Lorentz coordinate gamma (t - beta x). The exact coordinate orders
// causally connected events strictly, so replaying in its order is a legal
// update sequence; integer slices come from rounding it down.
inline BoostedFoliation foliate_grid(const StringTrace& tr, double beta) {
    if (!(beta > -1.0 && beta < 1.0)) throw InvalidBeta("foliate_grid: |beta| must be < 1");
    BoostedFoliation out;
    out.beta = beta;
    out.gamma = 1.0 / std::sqrt(1.0 - beta * beta);

    std::size_t ne = tr.events.size();
    std::vector<double> tprime(ne);
    for (std::size_t e = 0; e < ne; ++e) {
        double t = static_cast<double>(tr.events[e].step);
        double x = static_cast<double>(tr.events[e].position);
        tprime[e] = out.gamma * (t - beta * x);
    }
    double tmin = 0;
    if (ne) tmin = *std::min_element(tprime.begin(), tprime.end());
    out.slice.resize(ne);
    for (std::size_t e = 0; e < ne; ++e)
        out.slice[e] = static_cast<std::uint32_t>(std::floor(tprime[e] - tmin + 1e-9));

    for (std::size_t e = 0; e < ne; ++e)
        for (auto id : tr.events[e].consumed) {
            int c = tr.tokens[id].creator;
            if (c >= 0 && out.slice[e] == out.slice[c]) out.strict = false;
        }

    // replay in exact-coordinate order (position and index break exact ties)
    std::vector<std::uint32_t> order(ne);
    for (std::uint32_t i = 0; i < ne; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (tprime[a] != tprime[b]) return tprime[a] < tprime[b];
        if (tr.events[a].position != tr.events[b].position)
            return tr.events[a].position < tr.events[b].position;
        return a < b;
    });
    out.replay_order = order;

    std::vector<TokenId> seq = tr.states[0];
    for (auto e : order) {
        const auto& ev = tr.events[e];
        // consumed tokens must form a contiguous run in the current sequence
        auto it = std::search(seq.begin(), seq.end(), ev.consumed.begin(), ev.consumed.end());
        if (it == seq.end() && !ev.consumed.empty())
            throw SemanticError("foliate_grid: replay order is not a legal update sequence");
        std::size_t pos = static_cast<std::size_t>(it - seq.begin());
        seq.erase(seq.begin() + pos, seq.begin() + pos + ev.consumed.size());
        seq.insert(seq.begin() + pos, ev.produced.begin(), ev.produced.end());
    }
    for (auto id : seq) out.final_string += tr.tokens[id].symbol;
    std::uint32_t mx = 0;
    for (auto s : out.slice) mx = std::max(mx, s + 1);
    out.slice_count = mx;
    return out;
}

// ---- disconnection and loops --------------------------------------------------------

struct DisconnectionReport {
    // component count of the event graph restricted to events with step > s
    std::vector<std::uint32_t> suffix_components;
    std::optional<std::uint32_t> first_split; // earliest s with > 1 component
};

inline DisconnectionReport detect_disconnection(const CausalGraph& g) {
    DisconnectionReport rep;
    std::uint32_t max_step = 0;
    for (auto& n : g.nodes) max_step = std::max(max_step, n.step);
    for (std::uint32_t s = 0; s <= max_step; ++s) {
        std::vector<std::uint32_t> keep;
        std::unordered_map<std::uint32_t, std::uint32_t> pos;
        for (std::uint32_t v = 0; v < g.nodes.size(); ++v)
            if (g.nodes[v].step > s) {
                pos[v] = static_cast<std::uint32_t>(keep.size());
                keep.push_back(v);
            }
        if (keep.empty()) break;
        std::vector<std::uint32_t> parent(keep.size());
        std::iota(parent.begin(), parent.end(), 0u);
        std::function<std::uint32_t(std::uint32_t)> find = [&](std::uint32_t x) {
            while (parent[x] != x) {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            return x;
        };
        for (auto& [a, b] : g.edges)
            if (pos.count(a) && pos.count(b)) parent[find(pos[a])] = find(pos[b]);
        std::set<std::uint32_t> roots;
        for (std::uint32_t i = 0; i < keep.size(); ++i) roots.insert(find(i));
        rep.suffix_components.push_back(static_cast<std::uint32_t>(roots.size()));
        if (roots.size() > 1 && !rep.first_split) rep.first_split = s;
    }
    return rep;
}

// Cycles in a merged event graph (strongly connected components of size > 1
// plus self-loops).
inline std::vector<std::vector<std::uint32_t>> detect_loops(const CausalGraph& g) {
    std::vector<std::vector<std::uint32_t>> loops;
    // Tarjan SCC
    std::vector<std::int32_t> index(g.nodes.size(), -1), low(g.nodes.size(), 0);
    std::vector<bool> on_stack(g.nodes.size(), false);
    std::vector<std::uint32_t> stack;
    auto adj = g.out_adjacency();
    std::int32_t counter = 0;
    std::function<void(std::uint32_t)> strong = [&](std::uint32_t v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (auto w : adj[v]) {
            if (index[w] < 0) {
                strong(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<std::uint32_t> comp;
            while (true) {
                auto w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp.push_back(w);
                if (w == v) break;
            }
            bool self_loop = false;
            for (auto w : adj[v])
                if (w == v) self_loop = true;
            if (comp.size() > 1 || self_loop) loops.push_back(comp);
        }
    };
    for (std::uint32_t v = 0; v < g.nodes.size(); ++v)
        if (index[v] < 0) strong(v);
    return loops;
}

} // namespace hyperforge

#endif
