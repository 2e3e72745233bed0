#ifndef HYPERFORGE_MULTIWAY_HPP
#define HYPERFORGE_MULTIWAY_HPP

#include <hyperforge/engine.hpp>
#include <hyperforge/strings.hpp>

#include <cstdint>
#include <deque>
#include <functional>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace hyperforge {

// ---- substrates ---------------------------------------------------------------
//
// A substrate provides states with stable per-token identities, a canonical
// key (merging criterion), and the complete one-event successor set. Keys and
// event descriptors are plain strings so the graph layer stays untemplated.

using GlobalId = std::uint64_t;

struct StringSubstrateState {
    std::vector<std::pair<GlobalId, char>> tokens;

    std::string str() const {
        std::string s;
        for (auto& [id, c] : tokens) s += c;
        return s;
    }
};

struct SubstrateSuccessor0 {
    std::vector<GlobalId> consumed;
    std::vector<GlobalId> produced;
    std::string desc; // canonical event descriptor (dedup key across branches)
};

struct StringSubstrate {
    using State = StringSubstrateState;
    using Rules = StringRuleSet;
    struct Successor : SubstrateSuccessor0 {
        State state;
    };

    static State make(const std::string& s, GlobalId& next_id) {
        State st;
        for (char c : s) st.tokens.push_back({next_id++, c});
        return st;
    }
    static std::string key(const State& s) { return s.str(); }

    static std::vector<Successor> successors(const State& s, const Rules& rules,
                                             GlobalId& next_id) {
        std::vector<Successor> out;
        std::string cur = s.str();
        for (auto& m : string_matches(cur, rules)) {
            Successor succ;
            const auto& rule = rules[m.rule_index];
            for (std::size_t i = 0; i < rule.pattern.size(); ++i)
                succ.consumed.push_back(s.tokens[m.offset + i].first);
            State next;
            next.tokens.assign(s.tokens.begin(), s.tokens.begin() + m.offset);
            for (char c : rule.replacement) {
                next.tokens.push_back({next_id, c});
                succ.produced.push_back(next_id);
                ++next_id;
            }
            next.tokens.insert(next.tokens.end(),
                               s.tokens.begin() + m.offset + rule.pattern.size(),
                               s.tokens.end());
            succ.state = std::move(next);
            succ.desc = cur + "|" + std::to_string(m.rule_index) + "@" + std::to_string(m.offset);
            out.push_back(std::move(succ));
        }
        return out;
    }
};

struct HypergraphSubstrateState {
    std::vector<std::pair<GlobalId, Relation>> instances;
    ElementId next_element = 0;

    Hypergraph graph() const {
        Hypergraph h;
        for (auto& [id, r] : instances) h.relations.push_back(r);
        return h;
    }
};

struct HypergraphSubstrate {
    using State = HypergraphSubstrateState;
    using Rules = RuleSet;
    struct Successor : SubstrateSuccessor0 {
        State state;
    };

    static State make(const Hypergraph& h, GlobalId& next_id) {
        State st;
        for (auto& r : h.relations) {
            st.instances.push_back({next_id++, r});
            for (auto e : r) st.next_element = std::max(st.next_element, e + 1);
        }
        return st;
    }
    static std::string key(const State& s) { return canonical_key(s.graph()).str(); }

    static std::vector<Successor> successors(const State& s, const Rules& rules,
                                             GlobalId& next_id) {
        std::vector<Successor> out;
        // reuse the engine matcher on a scratch trace
        Trace scratch;
        EngineState es;
        es.instances = &scratch.instances;
        for (auto& [gid, r] : s.instances) {
            es.push_alive(static_cast<InstanceId>(scratch.instances.size()));
            scratch.instances.push_back({r, -1, -1, 0});
        }
        es.next_element = s.next_element;
        auto matches = find_matches(es, rules);

        Hypergraph g = s.graph();
        auto labelings = canonical_labelings(g);
        std::string source_key = canonical_key(g).str();

        for (auto& m : matches) {
            Successor succ;
            for (auto idx : m.inputs) succ.consumed.push_back(s.instances[idx].first);
            State next;
            next.next_element = s.next_element;
            std::unordered_set<InstanceId> used(m.inputs.begin(), m.inputs.end());
            for (std::size_t i = 0; i < s.instances.size(); ++i)
                if (!used.count(static_cast<InstanceId>(i))) next.instances.push_back(s.instances[i]);
            // instantiate rhs with fresh elements
            const Rule& rule = rules[m.rule_index];
            std::unordered_map<Variable, ElementId> fresh;
            auto lhs_vars = rule.lhs_variables();
            auto resolve = [&](Variable v) -> ElementId {
                if (std::binary_search(lhs_vars.begin(), lhs_vars.end(), v))
                    return m.binding[v];
                auto it = fresh.find(v);
                if (it != fresh.end()) return it->second;
                ElementId e = next.next_element++;
                fresh[v] = e;
                return e;
            };
            for (auto& rel : rule.rhs) {
                Relation r(rel.size());
                for (std::size_t p = 0; p < rel.size(); ++p) r[p] = resolve(rel[p]);
                next.instances.push_back({next_id, r});
                succ.produced.push_back(next_id);
                ++next_id;
            }

            // canonical event descriptor: minimal over all optimal labelings
            std::string best;
            for (auto& lab : labelings) {
                std::string d = source_key + "|" + std::to_string(m.rule_index) + "|";
                std::vector<std::vector<std::uint32_t>> consumed_tuples;
                for (auto idx : m.inputs) {
                    std::vector<std::uint32_t> t;
                    for (auto e : s.instances[idx].second) t.push_back(lab.at(e));
                    consumed_tuples.push_back(std::move(t));
                }
                std::sort(consumed_tuples.begin(), consumed_tuples.end());
                for (auto& t : consumed_tuples) {
                    d += "(";
                    for (auto v : t) d += std::to_string(v) + ",";
                    d += ")";
                }
                d += "|b";
                for (auto v : lhs_vars) d += std::to_string(lab.at(m.binding[v])) + ",";
                if (best.empty() || d < best) best = d;
            }
            succ.desc = best;
            succ.state = std::move(next);
            out.push_back(std::move(succ));
        }
        return out;
    }
};

// ---- multiway graphs -----------------------------------------------------------

enum class MultiwayMode { Evolution, States };

struct MultiwayNode {
    std::string key;
    std::uint32_t layer = 0; // first-encounter layer (states) / own layer (evolution)
};

struct MultiwayEdge {
    std::uint32_t src = 0, dst = 0;
    std::string desc;
};

struct MultiwayGraph {
    MultiwayMode mode = MultiwayMode::States;
    std::vector<MultiwayNode> nodes;
    std::vector<MultiwayEdge> edges; // deduped by (src, dst, desc)
    std::vector<std::vector<std::uint32_t>> layers;
    bool complete = false; // expansion exhausted before hitting limits

    std::uint32_t find(const std::string& key) const {
        for (std::uint32_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].key == key) return i;
        throw UnknownNode("multiway node not found: " + key);
    }
    bool contains(const std::string& key) const {
        for (auto& n : nodes)
            if (n.key == key) return true;
        return false;
    }
    // edges deduped to one per ordered node pair (states-graph view)
    std::vector<std::pair<std::uint32_t, std::uint32_t>> deduped_pairs() const {
        std::set<std::pair<std::uint32_t, std::uint32_t>> s;
        for (auto& e : edges) s.insert({e.src, e.dst});
        return {s.begin(), s.end()};
    }
};

inline constexpr std::size_t kDefaultMultiwayNodeCap = 1000000;

template <class Sub>
MultiwayGraph build_multiway(const std::vector<typename Sub::State>& initial,
                             const typename Sub::Rules& rules, MultiwayMode mode,
                             std::uint32_t max_layers,
                             std::size_t node_cap = kDefaultMultiwayNodeCap,
                             GlobalId next_id = 1000000) {
    MultiwayGraph g;
    g.mode = mode;
    // group representative states per node
    std::vector<typename Sub::State> reps;
    std::unordered_map<std::string, std::uint32_t> index; // states mode
    std::set<std::tuple<std::uint32_t, std::uint32_t, std::string>> edge_set;

    std::vector<std::uint32_t> frontier;
    g.layers.push_back({});
    for (auto& st : initial) {
        std::string key = Sub::key(st);
        if (mode == MultiwayMode::States && index.count(key)) continue;
        bool dup = false;
        if (mode == MultiwayMode::Evolution)
            for (auto id : g.layers[0])
                if (g.nodes[id].key == key) dup = true;
        if (dup) continue;
        std::uint32_t id = static_cast<std::uint32_t>(g.nodes.size());
        g.nodes.push_back({key, 0});
        reps.push_back(st);
        if (mode == MultiwayMode::States) index[key] = id;
        g.layers[0].push_back(id);
        frontier.push_back(id);
    }

    g.complete = true;
    for (std::uint32_t layer = 1; layer <= max_layers && !frontier.empty(); ++layer) {
        std::unordered_map<std::string, std::uint32_t> layer_index;
        std::vector<std::uint32_t> next_frontier;
        g.layers.push_back({});
        for (auto src : frontier) {
            auto succs = Sub::successors(reps[src], rules, next_id);
            for (auto& s : succs) {
                std::string key = Sub::key(s.state);
                std::uint32_t dst;
                if (mode == MultiwayMode::States) {
                    auto it = index.find(key);
                    if (it != index.end()) {
                        dst = it->second;
                    } else {
                        dst = static_cast<std::uint32_t>(g.nodes.size());
                        g.nodes.push_back({key, layer});
                        reps.push_back(s.state);
                        index[key] = dst;
                        g.layers[layer].push_back(dst);
                        next_frontier.push_back(dst);
                    }
                } else {
                    auto it = layer_index.find(key);
                    if (it != layer_index.end()) {
                        dst = it->second;
                    } else {
                        dst = static_cast<std::uint32_t>(g.nodes.size());
                        g.nodes.push_back({key, layer});
                        reps.push_back(s.state);
                        layer_index[key] = dst;
                        g.layers[layer].push_back(dst);
                        next_frontier.push_back(dst);
                    }
                }
                if (edge_set.insert({src, dst, s.desc}).second)
                    g.edges.push_back({src, dst, s.desc});
                if (g.nodes.size() > node_cap)
                    throw ResourceLimit("build_multiway: node cap exceeded");
            }
        }
        if (!next_frontier.empty() && layer == max_layers) g.complete = false;
        frontier = std::move(next_frontier);
    }
    return g;
}

inline MultiwayGraph build_string_multiway(const std::vector<std::string>& initial,
                                           const StringRuleSet& rules, MultiwayMode mode,
                                           std::uint32_t max_layers,
                                           std::size_t node_cap = kDefaultMultiwayNodeCap) {
    GlobalId next_id = 0;
    std::vector<StringSubstrate::State> init;
    for (auto& s : initial) init.push_back(StringSubstrate::make(s, next_id));
    return build_multiway<StringSubstrate>(init, rules, mode, max_layers, node_cap, next_id);
}

inline MultiwayGraph build_hypergraph_multiway(const std::vector<Hypergraph>& initial,
                                               const RuleSet& rules, MultiwayMode mode,
                                               std::uint32_t max_layers,
                                               std::size_t node_cap = kDefaultMultiwayNodeCap) {
    GlobalId next_id = 0;
    std::vector<HypergraphSubstrate::State> init;
    for (auto& h : initial) init.push_back(HypergraphSubstrate::make(h, next_id));
    return build_multiway<HypergraphSubstrate>(init, rules, mode, max_layers, node_cap, next_id);
}

// ---- path weights ---------------------------------------------------------------

// Number of distinct event paths from the root reaching each node, counting
// paths only up to the first encounter of a state: edges that do not increase
// the first-encounter layer are ignored.
inline std::vector<std::uint64_t> path_weights(const MultiwayGraph& g) {
    if (g.mode != MultiwayMode::States)
        throw SemanticError("path_weights expects a states-mode multiway graph");
    std::vector<std::uint64_t> w(g.nodes.size(), 0);
    for (auto id : g.layers.empty() ? std::vector<std::uint32_t>{} : g.layers[0]) w[id] = 1;
    // process nodes in layer order
    std::vector<std::uint32_t> order(g.nodes.size());
    for (std::uint32_t i = 0; i < g.nodes.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return g.nodes[a].layer < g.nodes[b].layer;
    });
    for (auto n : order)
        for (auto& e : g.edges)
            if (e.dst == n && g.nodes[e.src].layer < g.nodes[n].layer) w[n] += w[e.src];
    return w;
}

// ---- branchial graphs -------------------------------------------------------------

struct BranchialGraph {
    std::vector<std::uint32_t> nodes; // multiway node ids in this slice
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

    std::size_t degree_component_count() const;
    // BFS distance; throws if disconnected and b unreachable counts stay out
    std::map<std::uint32_t, std::uint32_t> distances(std::uint32_t source) const {
        std::map<std::uint32_t, std::vector<std::uint32_t>> adj;
        for (auto& [a, b] : edges) {
            adj[a].push_back(b);
            adj[b].push_back(a);
        }
        std::map<std::uint32_t, std::uint32_t> dist{{source, 0}};
        std::deque<std::uint32_t> q{source};
        while (!q.empty()) {
            auto u = q.front();
            q.pop_front();
            for (auto v : adj[u])
                if (!dist.count(v)) {
                    dist[v] = dist[u] + 1;
                    q.push_back(v);
                }
        }
        return dist;
    }
    std::size_t diameter() const {
        std::size_t best = 0;
        for (auto n : nodes) {
            auto d = distances(n);
            for (auto& [v, dd] : d) best = std::max<std::size_t>(best, dd);
        }
        return best;
    }
    bool connected() const {
        if (nodes.empty()) return true;
        return distances(nodes[0]).size() == nodes.size();
    }
};

// Slices of an evolution-mode multiway graph under a foliation (default: the
// construction layers). Edges join same-slice states appearing in fresh
// branch pairs: distinct states sharing an ancestor within `thickening`+1
// earlier slices.
inline std::vector<BranchialGraph> branchial(const MultiwayGraph& g,
                                             const std::vector<std::uint32_t>* foliation = nullptr,
                                             std::uint32_t thickening = 0) {
    std::vector<std::uint32_t> slice(g.nodes.size());
    if (foliation) {
        if (foliation->size() != g.nodes.size())
            throw SemanticError("foliation size mismatch");
        slice = *foliation;
        for (auto& e : g.edges)
            if (slice[e.src] >= slice[e.dst])
                throw SemanticError("foliation violates the evolution order");
    } else {
        for (std::uint32_t i = 0; i < g.nodes.size(); ++i) slice[i] = g.nodes[i].layer;
    }
    std::uint32_t max_slice = 0;
    for (auto s : slice) max_slice = std::max(max_slice, s);

    // ancestor adjacency
    std::vector<std::vector<std::uint32_t>> parents(g.nodes.size());
    for (auto& e : g.edges) parents[e.dst].push_back(e.src);

    std::vector<BranchialGraph> out(max_slice + 1);
    for (std::uint32_t i = 0; i < g.nodes.size(); ++i) out[slice[i]].nodes.push_back(i);

    for (std::uint32_t t = 0; t <= max_slice; ++t) {
        auto& bg = out[t];
        // ancestors within thickening+1 slices for each node in the slice
        std::vector<std::set<std::uint32_t>> anc(bg.nodes.size());
        for (std::size_t i = 0; i < bg.nodes.size(); ++i) {
            std::set<std::uint32_t> cur{bg.nodes[i]};
            for (std::uint32_t d = 0; d <= thickening; ++d) {
                std::set<std::uint32_t> next;
                for (auto n : cur)
                    for (auto p : parents[n]) next.insert(p);
                for (auto p : next) anc[i].insert(p);
                cur = std::move(next);
            }
        }
        std::set<std::pair<std::uint32_t, std::uint32_t>> es;
        for (std::size_t i = 0; i < bg.nodes.size(); ++i)
            for (std::size_t j = i + 1; j < bg.nodes.size(); ++j) {
                bool share = false;
                for (auto a : anc[i])
                    if (anc[j].count(a)) {
                        share = true;
                        break;
                    }
                if (share) es.insert({bg.nodes[i], bg.nodes[j]});
            }
        bg.edges.assign(es.begin(), es.end());
    }
    return out;
}

// Ball size at graph distance <= b from `source` inside one branchial slice.
inline std::uint64_t branchial_volume(const BranchialGraph& bg, std::uint32_t source,
                                      std::uint32_t b) {
    bool present = false;
    for (auto n : bg.nodes)
        if (n == source) present = true;
    if (!present) throw UnknownNode("branchial_volume: source not in slice");
    auto dist = bg.distances(source);
    std::uint64_t count = 0;
    for (auto& [v, d] : dist)
        if (d <= b) ++count;
    return count;
}

// ---- generational evolution --------------------------------------------------------

// All maximal sets of pairwise non-overlapping matches (intervals) on s.
inline std::vector<std::vector<StringMatch>> maximal_match_sets(const std::string& s,
                                                                const StringRuleSet& rules) {
    for (auto& r : rules)
        if (r.pattern.empty())
            throw SemanticError("generational evolution requires nonempty patterns");
    auto ms = string_matches(s, rules); // ordered by (offset, rule)
    std::vector<std::vector<StringMatch>> out;
    std::vector<StringMatch> cur;
    std::function<void(std::uint32_t)> rec = [&](std::uint32_t pos) {
        // candidates starting at >= pos; maximality requires the next chosen
        // match to start before the earliest end among available matches
        std::uint32_t min_end = std::numeric_limits<std::uint32_t>::max();
        bool any = false;
        for (auto& m : ms) {
            if (m.offset < pos) continue;
            any = true;
            min_end = std::min(min_end,
                               m.offset + static_cast<std::uint32_t>(rules[m.rule_index].pattern.size()));
        }
        if (!any) {
            out.push_back(cur);
            return;
        }
        for (auto& m : ms) {
            if (m.offset < pos || m.offset >= min_end) continue;
            cur.push_back(m);
            rec(m.offset + static_cast<std::uint32_t>(rules[m.rule_index].pattern.size()));
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

inline std::string apply_match_set(const std::string& s, const StringRuleSet& rules,
                                   const std::vector<StringMatch>& set) {
    std::string out;
    std::size_t i = 0;
    for (auto& m : set) {
        out += s.substr(i, m.offset - i);
        out += rules[m.rule_index].replacement;
        i = m.offset + rules[m.rule_index].pattern.size();
    }
    out += s.substr(i);
    return out;
}

// Generational multiway graph: each event applies one maximal set of
// non-overlapping updates; terminal states persist through later layers.
inline MultiwayGraph generational(const std::string& init, const StringRuleSet& rules,
                                  std::uint32_t max_gens,
                                  std::size_t node_cap = kDefaultMultiwayNodeCap) {
    MultiwayGraph g;
    g.mode = MultiwayMode::Evolution;
    g.layers.assign(1, {});
    g.nodes.push_back({init, 0});
    g.layers[0].push_back(0);
    std::set<std::tuple<std::uint32_t, std::uint32_t, std::string>> edge_set;

    std::vector<std::uint32_t> frontier{0};
    g.complete = true;
    for (std::uint32_t layer = 1; layer <= max_gens && !frontier.empty(); ++layer) {
        std::unordered_map<std::string, std::uint32_t> layer_index;
        std::vector<std::uint32_t> next_frontier;
        g.layers.push_back({});
        auto emit = [&](std::uint32_t src, const std::string& key, const std::string& desc) {
            std::uint32_t dst;
            auto it = layer_index.find(key);
            if (it != layer_index.end()) {
                dst = it->second;
            } else {
                dst = static_cast<std::uint32_t>(g.nodes.size());
                g.nodes.push_back({key, layer});
                layer_index[key] = dst;
                g.layers[layer].push_back(dst);
                next_frontier.push_back(dst);
                if (g.nodes.size() > node_cap)
                    throw ResourceLimit("generational: node cap exceeded");
            }
            if (edge_set.insert({src, dst, desc}).second) g.edges.push_back({src, dst, desc});
        };
        for (auto src : frontier) {
            const std::string cur = g.nodes[src].key; // copy: emit() may reallocate nodes
            auto sets = maximal_match_sets(cur, rules);
            if (sets.size() == 1 && sets[0].empty()) {
                // terminal: persist unchanged
                emit(src, cur, "persist");
                continue;
            }
            for (auto& set : sets) {
                std::string desc;
                for (auto& m : set)
                    desc += std::to_string(m.rule_index) + "@" + std::to_string(m.offset) + ";";
                emit(src, apply_match_set(cur, rules, set), desc);
            }
        }
        if (!next_frontier.empty() && layer == max_gens) g.complete = false;
        frontier = std::move(next_frontier);
    }
    return g;
}

// ---- unmerged expansion with lineage (for causal analysis) --------------------------

struct MultiwayTree {
    struct TNode {
        std::string key;
        std::uint32_t layer = 0;
        int parent = -1;       // tree node
        int parent_event = -1; // index into events
        bool expanded = false;
        bool terminal = false;
    };
    struct TEvent {
        std::uint32_t src = 0, dst = 0; // tree nodes
        std::vector<GlobalId> consumed, produced;
        std::string desc;
        std::uint32_t layer = 0;
    };
    std::vector<TNode> nodes;
    std::vector<TEvent> events;
    std::unordered_map<GlobalId, int> creator; // token -> event index

    std::vector<std::vector<int>> maximal_event_paths() const {
        std::vector<std::vector<int>> out;
        std::function<void(std::uint32_t, std::vector<int>&)> rec = [&](std::uint32_t n,
                                                                        std::vector<int>& path) {
            bool leaf = true;
            for (std::size_t e = 0; e < events.size(); ++e) {
                if (events[e].src != n) continue;
                leaf = false;
                path.push_back(static_cast<int>(e));
                rec(events[e].dst, path);
                path.pop_back();
            }
            if (leaf) out.push_back(path);
        };
        std::vector<int> path;
        rec(0, path);
        return out;
    }
};

template <class Sub>
MultiwayTree build_multiway_tree(const typename Sub::State& initial, GlobalId next_id,
                                 const typename Sub::Rules& rules, std::uint32_t max_layers,
                                 std::size_t node_cap = 200000) {
    MultiwayTree t;
    std::vector<typename Sub::State> states;
    states.push_back(initial);
    t.nodes.push_back({Sub::key(initial), 0, -1, -1, false, false});
    std::deque<std::uint32_t> queue{0};
    while (!queue.empty()) {
        std::uint32_t n = queue.front();
        queue.pop_front();
        if (t.nodes[n].layer >= max_layers) continue;
        auto succs = Sub::successors(states[n], rules, next_id);
        t.nodes[n].expanded = true;
        t.nodes[n].terminal = succs.empty();
        for (auto& s : succs) {
            std::uint32_t dst = static_cast<std::uint32_t>(t.nodes.size());
            if (dst > node_cap) throw ResourceLimit("build_multiway_tree: node cap exceeded");
            int ev = static_cast<int>(t.events.size());
            t.nodes.push_back(
                {Sub::key(s.state), t.nodes[n].layer + 1, static_cast<int>(n), ev, false, false});
            states.push_back(s.state);
            t.events.push_back({n, dst, s.consumed, s.produced, s.desc, t.nodes[n].layer + 1});
            for (auto id : s.produced) t.creator[id] = ev;
            queue.push_back(dst);
        }
        if (succs.empty()) t.nodes[n].terminal = true;
    }
    return t;
}

inline MultiwayTree build_string_multiway_tree(const std::string& init, const StringRuleSet& rules,
                                               std::uint32_t max_layers,
                                               std::size_t node_cap = 200000) {
    GlobalId next_id = 0;
    auto st = StringSubstrate::make(init, next_id);
    return build_multiway_tree<StringSubstrate>(st, next_id, rules, max_layers, node_cap);
}

inline MultiwayTree build_hypergraph_multiway_tree(const Hypergraph& init, const RuleSet& rules,
                                                   std::uint32_t max_layers,
                                                   std::size_t node_cap = 200000) {
    GlobalId next_id = 0;
    auto st = HypergraphSubstrate::make(init, next_id);
    return build_multiway_tree<HypergraphSubstrate>(st, next_id, rules, max_layers, node_cap);
}

} // namespace hyperforge

#endif
