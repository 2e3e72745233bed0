#ifndef HYPERFORGE_INVARIANCE_HPP
#define HYPERFORGE_INVARIANCE_HPP

#include <hyperforge/multiway.hpp>

#include <deque>
#include <map>
#include <optional>

namespace hyperforge {

// ---- resolution ---------------------------------------------------------------

enum class ResolutionKind { Resolved, Unresolved, NeverResolvable };

struct Resolution {
    ResolutionKind kind = ResolutionKind::Unresolved;
    std::uint32_t depth = 0;           // layers from the branch-pair children
    std::string common;                // a common successor key (when resolved)
    std::vector<std::string> commons;  // all common keys at the resolution layer
    std::uint64_t states_explored = 0;
};

// Joint breadth-first search from both members of a branch pair, merging by
// canonical key; resolved at the first layer where the reachable sets meet.
template <class Expand>
Resolution resolve_pair_generic(const std::string& key_a, const std::string& key_b,
                                Expand&& expand, std::uint32_t max_steps,
                                std::size_t node_cap) {
    Resolution res;
    if (key_a == key_b) {
        res.kind = ResolutionKind::Resolved;
        res.depth = 0;
        res.common = key_a;
        res.commons = {key_a};
        res.states_explored = 1;
        return res;
    }
    std::unordered_set<std::string> cum_a{key_a}, cum_b{key_b};
    std::vector<std::string> frontier_a{key_a}, frontier_b{key_b};
    for (std::uint32_t depth = 1; depth <= max_steps; ++depth) {
        std::vector<std::string> next_a, next_b;
        for (auto& k : frontier_a)
            for (auto& s : expand(k))
                if (cum_a.insert(s).second) next_a.push_back(s);
        for (auto& k : frontier_b)
            for (auto& s : expand(k))
                if (cum_b.insert(s).second) next_b.push_back(s);
        res.states_explored = cum_a.size() + cum_b.size();
        std::vector<std::string> commons;
        for (auto& k : cum_a)
            if (cum_b.count(k)) commons.push_back(k);
        if (!commons.empty()) {
            std::sort(commons.begin(), commons.end());
            res.kind = ResolutionKind::Resolved;
            res.depth = depth;
            res.common = commons.front();
            res.commons = commons;
            return res;
        }
        if (next_a.empty() && next_b.empty()) {
            // both reachable sets exhausted and disjoint
            res.kind = ResolutionKind::NeverResolvable;
            res.depth = depth;
            return res;
        }
        if (cum_a.size() + cum_b.size() > node_cap) {
            res.kind = ResolutionKind::Unresolved;
            res.depth = depth;
            return res;
        }
        frontier_a = std::move(next_a);
        frontier_b = std::move(next_b);
    }
    res.kind = ResolutionKind::Unresolved;
    res.depth = max_steps;
    return res;
}

// ---- branch pairs --------------------------------------------------------------

struct BranchPair {
    std::string parent;  // unification host (display form)
    std::string child_a; // canonical keys
    std::string child_b;
    bool identical_span = false; // same rewrite site, different rules
    Resolution resolution;
};

// ---- strings: core pairs, CI, completion ----------------------------------------

inline constexpr std::uint32_t kDefaultResolveSteps = 12;
inline constexpr std::size_t kDefaultResolveNodeCap = 100000;

namespace detail {

inline std::function<std::vector<std::string>(const std::string&)> string_expander(
    const StringRuleSet& rules) {
    return [&rules](const std::string& s) { return successors_all(s, rules); };
}

} // namespace detail

// Core branch pairs: the minimal unifications of rule left-hand sides
// (proper overlaps, interior insertion points of empty patterns, identical
// rewrite sites) each host contributing every pair of overlapping events it
// admits — this keeps the padded variants of shared-site ambiguities, which
// completion needs. Pairs with equal children are dropped; deduped by
// (host, child pair).
inline std::vector<BranchPair> core_branch_pairs(const StringRuleSet& rules) {
    std::set<std::string> hosts;

    for (std::uint32_t i = 0; i < rules.size(); ++i) {
        for (std::uint32_t j = i; j < rules.size(); ++j) {
            const std::string& u = rules[i].pattern;
            const std::string& v = rules[j].pattern;
            if (!u.empty() && !v.empty()) {
                for (int o = -static_cast<int>(v.size()) + 1; o < static_cast<int>(u.size());
                     ++o) {
                    if (i == j && o == 0) continue;
                    bool ok = true, any = false;
                    for (std::size_t p = 0; p < v.size(); ++p) {
                        int pos = o + static_cast<int>(p);
                        if (pos < 0 || pos >= static_cast<int>(u.size())) continue;
                        any = true;
                        if (u[static_cast<std::size_t>(pos)] != v[p]) {
                            ok = false;
                            break;
                        }
                    }
                    if (!ok || !any) continue;
                    int lo = std::min(0, o);
                    int hi = std::max(static_cast<int>(u.size()),
                                      o + static_cast<int>(v.size()));
                    std::string host(static_cast<std::size_t>(hi - lo), '?');
                    for (std::size_t p = 0; p < u.size(); ++p) host[p - lo] = u[p];
                    for (std::size_t p = 0; p < v.size(); ++p)
                        host[static_cast<std::size_t>(o + static_cast<int>(p) - lo)] = v[p];
                    hosts.insert(host);
                }
                if (i != j && u == v) hosts.insert(u); // identical rewrite site
            } else if (u.empty() && v.empty()) {
                if (i != j) hosts.insert("");
            } else if ((u.empty() ? v : u).size() > 1) {
                hosts.insert(u.empty() ? v : u); // interior insertion points
            }
        }
    }

    std::vector<BranchPair> out;
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    for (const auto& host : hosts) {
        auto events = string_matches(host, rules);
        for (std::size_t a = 0; a < events.size(); ++a) {
            for (std::size_t b = a + 1; b < events.size(); ++b) {
                std::uint32_t s1 = events[a].offset;
                std::uint32_t e1 = s1 + static_cast<std::uint32_t>(
                                            rules[events[a].rule_index].pattern.size());
                std::uint32_t s2 = events[b].offset;
                std::uint32_t e2 = s2 + static_cast<std::uint32_t>(
                                            rules[events[b].rule_index].pattern.size());
                bool both_empty_same_gap = (s1 == e1 && s2 == e2 && s1 == s2 &&
                                            events[a].rule_index != events[b].rule_index);
                bool overlap = (s1 < e2 && s2 < e1) || both_empty_same_gap;
                if (!overlap) continue;
                std::string ca = apply_match(host, rules, events[a]);
                std::string cb = apply_match(host, rules, events[b]);
                if (ca == cb) continue;
                if (cb < ca) std::swap(ca, cb);
                if (!seen.insert({host, ca, cb}).second) continue;
                BranchPair bp;
                bp.parent = host;
                bp.child_a = ca;
                bp.child_b = cb;
                // minimal shared-site ambiguity: both events rewrite the whole
                // host at the same span
                bp.identical_span =
                    (s1 == s2 && e1 == e2 && s1 == 0 && e1 == host.size());
                out.push_back(bp);
            }
        }
    }
    return out;
}

inline Resolution resolve(const BranchPair& pair, const StringRuleSet& rules,
                          std::uint32_t max_steps = kDefaultResolveSteps,
                          std::size_t node_cap = kDefaultResolveNodeCap) {
    auto expand = detail::string_expander(rules);
    return resolve_pair_generic(pair.child_a, pair.child_b, expand, max_steps, node_cap);
}

struct CIVerdict {
    enum class Kind { TotallyCausalInvariant, NotCausalInvariant, Unknown };
    Kind kind = Kind::Unknown;
    std::uint32_t max_resolution_depth = 0;
    std::optional<BranchPair> witness; // for NotCausalInvariant
    std::vector<BranchPair> pairs;     // all core pairs with resolutions

    bool is_ci() const { return kind == Kind::TotallyCausalInvariant; }
};

inline CIVerdict total_ci(const StringRuleSet& rules,
                          std::uint32_t max_steps = kDefaultResolveSteps,
                          std::size_t node_cap = kDefaultResolveNodeCap) {
    CIVerdict v;
    v.pairs = core_branch_pairs(rules);
    bool unknown = false;
    v.kind = CIVerdict::Kind::TotallyCausalInvariant;
    for (auto& p : v.pairs) {
        p.resolution = resolve(p, rules, max_steps, node_cap);
        switch (p.resolution.kind) {
        case ResolutionKind::Resolved:
            v.max_resolution_depth = std::max(v.max_resolution_depth, p.resolution.depth);
            break;
        case ResolutionKind::NeverResolvable:
            v.kind = CIVerdict::Kind::NotCausalInvariant;
            if (!v.witness) v.witness = p;
            break;
        case ResolutionKind::Unresolved:
            unknown = true;
            break;
        }
    }
    if (v.kind == CIVerdict::Kind::TotallyCausalInvariant && unknown)
        v.kind = CIVerdict::Kind::Unknown;
    return v;
}

// ---- hypergraphs: unifications and core pairs -------------------------------------

struct HypergraphBranchPair {
    Hypergraph parent;
    CanonicalKey child_a, child_b;
    bool identical_span = false;
    Resolution resolution;
};

namespace detail {

struct UnificationConfig {
    Hypergraph host;
    // matches: instance indices per lhs slot plus bindings
    std::vector<std::uint32_t> inputs_a, inputs_b;
    std::vector<ElementId> binding_a, binding_b;
    std::uint32_t rule_a = 0, rule_b = 0;
    bool identical_span = false;
};

// Child state produced by applying `rule` at the given match inside `host`.
inline Hypergraph apply_inside(const Hypergraph& host, const Rule& rule,
                               const std::vector<std::uint32_t>& inputs,
                               const std::vector<ElementId>& binding) {
    Hypergraph out;
    std::set<std::uint32_t> used(inputs.begin(), inputs.end());
    ElementId next = 0;
    for (auto& r : host.relations)
        for (auto e : r) next = std::max(next, e + 1);
    for (std::uint32_t i = 0; i < host.relations.size(); ++i)
        if (!used.count(i)) out.relations.push_back(host.relations[i]);
    auto lhs_vars = rule.lhs_variables();
    std::unordered_map<Variable, ElementId> fresh;
    for (auto& rel : rule.rhs) {
        Relation r(rel.size());
        for (std::size_t p = 0; p < rel.size(); ++p) {
            Variable v = rel[p];
            if (std::binary_search(lhs_vars.begin(), lhs_vars.end(), v)) {
                r[p] = binding[v];
            } else {
                auto it = fresh.find(v);
                if (it == fresh.end()) it = fresh.emplace(v, next++).first;
                r[p] = it->second;
            }
        }
        out.relations.push_back(r);
    }
    return out;
}

// Canonical form of (host, unordered match pair) used to dedupe unification
// configurations up to isomorphism.
inline std::string config_key(const UnificationConfig& c, const Rule& ra, const Rule& rb) {
    auto host_key = canonical_key(c.host);
    auto labelings = canonical_labelings(c.host);
    auto desc = [&](const std::vector<std::uint32_t>& inputs,
                    const std::vector<ElementId>& binding, std::uint32_t rule,
                    const Rule& r, const std::unordered_map<ElementId, std::uint32_t>& lab) {
        std::string d = std::to_string(rule) + ":";
        std::vector<std::vector<std::uint32_t>> tuples;
        for (auto i : inputs) {
            std::vector<std::uint32_t> t;
            for (auto e : c.host.relations[i]) t.push_back(lab.at(e));
            tuples.push_back(std::move(t));
        }
        std::sort(tuples.begin(), tuples.end());
        for (auto& t : tuples) {
            d += "(";
            for (auto v : t) d += std::to_string(v) + ",";
            d += ")";
        }
        d += "b";
        for (auto v : r.lhs_variables()) d += std::to_string(lab.at(binding[v])) + ",";
        return d;
    };
    std::string best;
    for (auto& lab : labelings) {
        std::string da = desc(c.inputs_a, c.binding_a, c.rule_a, ra, lab);
        std::string db = desc(c.inputs_b, c.binding_b, c.rule_b, rb, lab);
        if (db < da) std::swap(da, db);
        std::string k = da + "||" + db;
        if (best.empty() || k < best) best = k;
    }
    return host_key.str() + "##" + best;
}

// All normalized partitions of {0..n-1} as assignment vectors.
inline void partitions(std::size_t n, std::vector<std::vector<std::uint32_t>>& out) {
    std::vector<std::uint32_t> a(n, 0);
    std::function<void(std::size_t, std::uint32_t)> rec = [&](std::size_t i, std::uint32_t m) {
        if (i == n) {
            out.push_back(a);
            return;
        }
        for (std::uint32_t v = 0; v <= m; ++v) {
            a[i] = v;
            rec(i + 1, std::max(m, v + 1));
        }
    };
    rec(0, 0);
}

} // namespace detail

// Core branch pairs of a hypergraph rule set: every isomorphism class of a
// minimal two-match overlap (shared instances given by a slot matching, plus
// every further identification of elements), keeping pairs whose children are
// canonically distinct.
inline std::vector<HypergraphBranchPair> core_branch_pairs(
    const RuleSet& rules, std::size_t class_bound = 9,
    std::vector<std::string>* config_keys_out = nullptr) {
    std::vector<HypergraphBranchPair> out;
    std::set<std::string> seen_configs;

    for (std::uint32_t ri = 0; ri < rules.size(); ++ri) {
        for (std::uint32_t rj = ri; rj < rules.size(); ++rj) {
            const Rule& ra = rules[ri];
            const Rule& rb = rules[rj];
            std::size_t na = ra.lhs.size(), nb = rb.lhs.size();
            // disjoint variable copies: a-vars as-is, b-vars offset
            Variable offset = 0;
            for (auto v : ra.all_variables()) offset = std::max(offset, v);
            // enumerate injective partial matchings between slots
            std::vector<std::vector<int>> matchings; // per a-slot: b-slot or -1
            std::vector<int> cur(na, -1);
            std::function<void(std::size_t, std::uint32_t)> enumerate =
                [&](std::size_t slot, std::uint32_t used_mask) {
                    if (slot == na) {
                        bool nonempty = false;
                        for (auto x : cur)
                            if (x >= 0) nonempty = true;
                        if (nonempty) matchings.push_back(cur);
                        return;
                    }
                    cur[slot] = -1;
                    enumerate(slot + 1, used_mask);
                    for (std::size_t b = 0; b < nb; ++b) {
                        if (used_mask & (1u << b)) continue;
                        if (ra.lhs[slot].size() != rb.lhs[b].size()) continue;
                        cur[slot] = static_cast<int>(b);
                        enumerate(slot + 1, used_mask | (1u << b));
                    }
                    cur[slot] = -1;
                };
            enumerate(0, 0);

            for (auto& matching : matchings) {
                // union-find over variables of both copies
                std::size_t nv = offset + 1;
                for (auto v : rb.all_variables()) nv = std::max<std::size_t>(nv, offset + v + 1);
                std::vector<std::uint32_t> parent(nv + 1);
                std::iota(parent.begin(), parent.end(), 0u);
                std::function<std::uint32_t(std::uint32_t)> find = [&](std::uint32_t x) {
                    while (parent[x] != x) {
                        parent[x] = parent[parent[x]];
                        x = parent[x];
                    }
                    return x;
                };
                auto unite = [&](std::uint32_t a, std::uint32_t b) { parent[find(a)] = find(b); };
                for (std::size_t s = 0; s < na; ++s) {
                    if (matching[s] < 0) continue;
                    const Relation& pa = ra.lhs[s];
                    const Relation& pb = rb.lhs[static_cast<std::size_t>(matching[s])];
                    for (std::size_t p = 0; p < pa.size(); ++p) unite(pa[p], offset + pb[p]);
                }
                // classes over lhs variables only
                std::vector<std::uint32_t> class_of(nv + 1, 0);
                std::map<std::uint32_t, std::uint32_t> class_ids;
                auto lhs_vars_a = ra.lhs_variables();
                auto lhs_vars_b = rb.lhs_variables();
                std::vector<std::uint32_t> all_lhs;
                for (auto v : lhs_vars_a) all_lhs.push_back(v);
                for (auto v : lhs_vars_b) all_lhs.push_back(offset + v);
                for (auto v : all_lhs) {
                    auto root = find(v);
                    if (!class_ids.count(root))
                        class_ids[root] = static_cast<std::uint32_t>(class_ids.size());
                    class_of[v] = class_ids[root];
                }
                std::size_t nclasses = class_ids.size();
                if (nclasses > class_bound)
                    throw ResourceLimit("core_branch_pairs: too many element classes");

                std::vector<std::vector<std::uint32_t>> parts;
                detail::partitions(nclasses, parts);
                for (auto& part : parts) {
                    // build the host
                    detail::UnificationConfig cfg;
                    cfg.rule_a = ri;
                    cfg.rule_b = rj;
                    auto element_of_class = [&](std::uint32_t cls) { return part[cls]; };
                    // a-side instances
                    std::vector<int> slot_instance_a(na, -1), slot_instance_b(nb, -1);
                    auto add_relation = [&](const Relation& pat, bool from_a) {
                        Relation r(pat.size());
                        for (std::size_t p = 0; p < pat.size(); ++p) {
                            Variable v = from_a ? pat[p] : offset + pat[p];
                            r[p] = element_of_class(class_of[v]);
                        }
                        cfg.host.relations.push_back(r);
                        return static_cast<int>(cfg.host.relations.size() - 1);
                    };
                    for (std::size_t s = 0; s < na; ++s)
                        slot_instance_a[s] = add_relation(ra.lhs[s], true);
                    for (std::size_t b = 0; b < nb; ++b) {
                        // shared instance for matched slots
                        int shared = -1;
                        for (std::size_t s = 0; s < na; ++s)
                            if (matching[s] == static_cast<int>(b)) shared = slot_instance_a[s];
                        slot_instance_b[b] =
                            shared >= 0 ? shared : add_relation(rb.lhs[b], false);
                    }
                    // bindings
                    std::size_t maxv_a = 0, maxv_b = 0;
                    for (auto v : ra.all_variables()) maxv_a = std::max<std::size_t>(maxv_a, v);
                    for (auto v : rb.all_variables()) maxv_b = std::max<std::size_t>(maxv_b, v);
                    cfg.binding_a.assign(maxv_a + 1, 0);
                    cfg.binding_b.assign(maxv_b + 1, 0);
                    for (auto v : lhs_vars_a) cfg.binding_a[v] = element_of_class(class_of[v]);
                    for (auto v : lhs_vars_b)
                        cfg.binding_b[v] = element_of_class(class_of[offset + v]);
                    for (auto s : slot_instance_a)
                        cfg.inputs_a.push_back(static_cast<std::uint32_t>(s));
                    for (auto b : slot_instance_b)
                        cfg.inputs_b.push_back(static_cast<std::uint32_t>(b));

                    // identical events never branch
                    bool same_event = (cfg.rule_a == cfg.rule_b) && (cfg.inputs_a == cfg.inputs_b) &&
                                      (cfg.binding_a == cfg.binding_b);
                    if (same_event) continue;
                    cfg.identical_span =
                        (cfg.inputs_a == cfg.inputs_b) && (cfg.binding_a == cfg.binding_b);

                    auto key = detail::config_key(cfg, ra, rb);
                    if (!seen_configs.insert(key).second) continue;

                    Hypergraph child_a = detail::apply_inside(cfg.host, ra, cfg.inputs_a,
                                                              cfg.binding_a);
                    Hypergraph child_b = detail::apply_inside(cfg.host, rb, cfg.inputs_b,
                                                              cfg.binding_b);
                    auto ka = canonical_key(child_a), kb = canonical_key(child_b);
                    if (ka == kb) continue;
                    if (config_keys_out) config_keys_out->push_back(key);
                    HypergraphBranchPair bp;
                    bp.parent = cfg.host;
                    bp.child_a = ka < kb ? ka : kb;
                    bp.child_b = ka < kb ? kb : ka;
                    bp.identical_span = cfg.identical_span;
                    out.push_back(std::move(bp));
                }
            }
        }
    }
    return out;
}

namespace detail {

inline std::function<std::vector<std::string>(const std::string&)> hypergraph_expander(
    const RuleSet& rules, std::unordered_map<std::string, Hypergraph>& reps) {
    return [&rules, &reps](const std::string& key) {
        std::vector<std::string> out;
        auto it = reps.find(key);
        if (it == reps.end()) return out;
        GlobalId next_id = 0;
        auto st = HypergraphSubstrate::make(it->second, next_id);
        for (auto& succ : HypergraphSubstrate::successors(st, rules, next_id)) {
            Hypergraph h = succ.state.graph();
            std::string k = canonical_key(h).str();
            if (!reps.count(k)) reps[k] = h;
            out.push_back(k);
        }
        return out;
    };
}

} // namespace detail

inline Resolution resolve(const HypergraphBranchPair& pair, const RuleSet& rules,
                          std::uint32_t max_steps = kDefaultResolveSteps,
                          std::size_t node_cap = kDefaultResolveNodeCap) {
    std::unordered_map<std::string, Hypergraph> reps;
    reps[pair.child_a.str()] = pair.child_a.to_hypergraph();
    reps[pair.child_b.str()] = pair.child_b.to_hypergraph();
    auto expand = detail::hypergraph_expander(rules, reps);
    return resolve_pair_generic(pair.child_a.str(), pair.child_b.str(), expand, max_steps,
                                node_cap);
}

struct HypergraphCIVerdict {
    CIVerdict::Kind kind = CIVerdict::Kind::Unknown;
    std::uint32_t max_resolution_depth = 0;
    std::vector<HypergraphBranchPair> pairs;
    bool is_ci() const { return kind == CIVerdict::Kind::TotallyCausalInvariant; }
};

inline HypergraphCIVerdict total_ci(const RuleSet& rules,
                                    std::uint32_t max_steps = kDefaultResolveSteps,
                                    std::size_t node_cap = kDefaultResolveNodeCap) {
    HypergraphCIVerdict v;
    v.pairs = core_branch_pairs(rules);
    bool unknown = false;
    v.kind = CIVerdict::Kind::TotallyCausalInvariant;
    for (auto& p : v.pairs) {
        p.resolution = resolve(p, rules, max_steps, node_cap);
        switch (p.resolution.kind) {
        case ResolutionKind::Resolved:
            v.max_resolution_depth = std::max(v.max_resolution_depth, p.resolution.depth);
            break;
        case ResolutionKind::NeverResolvable:
            v.kind = CIVerdict::Kind::NotCausalInvariant;
            break;
        case ResolutionKind::Unresolved:
            unknown = true;
            break;
        }
    }
    if (v.kind == CIVerdict::Kind::TotallyCausalInvariant && unknown)
        v.kind = CIVerdict::Kind::Unknown;
    return v;
}

// ---- census --------------------------------------------------------------------

struct CICensus {
    std::size_t total = 0;
    std::size_t causal_invariant = 0;
    std::size_t not_invariant = 0;
    std::size_t unknown = 0;
    std::map<std::uint32_t, std::size_t> depth_histogram; // resolution depth -> rules
};

inline CICensus ci_census(const std::vector<StringRuleSet>& family,
                          std::uint32_t max_steps = kDefaultResolveSteps,
                          std::size_t node_cap = kDefaultResolveNodeCap) {
    CICensus c;
    c.total = family.size();
    for (auto& rules : family) {
        auto v = total_ci(rules, max_steps, node_cap);
        if (v.kind == CIVerdict::Kind::TotallyCausalInvariant) {
            ++c.causal_invariant;
            c.depth_histogram[v.max_resolution_depth]++;
        } else if (v.kind == CIVerdict::Kind::NotCausalInvariant) {
            ++c.not_invariant;
        } else {
            ++c.unknown;
        }
    }
    return c;
}

// ---- completion ------------------------------------------------------------------

struct CompletionResult {
    StringRuleSet rules;     // original + additions
    StringRuleSet additions;
    CIVerdict verdict;       // verdict for the completed system
};

namespace detail {

inline bool shortlex_less(const std::string& a, const std::string& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

// true when no two (not necessarily distinct) lhs patterns admit a proper
// overlap or interior insertion; identical-span ambiguity is then the only
// possible source of branch pairs
inline bool proper_overlaps_possible(const StringRuleSet& rules) {
    for (std::size_t i = 0; i < rules.size(); ++i)
        for (std::size_t j = i; j < rules.size(); ++j) {
            const auto& u = rules[i].pattern;
            const auto& v = rules[j].pattern;
            if (u.empty() && v.empty()) continue;
            if (u.empty() || v.empty()) {
                if ((u.empty() ? v : u).size() > 1) return true;
                continue;
            }
            for (int o = -static_cast<int>(v.size()) + 1; o < static_cast<int>(u.size()); ++o) {
                if (o == 0 && u == v) continue;
                bool ok = true, any = false;
                for (std::size_t p = 0; p < v.size(); ++p) {
                    int pos = o + static_cast<int>(p);
                    if (pos < 0 || pos >= static_cast<int>(u.size())) continue;
                    any = true;
                    if (u[static_cast<std::size_t>(pos)] != v[p]) ok = false;
                }
                if (ok && any) return true;
            }
        }
    return false;
}

} // namespace detail

// Knuth-Bendix-style completion: add one-directional bridging rules until
// every branch pair of the original system resolves under the extended rules,
// or the budget runs out. The worklist is the original rules' core pairs;
// identical-site ambiguities join it only when no proper overlap exists at
// all. Bridges run from a stuck (terminal) member toward the live one; with
// both terminal, from the canonically larger string to the smaller.
inline CompletionResult complete(const StringRuleSet& rules, std::size_t max_added = 8,
                                 std::uint32_t max_steps = kDefaultResolveSteps,
                                 std::size_t node_cap = kDefaultResolveNodeCap) {
    CompletionResult res;
    res.rules = rules;
    auto worklist = core_branch_pairs(rules);
    bool proper_exists = detail::proper_overlaps_possible(rules);
    while (true) {
        std::vector<BranchPair> unresolved;
        for (auto& p : worklist) {
            if (p.identical_span && proper_exists) continue;
            p.resolution = resolve(p, res.rules, max_steps, node_cap);
            if (p.resolution.kind != ResolutionKind::Resolved) unresolved.push_back(p);
        }
        if (unresolved.empty()) break;
        if (res.additions.size() >= max_added)
            throw BudgetExhausted("complete: addition budget exhausted");
        std::sort(unresolved.begin(), unresolved.end(), [](const BranchPair& a,
                                                           const BranchPair& b) {
            auto ka = std::minmax(a.child_a, a.child_b, detail::shortlex_less);
            auto kb = std::minmax(b.child_a, b.child_b, detail::shortlex_less);
            if (ka.first != kb.first) return detail::shortlex_less(ka.first, kb.first);
            return detail::shortlex_less(ka.second, kb.second);
        });
        const auto& pick = unresolved.front();
        bool term_a = string_matches(pick.child_a, res.rules).empty();
        bool term_b = string_matches(pick.child_b, res.rules).empty();
        StringRule bridge;
        if (term_a && !term_b) {
            bridge = {pick.child_a, pick.child_b};
        } else if (term_b && !term_a) {
            bridge = {pick.child_b, pick.child_a};
        } else {
            // canonically larger -> smaller
            if (detail::shortlex_less(pick.child_a, pick.child_b))
                bridge = {pick.child_b, pick.child_a};
            else
                bridge = {pick.child_a, pick.child_b};
        }
        res.additions.push_back(bridge);
        res.rules.push_back(bridge);
    }
    res.verdict = total_ci(res.rules, max_steps, node_cap);
    return res;
}

// ---- effective causal invariance -----------------------------------------------

struct EffectiveCIProfile {
    std::vector<std::uint64_t> resolved_cumulative; // per layer
    std::vector<std::uint64_t> new_unresolved;      // per layer
};

// Branch pairs arising in the states graph grown from `init`, classified per
// layer by whether a common successor already exists within the graph.
inline EffectiveCIProfile effective_ci_profile(const StringRuleSet& rules,
                                               const std::string& init, std::uint32_t layers,
                                               std::size_t node_cap = 200000) {
    auto g = build_string_multiway({init}, rules, MultiwayMode::States, layers, node_cap);
    // descendant closure per node (bounded by graph size)
    std::size_t n = g.nodes.size();
    std::vector<std::set<std::uint32_t>> desc(n);
    // iterate to closure over layer-increasing edges (acyclic restriction)
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return g.nodes[a].layer > g.nodes[b].layer;
    });
    std::vector<std::vector<std::uint32_t>> out_edges(n);
    for (auto& e : g.edges)
        if (g.nodes[e.dst].layer > g.nodes[e.src].layer) out_edges[e.src].push_back(e.dst);
    for (auto v : order) {
        desc[v].insert(v);
        for (auto w : out_edges[v])
            desc[v].insert(desc[w].begin(), desc[w].end());
    }

    // branch pairs: distinct successors of one node via distinct events
    EffectiveCIProfile prof;
    prof.resolved_cumulative.assign(layers + 1, 0);
    prof.new_unresolved.assign(layers + 1, 0);
    std::uint64_t resolved_so_far = 0;
    std::vector<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> pairs;
    for (std::uint32_t v = 0; v < n; ++v) {
        auto& outs = out_edges[v];
        for (std::size_t i = 0; i < outs.size(); ++i)
            for (std::size_t j = i + 1; j < outs.size(); ++j)
                if (outs[i] != outs[j])
                    pairs.push_back({std::max(g.nodes[outs[i]].layer, g.nodes[outs[j]].layer),
                                     outs[i], outs[j]});
    }
    for (std::uint32_t t = 1; t <= layers; ++t) {
        std::uint64_t resolved = 0, fresh_unresolved = 0;
        for (auto& [layer, a, b] : pairs) {
            if (layer > t) continue;
            bool common = false;
            for (auto d : desc[a])
                if (desc[b].count(d)) {
                    common = true;
                    break;
                }
            if (common)
                ++resolved;
            else if (layer == t)
                ++fresh_unresolved;
        }
        resolved_so_far = resolved;
        prof.resolved_cumulative[t] = resolved_so_far;
        prof.new_unresolved[t] = fresh_unresolved;
    }
    return prof;
}

} // namespace hyperforge

#endif
