#ifndef HYPERFORGE_ENGINE_HPP
#define HYPERFORGE_ENGINE_HPP

#include <hyperforge/rules.hpp>

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <unordered_set>

namespace hyperforge {

using InstanceId = std::uint32_t;

enum class PolicyKind { Standard, Random, ExhaustStep };

struct UpdatePolicy {
    PolicyKind kind = PolicyKind::Standard;
    std::uint64_t seed = 0;

    static UpdatePolicy standard() { return {PolicyKind::Standard, 0}; }
    static UpdatePolicy random(std::uint64_t seed) { return {PolicyKind::Random, seed}; }
    // Generational stepping; for a single trace this coincides with the
    // standard maximal non-overlapping scan.
    static UpdatePolicy exhaust() { return {PolicyKind::ExhaustStep, 0}; }
};

struct Match {
    std::uint32_t rule_index = 0;
    std::vector<InstanceId> inputs;   // one consumed instance per lhs slot
    std::vector<ElementId> binding;   // 1-based variable -> element (index 0 unused)
};

struct Event {
    Match match;
    std::vector<InstanceId> produced;
    std::uint32_t step = 0;
    std::vector<ElementId> fresh_elements;
};

struct InstanceInfo {
    Relation rel;
    int creator = -1;  // event index, -1 for initial relations
    int consumer = -1; // event index, -1 while alive
    std::uint32_t created_step = 0;
};

struct Trace {
    Hypergraph initial;
    RuleSet rules;
    std::vector<Event> events;
    std::vector<InstanceInfo> instances; // indexed by InstanceId
    std::uint32_t steps_run = 0;
    std::optional<std::uint32_t> fixed_point_step;

    std::vector<InstanceId> alive_at(std::uint32_t step) const {
        std::vector<InstanceId> out;
        for (InstanceId i = 0; i < instances.size(); ++i) {
            const auto& info = instances[i];
            if (info.created_step > step) continue;
            if (info.consumer >= 0 && events[info.consumer].step <= step) continue;
            out.push_back(i);
        }
        return out;
    }
    Hypergraph state_at(std::uint32_t step) const {
        Hypergraph h;
        for (auto id : alive_at(step)) h.relations.push_back(instances[id].rel);
        return h;
    }
    Hypergraph final_state() const { return state_at(steps_run); }
};

// Mutable evolution state: alive instances plus fresh-id counters.
struct EngineState {
    std::vector<InstanceId> alive;
    std::unordered_map<InstanceId, std::size_t> alive_pos;
    std::vector<InstanceInfo>* instances = nullptr;
    ElementId next_element = 0;

    void push_alive(InstanceId id) {
        alive_pos[id] = alive.size();
        alive.push_back(id);
    }
    void remove_alive(InstanceId id) {
        auto it = alive_pos.find(id);
        std::size_t pos = it->second;
        InstanceId moved = alive.back();
        alive[pos] = moved;
        alive_pos[moved] = pos;
        alive.pop_back();
        alive_pos.erase(it);
    }

    Hypergraph to_hypergraph() const {
        Hypergraph h;
        for (auto id : alive) h.relations.push_back((*instances)[id].rel);
        return h;
    }
};

namespace detail {

// Slot visit order for one rule: start at slot 0, then always prefer a slot
// sharing a variable with those already matched (left-connected lhs walks
// its pattern; disconnected lhs falls back to a full scan per component).
inline std::vector<std::size_t> slot_order(const Rule& rule) {
    std::size_t n = rule.lhs.size();
    std::vector<std::size_t> order;
    std::vector<bool> taken(n, false);
    std::unordered_set<Variable> bound;
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t pick = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) continue;
            bool anchored = false;
            for (auto v : rule.lhs[i])
                if (bound.count(v)) anchored = true;
            if (anchored) {
                pick = i;
                break;
            }
            if (pick == n) pick = i;
        }
        taken[pick] = true;
        order.push_back(pick);
        for (auto v : rule.lhs[pick]) bound.insert(v);
    }
    return order;
}

} // namespace detail

// Complete match set in deterministic order: sorted by (sorted consumed
// instance ids, rule index, binding image, slot-ordered inputs).
inline std::vector<Match> find_matches(const EngineState& state, const RuleSet& rules) {
    std::vector<Match> out;
    const auto& instances = *state.instances;

    // element -> alive instance ids containing it
    std::unordered_map<ElementId, std::vector<InstanceId>> by_element;
    for (auto id : state.alive)
        for (auto e : instances[id].rel) {
            auto& v = by_element[e];
            if (v.empty() || v.back() != id) v.push_back(id);
        }

    for (std::uint32_t ri = 0; ri < rules.size(); ++ri) {
        const Rule& rule = rules[ri];
        auto order = detail::slot_order(rule);
        std::size_t nvars = 0;
        for (auto& rel : rule.lhs)
            for (auto v : rel) nvars = std::max<std::size_t>(nvars, v);
        std::vector<ElementId> binding(nvars + 1, 0);
        std::vector<bool> bound(nvars + 1, false);
        std::vector<InstanceId> chosen(rule.lhs.size(), 0);
        std::unordered_set<InstanceId> used;

        std::function<void(std::size_t)> rec = [&](std::size_t depth) {
            if (depth == order.size()) {
                Match m;
                m.rule_index = ri;
                m.inputs.resize(rule.lhs.size());
                for (std::size_t i = 0; i < rule.lhs.size(); ++i) m.inputs[i] = chosen[i];
                m.binding = binding;
                out.push_back(std::move(m));
                return;
            }
            std::size_t slot = order[depth];
            const Relation& pat = rule.lhs[slot];

            // candidate instances: narrow through a bound variable if any
            const std::vector<InstanceId>* cand = nullptr;
            std::vector<InstanceId> fallback;
            for (std::size_t p = 0; p < pat.size(); ++p) {
                if (bound[pat[p]]) {
                    auto it = by_element.find(binding[pat[p]]);
                    if (it == by_element.end()) return;
                    cand = &it->second;
                    break;
                }
            }
            if (!cand) {
                fallback = state.alive;
                cand = &fallback;
            }
            for (auto id : *cand) {
                if (used.count(id)) continue;
                const Relation& rel = instances[id].rel;
                if (rel.size() != pat.size()) continue;
                // bind
                std::vector<Variable> newly;
                bool ok = true;
                for (std::size_t p = 0; p < pat.size() && ok; ++p) {
                    Variable v = pat[p];
                    if (bound[v]) {
                        if (binding[v] != rel[p]) ok = false;
                    } else {
                        binding[v] = rel[p];
                        bound[v] = true;
                        newly.push_back(v);
                    }
                }
                if (ok) {
                    // re-check positions bound within this same relation
                    for (std::size_t p = 0; p < pat.size() && ok; ++p)
                        if (binding[pat[p]] != rel[p]) ok = false;
                }
                if (ok) {
                    chosen[slot] = id;
                    used.insert(id);
                    rec(depth + 1);
                    used.erase(id);
                }
                for (auto v : newly) bound[v] = false;
            }
        };
        rec(0);
    }

    std::sort(out.begin(), out.end(), [](const Match& a, const Match& b) {
        auto ka = a.inputs, kb = b.inputs;
        std::sort(ka.begin(), ka.end());
        std::sort(kb.begin(), kb.end());
        if (ka != kb) return ka < kb;
        if (a.rule_index != b.rule_index) return a.rule_index < b.rule_index;
        if (a.binding != b.binding) return a.binding < b.binding;
        return a.inputs < b.inputs;
    });
    return out;
}

// Applies one event; allocates fresh elements (max id so far + 1, in rhs
// first-occurrence order) and fresh instance ids.
inline Event apply_match(EngineState& state, std::vector<InstanceInfo>& instances,
                         const RuleSet& rules, const Match& match, std::uint32_t step,
                         std::vector<Event>& events) {
    const Rule& rule = rules[match.rule_index];
    Event ev;
    ev.match = match;
    ev.step = step;
    int event_index = static_cast<int>(events.size());

    std::unordered_map<Variable, ElementId> fresh;
    auto resolve = [&](Variable v) -> ElementId {
        if (v < match.binding.size()) {
            // bound lhs variable? binding image 0 is also a valid element, so
            // track boundness through rule variable sets
            for (auto& rel : rule.lhs)
                for (auto x : rel)
                    if (x == v) return match.binding[v];
        }
        auto it = fresh.find(v);
        if (it != fresh.end()) return it->second;
        ElementId e = state.next_element++;
        fresh[v] = e;
        ev.fresh_elements.push_back(e);
        return e;
    };

    // consume (swap-erase; alive order is not semantic)
    for (auto id : match.inputs) {
        instances[id].consumer = event_index;
        state.remove_alive(id);
    }
    // produce
    for (auto& rel : rule.rhs) {
        Relation r(rel.size());
        for (std::size_t p = 0; p < rel.size(); ++p) r[p] = resolve(rel[p]);
        InstanceId id = static_cast<InstanceId>(instances.size());
        instances.push_back({r, event_index, -1, step});
        state.push_alive(id);
        ev.produced.push_back(id);
    }
    events.push_back(ev);
    return ev;
}

// One full step: accept matches greedily in (possibly shuffled) order,
// skipping any whose inputs were already consumed this step.
inline std::vector<Event> step(EngineState& state, std::vector<InstanceInfo>& instances,
                               const RuleSet& rules, const UpdatePolicy& policy,
                               std::uint32_t step_index, std::vector<Event>& events,
                               SplitMix64* rng = nullptr) {
    auto matches = find_matches(state, rules);
    if (policy.kind == PolicyKind::Random && rng) rng->shuffle(matches);
    std::vector<Event> applied;
    std::unordered_set<InstanceId> consumed;
    for (const auto& m : matches) {
        bool clash = false;
        for (auto id : m.inputs)
            if (consumed.count(id)) clash = true;
        if (clash) continue;
        for (auto id : m.inputs) consumed.insert(id);
        applied.push_back(apply_match(state, instances, rules, m, step_index, events));
    }
    return applied;
}

inline constexpr std::size_t kDefaultRelationCap = 1000000;

inline Trace evolve(const Hypergraph& init, const RuleSet& rules, const UpdatePolicy& policy,
                    std::uint32_t max_steps, std::size_t relation_cap = kDefaultRelationCap) {
    Trace tr;
    tr.initial = init;
    tr.rules = rules;
    EngineState st;
    st.instances = &tr.instances;
    for (const auto& r : init.relations) {
        InstanceId id = static_cast<InstanceId>(tr.instances.size());
        tr.instances.push_back({r, -1, -1, 0});
        st.push_alive(id);
        for (auto e : r) st.next_element = std::max(st.next_element, e + 1);
    }
    SplitMix64 rng(policy.seed);
    for (std::uint32_t s = 1; s <= max_steps; ++s) {
        auto applied = step(st, tr.instances, rules, policy, s, tr.events, &rng);
        if (applied.empty()) {
            tr.fixed_point_step = s - 1;
            break;
        }
        tr.steps_run = s;
        if (st.alive.size() > relation_cap)
            throw ResourceLimit("evolve: relation count exceeds cap");
    }
    return tr;
}

// ---- census and analysis ----------------------------------------------------

struct HaltingVerdict {
    bool halts = false;
    std::uint32_t halting_time = 0;
    bool connected_throughout = true;
};

inline HaltingVerdict halting_verdict(const Rule& rule, const Hypergraph& init,
                                      const UpdatePolicy& policy, std::uint32_t step_cap,
                                      std::size_t relation_cap = 200000) {
    HaltingVerdict v;
    Trace tr;
    try {
        tr = evolve(init, RuleSet{rule}, policy, step_cap, relation_cap);
    } catch (const ResourceLimit&) {
        v.halts = false;
        v.connected_throughout = true; // unknown; treated as growth
        return v;
    }
    if (tr.fixed_point_step) {
        v.halts = true;
        v.halting_time = *tr.fixed_point_step;
    }
    for (std::uint32_t s = 0; s <= tr.steps_run && v.connected_throughout; ++s)
        if (!is_connected(tr.state_at(s))) v.connected_throughout = false;
    return v;
}

inline std::vector<HaltingVerdict> halting_census(const RuleSet& rules, const Hypergraph& init,
                                                  const UpdatePolicy& policy,
                                                  std::uint32_t step_cap,
                                                  std::size_t relation_cap = 200000) {
    std::vector<HaltingVerdict> out;
    out.reserve(rules.size());
    for (const auto& r : rules)
        out.push_back(halting_verdict(r, init, policy, step_cap, relation_cap));
    return out;
}

// State transition graph over canonical states of one signature under the
// deterministic standard step. Successor states outside the seed set (e.g.
// disconnected results) are added as they appear.
struct TransitionGraph {
    std::vector<CanonicalKey> nodes;
    std::vector<std::size_t> successor; // node -> node
    std::size_t seed_count = 0;         // nodes from the initial enumeration

    // length of the cycle eventually reached from `start`
    std::size_t cycle_length_from(std::size_t start) const {
        std::unordered_map<std::size_t, std::size_t> seen;
        std::size_t cur = start, t = 0;
        while (!seen.count(cur)) {
            seen[cur] = t++;
            cur = successor[cur];
        }
        return t - seen[cur];
    }
    std::size_t transient_length_from(std::size_t start) const {
        std::unordered_map<std::size_t, std::size_t> seen;
        std::size_t cur = start, t = 0;
        while (!seen.count(cur)) {
            seen[cur] = t++;
            cur = successor[cur];
        }
        return seen[cur];
    }
    std::size_t max_cycle_length() const {
        std::size_t m = 0;
        for (std::size_t i = 0; i < successor.size(); ++i)
            m = std::max(m, cycle_length_from(i));
        return m;
    }
};

inline Hypergraph standard_step_once(const Hypergraph& h, const RuleSet& rules) {
    Trace tr = evolve(h, rules, UpdatePolicy::standard(), 1);
    return tr.final_state();
}

inline TransitionGraph transition_graph(const RuleSet& rules, const Signature& sig,
                                        bool connected_only = true,
                                        std::size_t slot_bound = 12) {
    if (sig.total_slots() > slot_bound) throw ResourceLimit("transition_graph: signature too large");
    TransitionGraph g;
    std::unordered_map<CanonicalKey, std::size_t, CanonicalKeyHash> index;
    for (auto& h : enumerate_hypergraphs(sig, connected_only)) {
        auto key = canonical_key(h);
        index[key] = g.nodes.size();
        g.nodes.push_back(key);
    }
    g.seed_count = g.nodes.size();
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        Hypergraph h = g.nodes[i].to_hypergraph();
        auto succ = canonical_key(standard_step_once(h, rules));
        auto it = index.find(succ);
        std::size_t j;
        if (it == index.end()) {
            j = g.nodes.size();
            index[succ] = j;
            g.nodes.push_back(succ);
        } else {
            j = it->second;
        }
        g.successor.resize(std::max(g.successor.size(), i + 1));
        g.successor[i] = j;
    }
    g.successor.resize(g.nodes.size());
    return g;
}

// ---- lineage pedigrees, perturbations, ages ---------------------------------

namespace detail {

struct Pedigrees {
    std::vector<std::uint64_t> instance;   // by instance id
    std::vector<std::uint64_t> print;      // pedigree + content fingerprint
};

inline Pedigrees pedigrees(const Trace& tr) {
    Pedigrees out;
    std::vector<std::uint64_t> event_hash(tr.events.size());
    std::unordered_map<ElementId, std::uint64_t> element_hash;
    out.instance.resize(tr.instances.size());
    out.print.resize(tr.instances.size());

    // initial instances/elements: identity by index
    for (InstanceId i = 0; i < tr.instances.size(); ++i) {
        if (tr.instances[i].creator == -1) {
            out.instance[i] = hash_combine(0x11, i);
            for (auto e : tr.instances[i].rel)
                if (!element_hash.count(e)) element_hash[e] = hash_combine(0x22, e);
        }
    }
    for (std::size_t ei = 0; ei < tr.events.size(); ++ei) {
        const Event& ev = tr.events[ei];
        std::vector<std::uint64_t> ins;
        for (auto id : ev.match.inputs) ins.push_back(out.instance[id]);
        std::sort(ins.begin(), ins.end());
        std::uint64_t h = hash_combine(0x33, ev.match.rule_index);
        for (auto x : ins) h = hash_combine(h, x);
        // binding image as element pedigrees
        for (auto e : ev.match.binding) {
            auto it = element_hash.find(e);
            h = hash_combine(h, it == element_hash.end() ? 0 : it->second);
        }
        event_hash[ei] = h;
        for (std::size_t k = 0; k < ev.fresh_elements.size(); ++k)
            element_hash[ev.fresh_elements[k]] = hash_combine(hash_combine(h, 0x44), k);
        for (std::size_t k = 0; k < ev.produced.size(); ++k)
            out.instance[ev.produced[k]] = hash_combine(hash_combine(h, 0x55), k);
    }
    for (InstanceId i = 0; i < tr.instances.size(); ++i) {
        std::uint64_t h = out.instance[i];
        for (auto e : tr.instances[i].rel) h = hash_combine(h, element_hash[e]);
        out.print[i] = h;
    }
    return out;
}

} // namespace detail

struct PerturbationDiff {
    // for each step (starting at the flip step): changed and total alive counts
    std::vector<std::uint32_t> changed;
    std::vector<std::uint32_t> total;
    std::vector<double> fractions() const {
        std::vector<double> out;
        for (std::size_t i = 0; i < changed.size(); ++i)
            out.push_back(total[i] ? double(changed[i]) / double(total[i]) : 0.0);
        return out;
    }
};

// Reverses one alive relation instance at its creation step and re-runs the
// remaining evolution under the same policy; instances are aligned across the
// two runs by creation pedigree, not by isomorphism.
inline PerturbationDiff perturb_and_diff(const Trace& tr, InstanceId flip,
                                         const UpdatePolicy& policy) {
    if (flip >= tr.instances.size()) throw InstanceNotAlive("perturb: unknown instance");
    std::uint32_t at_step = tr.instances[flip].created_step;
    // alive check at the flip step
    {
        const auto& info = tr.instances[flip];
        if (info.consumer >= 0 && tr.events[info.consumer].step <= at_step)
            throw InstanceNotAlive("perturb: instance not alive at flip step");
    }

    Hypergraph start = tr.state_at(at_step);
    Hypergraph flipped = start;
    // locate the flip instance within the state snapshot
    {
        auto alive = tr.alive_at(at_step);
        for (std::size_t i = 0; i < alive.size(); ++i)
            if (alive[i] == flip) {
                std::reverse(flipped.relations[i].begin(), flipped.relations[i].end());
                break;
            }
    }
    std::uint32_t remaining = tr.steps_run - at_step;
    Trace a = evolve(start, tr.rules, policy, remaining);
    Trace b = evolve(flipped, tr.rules, policy, remaining);

    auto pa = detail::pedigrees(a);
    auto pb = detail::pedigrees(b);

    PerturbationDiff diff;
    for (std::uint32_t s = 0; s <= remaining; ++s) {
        auto alive_a = a.alive_at(s);
        auto alive_b = b.alive_at(s);
        std::unordered_set<std::uint64_t> prints_b;
        for (auto id : alive_b) prints_b.insert(pb.print[id]);
        std::uint32_t changed = 0;
        for (auto id : alive_a)
            if (!prints_b.count(pa.print[id])) ++changed;
        diff.changed.push_back(changed);
        diff.total.push_back(static_cast<std::uint32_t>(alive_a.size()));
    }
    return diff;
}

// Histogram of creation steps over instances alive at `step`.
inline std::map<std::uint32_t, std::uint32_t> age_profile(const Trace& tr, std::uint32_t step) {
    if (step > tr.steps_run) throw OutOfRange("age_profile: step beyond trace");
    std::map<std::uint32_t, std::uint32_t> hist;
    for (auto id : tr.alive_at(step)) hist[tr.instances[id].created_step]++;
    return hist;
}

} // namespace hyperforge

#endif
