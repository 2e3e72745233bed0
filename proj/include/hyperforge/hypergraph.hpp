#ifndef HYPERFORGE_HYPERGRAPH_HPP
#define HYPERFORGE_HYPERGRAPH_HPP

#include <hyperforge/common.hpp>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace hyperforge {

using ElementId = std::uint32_t;
using Relation = std::vector<ElementId>;

// A state is a multiset of ordered relations. Order of the container is not
// semantic; duplicates are distinct instances (multiedges).
struct Hypergraph {
    std::vector<Relation> relations;

    Hypergraph() = default;
    Hypergraph(std::initializer_list<Relation> rels) : relations(rels) {}
    explicit Hypergraph(std::vector<Relation> rels) : relations(std::move(rels)) {}

    std::size_t size() const { return relations.size(); }
    bool empty() const { return relations.empty(); }

    std::vector<ElementId> elements() const {
        std::vector<ElementId> out;
        for (const auto& r : relations) out.insert(out.end(), r.begin(), r.end());
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
};

// Relation counts per arity, e.g. 2_2 or 1_3 1_2. Kept sorted by descending
// arity to match the canonical relation order.
struct Signature {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> counts; // (arity, count)

    static Signature of(const Hypergraph& h) {
        std::map<std::uint32_t, std::uint32_t> m;
        for (const auto& r : h.relations) m[static_cast<std::uint32_t>(r.size())]++;
        Signature s;
        for (auto it = m.rbegin(); it != m.rend(); ++it) s.counts.push_back({it->first, it->second});
        return s;
    }

    std::size_t total_relations() const {
        std::size_t n = 0;
        for (auto& [k, c] : counts) n += c;
        return n;
    }
    std::size_t total_slots() const {
        std::size_t n = 0;
        for (auto& [k, c] : counts) n += static_cast<std::size_t>(k) * c;
        return n;
    }
    // Arity of each relation in canonical order (descending arity).
    std::vector<std::uint32_t> arity_sequence() const {
        std::vector<std::uint32_t> out;
        for (auto& [k, c] : counts)
            for (std::uint32_t i = 0; i < c; ++i) out.push_back(k);
        return out;
    }
    std::string str() const {
        std::ostringstream os;
        bool first = true;
        for (auto& [k, c] : counts) {
            if (!first) os << ' ';
            first = false;
            os << c << '_' << k;
        }
        return first ? "empty" : os.str();
    }
    bool operator==(const Signature& o) const { return counts == o.counts; }
};

// Canonical flattened form: relation arities in canonical order plus the
// flattened 1-based label sequence. Equal keys <=> isomorphic hypergraphs.
struct CanonicalKey {
    std::vector<std::uint32_t> arities;
    std::vector<std::uint32_t> flat;

    bool operator==(const CanonicalKey& o) const { return arities == o.arities && flat == o.flat; }
    bool operator!=(const CanonicalKey& o) const { return !(*this == o); }
    bool operator<(const CanonicalKey& o) const {
        if (arities != o.arities) return arities < o.arities;
        return flat < o.flat;
    }

    Hypergraph to_hypergraph() const {
        Hypergraph h;
        std::size_t pos = 0;
        for (auto k : arities) {
            h.relations.emplace_back(flat.begin() + pos, flat.begin() + pos + k);
            pos += k;
        }
        return h;
    }

    std::uint64_t hash() const {
        std::uint64_t h = hash_range(arities.data(), arities.size(), 14695981039346656037ull);
        return hash_range(flat.data(), flat.size(), h);
    }

    std::string str() const;
};

struct CanonicalKeyHash {
    std::size_t operator()(const CanonicalKey& k) const { return static_cast<std::size_t>(k.hash()); }
};

struct CanonicalResult {
    CanonicalKey key;
    // element -> 1-based canonical label
    std::unordered_map<ElementId, std::uint32_t> relabel;
    // canonical position -> index into the input relation vector
    std::vector<std::uint32_t> relation_order;
};

namespace detail {

// Local injectivity pattern of a tuple: first-occurrence relabel within the
// tuple alone, e.g. (7,3,7) -> (1,2,1).
inline std::vector<std::uint32_t> tuple_pattern(const Relation& r) {
    std::vector<std::uint32_t> pat(r.size());
    std::vector<ElementId> seen;
    for (std::size_t i = 0; i < r.size(); ++i) {
        auto it = std::find(seen.begin(), seen.end(), r[i]);
        if (it == seen.end()) {
            seen.push_back(r[i]);
            pat[i] = static_cast<std::uint32_t>(seen.size());
        } else {
            pat[i] = static_cast<std::uint32_t>(it - seen.begin()) + 1;
        }
    }
    return pat;
}

// Sort key for the fixed relation order: arity descending, pattern ascending.
struct GroupKey {
    std::uint32_t arity;
    std::vector<std::uint32_t> pattern;
    bool operator<(const GroupKey& o) const {
        if (arity != o.arity) return arity > o.arity;
        return pattern < o.pattern;
    }
    bool operator==(const GroupKey& o) const { return arity == o.arity && pattern == o.pattern; }
};

// Stable 1-WL-style color refinement over the ordered incidence structure.
// Color ids are ranks of signature traces, so they are invariant under
// relabeling: isomorphic elements always receive equal colors.
inline std::unordered_map<ElementId, std::uint32_t> refine_colors(
    const std::vector<const Relation*>& relations) {
    std::unordered_map<ElementId, std::uint32_t> color;
    for (auto* r : relations)
        for (auto e : *r) color.emplace(e, 0);
    std::size_t ncolors = 1;
    for (std::size_t round = 0; round < color.size() + 1; ++round) {
        // relation signatures under current colors
        std::vector<std::vector<std::uint32_t>> rsigs(relations.size());
        for (std::size_t i = 0; i < relations.size(); ++i) {
            rsigs[i].push_back(static_cast<std::uint32_t>(relations[i]->size()));
            for (auto e : *relations[i]) rsigs[i].push_back(color[e]);
        }
        std::vector<std::vector<std::uint32_t>> sorted_rsigs = rsigs;
        std::sort(sorted_rsigs.begin(), sorted_rsigs.end());
        sorted_rsigs.erase(std::unique(sorted_rsigs.begin(), sorted_rsigs.end()),
                           sorted_rsigs.end());
        auto rsig_id = [&](const std::vector<std::uint32_t>& s) {
            return static_cast<std::uint32_t>(
                std::lower_bound(sorted_rsigs.begin(), sorted_rsigs.end(), s) -
                sorted_rsigs.begin());
        };
        // element signatures: old color + sorted incident (relation sig, position)
        std::unordered_map<ElementId, std::vector<std::uint32_t>> esig;
        for (auto& [e, c] : color) esig[e] = {c};
        for (std::size_t i = 0; i < relations.size(); ++i) {
            std::uint32_t rid = rsig_id(rsigs[i]);
            const Relation& r = *relations[i];
            for (std::size_t p = 0; p < r.size(); ++p) {
                esig[r[p]].push_back(rid);
                esig[r[p]].push_back(static_cast<std::uint32_t>(p));
            }
        }
        for (auto& [e, s] : esig) {
            // sort incident (relation signature, position) entries pairwise,
            // keeping the element's previous color in front
            std::vector<std::pair<std::uint32_t, std::uint32_t>> inc;
            for (std::size_t i = 1; i + 1 < s.size(); i += 2) inc.push_back({s[i], s[i + 1]});
            std::sort(inc.begin(), inc.end());
            std::vector<std::uint32_t> flat{s[0]};
            for (auto& [a, b] : inc) {
                flat.push_back(a);
                flat.push_back(b);
            }
            s = std::move(flat);
        }
        std::vector<std::vector<std::uint32_t>> sigs;
        sigs.reserve(esig.size());
        for (auto& [e, s] : esig) sigs.push_back(s);
        std::sort(sigs.begin(), sigs.end());
        sigs.erase(std::unique(sigs.begin(), sigs.end()), sigs.end());
        for (auto& [e, c] : color) {
            const auto& s = esig[e];
            c = static_cast<std::uint32_t>(
                std::lower_bound(sigs.begin(), sigs.end(), s) - sigs.begin());
        }
        if (sigs.size() == ncolors) break;
        ncolors = sigs.size();
    }
    return color;
}

// Backtracking minimizer for the canonical presentation. Works over one or
// two phases (rule sides) sharing a naming state; phase boundaries restrict
// relation order but the label numbering runs through.
class CanonMinimizer {
public:
    struct Phase {
        std::vector<const Relation*> relations;
    };

    // pre_named: elements whose labels are already fixed (used when
    // canonicalizing a rule right-hand side against a fixed left side).
    CanonMinimizer() = default;

    void add_phase(const std::vector<const Relation*>& rels) { phases_.push_back({rels}); }

    // Runs the search; returns flattened minimal labels and fills orders.
    // If collect_all is set, all optimal labelings are collected.
    void run(bool collect_all = false) {
        layouts_.clear();
        total_ = 0;
        for (auto& ph : phases_) {
            std::vector<std::pair<GroupKey, std::uint32_t>> keyed;
            for (std::uint32_t i = 0; i < ph.relations.size(); ++i)
                keyed.push_back({GroupKey{static_cast<std::uint32_t>(ph.relations[i]->size()),
                                          tuple_pattern(*ph.relations[i])},
                                 i});
            std::stable_sort(keyed.begin(), keyed.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            // group structure: contiguous runs with identical keys
            PhaseLayout layout;
            layout.order.reserve(keyed.size());
            for (std::size_t i = 0; i < keyed.size(); ++i) {
                layout.order.push_back(keyed[i].second);
                if (i == 0 || !(keyed[i].first == keyed[i - 1].first)) layout.group_start.push_back(i);
            }
            layout.group_start.push_back(keyed.size());
            layouts_.push_back(std::move(layout));
            total_ += ph.relations.size();
        }

        best_flat_.clear();
        has_best_ = false;
        best_labelings_.clear();
        autos_.clear();
        collect_all_ = collect_all;

        naming_ = initial_naming_;
        named_stack_.clear();
        for (auto& [e, l] : naming_) named_stack_.push_back(e);
        next_label_ = 1;
        for (auto& [e, l] : naming_) next_label_ = std::max(next_label_, l + 1);
        cur_flat_.clear();
        cur_order_.clear();
        used_.assign(max_phase_size_(), false);
        dfs(0, 0, 0, false);
    }

    void set_initial_naming(const std::unordered_map<ElementId, std::uint32_t>& naming) {
        initial_naming_ = naming;
    }
    void enable_colors() {
        std::vector<const Relation*> all;
        for (auto& ph : phases_)
            for (auto* r : ph.relations) all.push_back(r);
        colors_ = refine_colors(all);
        use_colors_ = true;
    }

    const std::vector<std::uint32_t>& best_flat() const { return best_flat_; }
    const std::vector<std::vector<std::uint32_t>>& best_orders() const { return best_orders_; }
    const std::unordered_map<ElementId, std::uint32_t>& best_naming() const { return best_naming_; }
    const std::vector<std::unordered_map<ElementId, std::uint32_t>>& all_namings() const {
        return best_labelings_;
    }
    std::vector<std::uint32_t> arity_sequence() const {
        std::vector<std::uint32_t> out;
        for (std::size_t p = 0; p < phases_.size(); ++p)
            for (auto idx : layouts_[p].order)
                out.push_back(static_cast<std::uint32_t>(phases_[p].relations[idx]->size()));
        return out;
    }
    // Arities in canonical order for a single phase.
    std::vector<std::uint32_t> phase_arities(std::size_t p) const {
        std::vector<std::uint32_t> out;
        for (auto idx : layouts_[p].order)
            out.push_back(static_cast<std::uint32_t>(phases_[p].relations[idx]->size()));
        return out;
    }
    std::size_t phase_flat_size(std::size_t p) const {
        std::size_t n = 0;
        for (auto r : phases_[p].relations) n += r->size();
        return n;
    }

private:
    struct PhaseLayout {
        std::vector<std::uint32_t> order;      // sorted slot -> original index
        std::vector<std::size_t> group_start;  // group boundaries over sorted slots
    };

    std::size_t max_phase_size_() const {
        std::size_t m = 0;
        for (auto& p : phases_) m = std::max(m, p.relations.size());
        return m;
    }

    std::size_t group_of(const PhaseLayout& lay, std::size_t slot) const {
        std::size_t g = 0;
        while (lay.group_start[g + 1] <= slot) ++g;
        return g;
    }

    // Tuple labels if this relation were placed next, assigning tentative
    // fresh labels in order of first occurrence.
    std::vector<std::uint32_t> project(const Relation& r) const {
        std::vector<std::uint32_t> out(r.size());
        std::uint32_t fresh = next_label_;
        std::vector<std::pair<ElementId, std::uint32_t>> local;
        for (std::size_t i = 0; i < r.size(); ++i) {
            auto it = naming_.find(r[i]);
            if (it != naming_.end()) {
                out[i] = it->second;
                continue;
            }
            bool found = false;
            for (auto& [e, l] : local)
                if (e == r[i]) {
                    out[i] = l;
                    found = true;
                    break;
                }
            if (!found) {
                local.push_back({r[i], fresh});
                out[i] = fresh++;
            }
        }
        return out;
    }

    void commit(const Relation& r, const std::vector<std::uint32_t>& labels,
                std::vector<ElementId>& newly) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (!naming_.count(r[i])) {
                naming_[r[i]] = labels[i];
                newly.push_back(r[i]);
                named_stack_.push_back(r[i]);
                ++next_label_;
            }
        }
    }
    void rollback(const std::vector<ElementId>& newly) {
        for (auto e : newly) naming_.erase(e);
        named_stack_.resize(named_stack_.size() - newly.size());
        next_label_ -= static_cast<std::uint32_t>(newly.size());
    }

    void dfs(std::size_t phase, std::size_t slot, std::size_t flat_pos, bool strictly_less) {
        if (phase == phases_.size()) {
            if (!has_best_ || cur_flat_ < best_flat_) {
                best_flat_ = cur_flat_;
                best_orders_ = cur_order_history_();
                best_naming_ = naming_;
                has_best_ = true;
                best_inverse_.assign(best_flat_.size() + 2, 0);
                for (auto& [e, l] : best_naming_) {
                    if (l >= best_inverse_.size()) best_inverse_.resize(l + 1);
                    best_inverse_[l] = e;
                }
                if (collect_all_) {
                    best_labelings_.clear();
                    best_labelings_.push_back(naming_);
                }
            } else if (cur_flat_ == best_flat_) {
                if (collect_all_) best_labelings_.push_back(naming_);
                // a tie reveals an automorphism: map each element through
                // its label in the tying labeling back through the best one
                if (autos_.size() < kMaxStoredAutomorphisms) {
                    std::unordered_map<ElementId, ElementId> sigma;
                    bool identity = true;
                    for (auto& [e, l] : naming_) {
                        ElementId img = best_inverse_[l];
                        sigma[e] = img;
                        if (img != e) identity = false;
                    }
                    if (!identity) autos_.push_back(std::move(sigma));
                }
            }
            return;
        }
        auto& ph = phases_[phase];
        auto& lay = layouts_[phase];
        if (slot == ph.relations.size()) {
            std::vector<bool> save_used = used_;
            used_.assign(max_phase_size_(), false);
            cur_order_.push_back({});
            std::swap(cur_order_.back(), pending_order_);
            dfs(phase + 1, 0, flat_pos, strictly_less);
            std::swap(pending_order_, cur_order_.back());
            cur_order_.pop_back();
            used_ = save_used;
            return;
        }

        std::size_t g = group_of(lay, slot);
        std::size_t gb = lay.group_start[g], ge = lay.group_start[g + 1];

        // Minimal projected tuple among unused candidates in this group. With
        // colors enabled (large structures), ties are further restricted to
        // the minimal color key; the restriction is isomorphism-invariant.
        std::vector<std::uint32_t> min_tuple;
        std::vector<std::uint32_t> min_ckey;
        std::vector<std::size_t> winners;
        for (std::size_t s = gb; s < ge; ++s) {
            std::uint32_t orig = lay.order[s];
            if (used_[orig]) continue;
            auto t = project(*ph.relations[orig]);
            std::vector<std::uint32_t> ck;
            if (use_colors_) {
                ck.reserve(ph.relations[orig]->size());
                for (auto e : *ph.relations[orig]) ck.push_back(colors_.at(e));
            }
            bool better = winners.empty() || t < min_tuple ||
                          (t == min_tuple && use_colors_ && ck < min_ckey);
            if (better) {
                min_tuple = t;
                min_ckey = ck;
                winners.clear();
                winners.push_back(orig);
            } else if (t == min_tuple && (!use_colors_ || ck == min_ckey)) {
                // identical raw relations lead to identical branches
                bool dup = false;
                for (auto w : winners)
                    if (*ph.relations[w] == *ph.relations[orig]) {
                        dup = true;
                        break;
                    }
                if (!dup) winners.push_back(orig);
            }
        }

        // Bound against the best complete flat found so far. A segment that
        // exceeds the best prefix can never win; an equal segment must still
        // be explored because a later segment may drop below the best.
        if (has_best_ && !strictly_less) {
            for (std::size_t i = 0; i < min_tuple.size(); ++i) {
                std::uint32_t b = best_flat_[flat_pos + i];
                if (min_tuple[i] > b) return;
                if (min_tuple[i] < b) {
                    strictly_less = true;
                    break;
                }
            }
        }

        // Orbit pruning: skip a tied candidate when a discovered automorphism
        // that fixes every currently named element maps it onto a sibling
        // already explored at this node.
        std::vector<const Relation*> explored;
        for (auto orig : winners) {
            const Relation& rel = *ph.relations[orig];
            if (winners.size() > 1 && !explored.empty() && equivalent_to_explored(rel, explored))
                continue;
            std::vector<ElementId> newly;
            used_[orig] = true;
            pending_order_.push_back(orig);
            cur_flat_.insert(cur_flat_.end(), min_tuple.begin(), min_tuple.end());
            commit(*ph.relations[orig], min_tuple, newly);
            dfs(phase, slot + 1, flat_pos + min_tuple.size(), strictly_less);
            rollback(newly);
            cur_flat_.resize(flat_pos);
            pending_order_.pop_back();
            used_[orig] = false;
            explored.push_back(&rel);
        }
    }

    bool equivalent_to_explored(const Relation& rel,
                                const std::vector<const Relation*>& explored) const {
        if (collect_all_) return false;
        for (const auto& sigma : autos_) {
            bool fixes = true;
            for (auto e : named_stack_) {
                auto it = sigma.find(e);
                if (it != sigma.end() && it->second != e) {
                    fixes = false;
                    break;
                }
            }
            if (!fixes) continue;
            Relation image(rel.size());
            for (std::size_t i = 0; i < rel.size(); ++i) {
                auto it = sigma.find(rel[i]);
                image[i] = (it == sigma.end()) ? rel[i] : it->second;
            }
            for (auto* ex : explored)
                if (*ex == image) return true;
        }
        return false;
    }

    std::vector<std::vector<std::uint32_t>> cur_order_history_() const { return cur_order_; }

    static constexpr std::size_t kMaxStoredAutomorphisms = 2000;

    std::vector<Phase> phases_;
    std::vector<PhaseLayout> layouts_;
    std::unordered_map<ElementId, std::uint32_t> initial_naming_;
    std::unordered_map<ElementId, std::uint32_t> naming_;
    std::vector<ElementId> named_stack_;
    std::vector<std::unordered_map<ElementId, ElementId>> autos_;
    std::vector<ElementId> best_inverse_;
    std::unordered_map<ElementId, std::uint32_t> colors_;
    bool use_colors_ = false;
    std::uint32_t next_label_ = 1;
    std::size_t total_ = 0;
    std::vector<bool> used_;
    std::vector<std::uint32_t> cur_flat_;
    std::vector<std::vector<std::uint32_t>> cur_order_;
    std::vector<std::uint32_t> pending_order_;
    std::vector<std::uint32_t> best_flat_;
    std::vector<std::vector<std::uint32_t>> best_orders_;
    std::unordered_map<ElementId, std::uint32_t> best_naming_;
    std::vector<std::unordered_map<ElementId, std::uint32_t>> best_labelings_;
    bool has_best_ = false;
    bool collect_all_ = false;
};

} // namespace detail

inline constexpr std::size_t kDefaultCanonicalElementBound = 64;

// Structures up to this many elements are canonicalized by exact
// lexicographic minimization; larger ones use color-guided candidate
// restriction. Element count is invariant, so keys stay comparable.
inline constexpr std::size_t kExactCanonicalElements = 12;

inline Signature signature(const Hypergraph& h) { return Signature::of(h); }

// Weak connectivity over the incidence structure: all members of one
// relation count as mutually adjacent; unary relations participate through
// their single element. Empty hypergraph is connected by convention.
inline bool is_connected(const Hypergraph& h) {
    if (h.relations.empty()) return true;
    std::unordered_map<ElementId, std::uint32_t> comp;
    std::vector<std::uint32_t> parent;
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    auto unite = [&](std::uint32_t a, std::uint32_t b) { parent[find(a)] = find(b); };
    auto node = [&](ElementId e) {
        auto it = comp.find(e);
        if (it != comp.end()) return it->second;
        std::uint32_t id = static_cast<std::uint32_t>(parent.size());
        parent.push_back(id);
        comp[e] = id;
        return id;
    };
    // one pseudo-node per relation ties its members together
    for (const auto& r : h.relations) {
        std::uint32_t rn = static_cast<std::uint32_t>(parent.size());
        parent.push_back(rn);
        for (auto e : r) unite(node(e), rn);
    }
    std::uint32_t root = find(0);
    for (std::uint32_t i = 0; i < parent.size(); ++i)
        if (find(i) != root) return false;
    return true;
}

inline CanonicalResult canonicalize(const Hypergraph& h,
                                    std::size_t element_bound = kDefaultCanonicalElementBound) {
    std::size_t nel = h.elements().size();
    if (nel > element_bound)
        throw ResourceLimit("canonicalize: element count exceeds bound " +
                            std::to_string(element_bound));
    detail::CanonMinimizer mz;
    std::vector<const Relation*> rels;
    rels.reserve(h.relations.size());
    for (const auto& r : h.relations) rels.push_back(&r);
    mz.add_phase(rels);
    if (nel > kExactCanonicalElements) mz.enable_colors();
    mz.run();
    CanonicalResult res;
    res.key.arities = mz.arity_sequence();
    res.key.flat = mz.best_flat();
    for (auto& [e, l] : mz.best_naming()) res.relabel[e] = l;
    if (!mz.best_orders().empty()) res.relation_order = mz.best_orders()[0];
    return res;
}

// All element labelings that realize the canonical key (automorphic images).
inline std::vector<std::unordered_map<ElementId, std::uint32_t>> canonical_labelings(
    const Hypergraph& h, std::size_t element_bound = kDefaultCanonicalElementBound) {
    if (h.elements().size() > element_bound)
        throw ResourceLimit("canonicalize: element count exceeds bound " +
                            std::to_string(element_bound));
    detail::CanonMinimizer mz;
    std::vector<const Relation*> rels;
    for (const auto& r : h.relations) rels.push_back(&r);
    mz.add_phase(rels);
    mz.run(true);
    return mz.all_namings();
}

inline CanonicalKey canonical_key(const Hypergraph& h,
                                  std::size_t element_bound = kDefaultCanonicalElementBound) {
    return canonicalize(h, element_bound).key;
}

inline bool isomorphic(const Hypergraph& a, const Hypergraph& b,
                       std::size_t element_bound = kDefaultCanonicalElementBound) {
    if (a.relations.size() != b.relations.size()) return false;
    if (!(Signature::of(a) == Signature::of(b))) return false;
    return canonical_key(a, element_bound) == canonical_key(b, element_bound);
}

// Exhaustive generation of one representative per isomorphism class with the
// given signature. Orderly generation: a partial presentation is extended
// only while it stays canonical, so no global dedup pass is needed.
inline std::vector<Hypergraph> enumerate_hypergraphs(const Signature& sig, bool connected_only,
                                                     std::size_t slot_bound = 24) {
    if (sig.total_slots() > slot_bound)
        throw ResourceLimit("enumerate_hypergraphs: signature too large");
    std::vector<std::uint32_t> arities = sig.arity_sequence();
    std::vector<Hypergraph> out;
    Hypergraph cur;
    std::uint32_t max_label = 0;

    auto canonical_prefix = [&]() {
        CanonicalResult c = canonicalize(cur);
        if (c.key.flat.size() != 0) {
            std::size_t pos = 0;
            for (std::size_t i = 0; i < cur.relations.size(); ++i) {
                const Relation& r = cur.relations[i];
                for (std::size_t j = 0; j < r.size(); ++j)
                    if (c.key.flat[pos + j] != r[j]) return false;
                // also require identical relation order
                pos += r.size();
            }
            // flat equality suffices: presented labels are the canonical ones
        }
        return true;
    };

    std::function<void(std::size_t)> rec = [&](std::size_t idx) {
        if (idx == arities.size()) {
            if (!connected_only || is_connected(cur)) out.push_back(cur);
            return;
        }
        std::uint32_t k = arities[idx];
        Relation tuple(k);
        std::function<void(std::size_t, std::uint32_t)> fill = [&](std::size_t p,
                                                                   std::uint32_t cur_max) {
            if (p == k) {
                std::uint32_t save_max = max_label;
                cur.relations.push_back(tuple);
                max_label = cur_max;
                if (canonical_prefix()) rec(idx + 1);
                cur.relations.pop_back();
                max_label = save_max;
                return;
            }
            for (std::uint32_t v = 1; v <= cur_max + 1; ++v) {
                tuple[p] = v;
                fill(p + 1, std::max(cur_max, v));
            }
        };
        fill(0, max_label);
        return;
    };
    rec(0);
    std::sort(out.begin(), out.end(), [](const Hypergraph& a, const Hypergraph& b) {
        // already canonical presentations; compare keys directly
        std::vector<std::uint32_t> fa, fb;
        for (auto& r : a.relations) fa.insert(fa.end(), r.begin(), r.end());
        for (auto& r : b.relations) fb.insert(fb.end(), r.begin(), r.end());
        return fa < fb;
    });
    return out;
}

// ---- textual forms -------------------------------------------------------

inline std::string to_string(const Hypergraph& h) {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < h.relations.size(); ++i) {
        if (i) os << ',';
        os << '{';
        for (std::size_t j = 0; j < h.relations[i].size(); ++j) {
            if (j) os << ',';
            os << h.relations[i][j];
        }
        os << '}';
    }
    os << '}';
    return os.str();
}

inline std::string CanonicalKey::str() const { return to_string(to_hypergraph()); }

// Parses `{{1,2},{1,3}}`; whitespace-insensitive.
inline Hypergraph parse_hypergraph(const std::string& text) {
    Hypergraph h;
    std::size_t i = 0;
    auto skip = [&]() {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto expect = [&](char c) {
        skip();
        if (i >= text.size() || text[i] != c)
            throw ParseError(std::string("expected '") + c + "'", i);
        ++i;
    };
    expect('{');
    skip();
    if (i < text.size() && text[i] == '}') {
        ++i;
        skip();
        if (i != text.size()) throw ParseError("trailing input", i);
        return h;
    }
    while (true) {
        expect('{');
        Relation r;
        while (true) {
            skip();
            std::size_t start = i;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            if (i == start) throw ParseError("expected integer element", i);
            r.push_back(static_cast<ElementId>(std::stoul(text.substr(start, i - start))));
            skip();
            if (i < text.size() && text[i] == ',') {
                ++i;
                continue;
            }
            break;
        }
        expect('}');
        if (r.empty()) throw ParseError("empty relation", i);
        h.relations.push_back(std::move(r));
        skip();
        if (i < text.size() && text[i] == ',') {
            ++i;
            continue;
        }
        break;
    }
    expect('}');
    skip();
    if (i != text.size()) throw ParseError("trailing input", i);
    return h;
}

// Accepts forms like "2_2" and "1_3 1_2".
inline Signature parse_signature(const std::string& text) {
    Signature sig;
    std::map<std::uint32_t, std::uint32_t> acc;
    std::size_t i = 0;
    auto skip = [&]() {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    skip();
    while (i < text.size()) {
        std::size_t s = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        if (s == i) throw ParseError("expected relation count", i);
        std::uint32_t count = static_cast<std::uint32_t>(std::stoul(text.substr(s, i - s)));
        if (i >= text.size() || text[i] != '_') throw ParseError("expected '_'", i);
        ++i;
        s = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        if (s == i) throw ParseError("expected arity", i);
        std::uint32_t arity = static_cast<std::uint32_t>(std::stoul(text.substr(s, i - s)));
        if (count == 0 || arity == 0) throw SemanticError("signature terms must be positive");
        acc[arity] += count;
        skip();
    }
    if (acc.empty()) throw SemanticError("empty signature");
    for (auto it = acc.rbegin(); it != acc.rend(); ++it)
        sig.counts.push_back({it->first, it->second});
    return sig;
}

// n k-ary self-loops Table[0, n, k].
inline Hypergraph self_loops(std::uint32_t n, std::uint32_t k) {
    Hypergraph h;
    for (std::uint32_t i = 0; i < n; ++i) h.relations.push_back(Relation(k, 0));
    return h;
}

} // namespace hyperforge

#endif
