#ifndef HYPERFORGE_RULES_HPP
#define HYPERFORGE_RULES_HPP

#include <hyperforge/hypergraph.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <unordered_set>

namespace hyperforge {

// Pattern variables are positive integers; a rule in canonical form numbers
// them 1..m by first occurrence across lhs then rhs.
using Variable = std::uint32_t;

struct Rule {
    std::vector<Relation> lhs; // pattern relations over variables
    std::vector<Relation> rhs; // template relations; fresh variables allowed

    std::vector<Variable> lhs_variables() const {
        std::vector<Variable> v;
        for (auto& r : lhs) v.insert(v.end(), r.begin(), r.end());
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    }
    std::vector<Variable> all_variables() const {
        std::vector<Variable> v;
        for (auto& r : lhs) v.insert(v.end(), r.begin(), r.end());
        for (auto& r : rhs) v.insert(v.end(), r.begin(), r.end());
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    }
    std::vector<Variable> fresh_variables() const {
        auto l = lhs_variables();
        std::vector<Variable> out;
        for (auto& r : rhs)
            for (auto v : r)
                if (!std::binary_search(l.begin(), l.end(), v)) out.push_back(v);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
    bool operator==(const Rule& o) const { return lhs == o.lhs && rhs == o.rhs; }
    bool operator<(const Rule& o) const {
        if (lhs != o.lhs) return lhs < o.lhs;
        return rhs < o.rhs;
    }
};

using RuleSet = std::vector<Rule>;

struct RuleSignature {
    Signature lhs, rhs;
    std::size_t total_slots() const { return lhs.total_slots() + rhs.total_slots(); }
    std::string str() const { return lhs.str() + " -> " + rhs.str(); }

    static RuleSignature of(const Rule& r) {
        return {Signature::of(Hypergraph{std::vector<Relation>(r.lhs)}),
                Signature::of(Hypergraph{std::vector<Relation>(r.rhs)})};
    }
};

inline constexpr std::size_t kDefaultRuleVariableBound = 16;

// ---- parsing ---------------------------------------------------------------

namespace detail {

struct RuleParser {
    const std::string& text;
    std::size_t i = 0;
    std::unordered_map<std::string, Variable> names;
    Variable next_var = 1;

    explicit RuleParser(const std::string& t) : text(t) {}

    void skip() {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    }
    bool eat(char c) {
        skip();
        if (i < text.size() && text[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c)) throw ParseError(std::string("expected '") + c + "'", i);
    }

    Variable variable() {
        skip();
        std::size_t start = i;
        if (i < text.size() && (std::isalpha(static_cast<unsigned char>(text[i])) || text[i] == '_')) {
            while (i < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
                ++i;
        } else {
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        }
        if (i == start) throw ParseError("expected variable", i);
        std::string name = text.substr(start, i - start);
        auto it = names.find(name);
        if (it != names.end()) return it->second;
        names[name] = next_var;
        return next_var++;
    }

    std::vector<Relation> side() {
        std::vector<Relation> rels;
        expect('{');
        skip();
        if (eat('}')) return rels;
        while (true) {
            expect('{');
            Relation r;
            while (true) {
                r.push_back(variable());
                if (eat(',')) continue;
                break;
            }
            expect('}');
            if (r.empty()) throw ParseError("empty relation", i);
            rels.push_back(std::move(r));
            if (eat(',')) continue;
            break;
        }
        expect('}');
        return rels;
    }

    Rule rule() {
        Rule r;
        r.lhs = side();
        skip();
        if (i + 1 >= text.size() || text[i] != '-' || text[i + 1] != '>')
            throw ParseError("expected '->'", i);
        i += 2;
        skip();
        if (i >= text.size() || text[i] != '{') throw ParseError("expected right-hand side", i);
        r.rhs = side();
        if (r.lhs.empty()) throw SemanticError("rule left-hand side must be nonempty");
        return r;
    }

    RuleSet rules() {
        RuleSet rs;
        while (true) {
            names.clear();
            next_var = 1;
            rs.push_back(rule());
            skip();
            if (eat(';')) continue;
            break;
        }
        skip();
        if (i != text.size()) throw ParseError("trailing input", i);
        if (rs.empty()) throw SemanticError("empty rule set");
        return rs;
    }
};

} // namespace detail

inline RuleSet parse_rules(const std::string& text) { return detail::RuleParser(text).rules(); }
inline Rule parse_rule_single(const std::string& text) {
    auto rs = parse_rules(text);
    if (rs.size() != 1) throw SemanticError("expected a single rule");
    return rs[0];
}

inline std::string to_string(const Rule& r) {
    return to_string(Hypergraph{std::vector<Relation>(r.lhs)}) + " -> " +
           to_string(Hypergraph{std::vector<Relation>(r.rhs)});
}
inline std::string to_string(const RuleSet& rs) {
    std::string out;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        if (i) out += " ; ";
        out += to_string(rs[i]);
    }
    return out;
}

// ---- canonical rule form ---------------------------------------------------

// Minimal presentation under joint variable renaming and per-side relation
// reordering: the left side is minimized first, then the right side over all
// namings that realize the minimal left side.
inline Rule canonical_rule(const Rule& r, std::size_t var_bound = kDefaultRuleVariableBound) {
    if (r.all_variables().size() > var_bound)
        throw ResourceLimit("canonical_rule: variable count exceeds bound " +
                            std::to_string(var_bound));
    detail::CanonMinimizer mz;
    std::vector<const Relation*> l, rr;
    for (auto& x : r.lhs) l.push_back(&x);
    for (auto& x : r.rhs) rr.push_back(&x);
    mz.add_phase(l);
    mz.add_phase(rr);
    mz.run();
    const auto& flat = mz.best_flat();
    auto la = mz.phase_arities(0);
    auto ra = mz.phase_arities(1);
    Rule out;
    std::size_t pos = 0;
    for (auto k : la) {
        out.lhs.emplace_back(flat.begin() + pos, flat.begin() + pos + k);
        pos += k;
    }
    for (auto k : ra) {
        out.rhs.emplace_back(flat.begin() + pos, flat.begin() + pos + k);
        pos += k;
    }
    return out;
}

inline RuleSet canonical_rule_set(const RuleSet& rs,
                                  std::size_t var_bound = kDefaultRuleVariableBound) {
    RuleSet out;
    for (auto& r : rs) out.push_back(canonical_rule(r, var_bound));
    std::sort(out.begin(), out.end());
    return out;
}

inline bool rules_equivalent(const Rule& a, const Rule& b) {
    return canonical_rule(a) == canonical_rule(b);
}

// ---- Bell numbers and restricted-growth ranking ----------------------------

// Bell numbers fit in unsigned 64-bit through Bell(25).
inline constexpr std::size_t kMaxRankSlots = 25;

inline std::uint64_t bell_number(std::size_t n) {
    if (n > kMaxRankSlots) throw OutOfRange("bell_number: n exceeds 64-bit table");
    static const auto table = [] {
        std::array<std::uint64_t, kMaxRankSlots + 1> bell{};
        std::vector<std::vector<std::uint64_t>> tri(kMaxRankSlots + 1);
        tri[0] = {1};
        bell[0] = 1;
        for (std::size_t i = 1; i <= kMaxRankSlots; ++i) {
            tri[i].resize(i + 1);
            tri[i][0] = tri[i - 1][i - 1];
            for (std::size_t j = 1; j <= i; ++j) tri[i][j] = tri[i][j - 1] + tri[i - 1][j - 1];
            bell[i] = tri[i][0];
        }
        return bell;
    }();
    return table[n];
}

namespace detail {

// completions[i][m]: number of restricted-growth tails of length n-i given
// current maximum label m.
inline std::vector<std::vector<std::uint64_t>> rgs_completions(std::size_t n) {
    std::vector<std::vector<std::uint64_t>> d(n + 1, std::vector<std::uint64_t>(n + 2, 0));
    for (std::size_t m = 0; m <= n + 1; ++m) d[n][m] = 1;
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t m = 0; m <= n; ++m)
            d[i][m] = static_cast<std::uint64_t>(m) * d[i + 1][m] + d[i + 1][m + 1];
    return d;
}

} // namespace detail

// 0-based lexicographic position of a restricted-growth sequence (first
// occurrences are 1,2,3,...) among all such sequences of its length.
inline std::uint64_t rgs_rank(const std::vector<std::uint32_t>& seq) {
    std::size_t n = seq.size();
    if (n > kMaxRankSlots) throw ResourceLimit("rgs_rank: sequence too long for 64-bit rank");
    auto d = detail::rgs_completions(n);
    std::uint64_t rank = 0;
    std::uint32_t m = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t v = seq[i];
        if (v < 1 || v > m + 1) throw OutOfRange("rgs_rank: not a restricted-growth sequence");
        // values 1..v-1 are all <= m here since v <= m+1
        rank += static_cast<std::uint64_t>(v - 1) * d[i + 1][m];
        // adjust: choosing a value u <= m keeps max at m; only u = m+1 bumps
        // it, and u = m+1 is not below v unless v = m+1 (no contribution).
        m = std::max(m, v);
    }
    return rank;
}

inline std::vector<std::uint32_t> rgs_unrank(std::size_t n, std::uint64_t rank) {
    if (n > kMaxRankSlots) throw ResourceLimit("rgs_unrank: length too long for 64-bit rank");
    auto d = detail::rgs_completions(n);
    if (rank >= d[0][0]) throw OutOfRange("rgs_unrank: rank exceeds sequence count");
    std::vector<std::uint32_t> seq(n);
    std::uint32_t m = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t v = 1;
        while (true) {
            std::uint64_t block = d[i + 1][std::max(m, v)];
            if (rank < block) break;
            rank -= block;
            ++v;
        }
        seq[i] = v;
        m = std::max(m, v);
    }
    return seq;
}

inline std::vector<std::uint32_t> rule_flat(const Rule& r) {
    std::vector<std::uint32_t> flat;
    for (auto& rel : r.lhs) flat.insert(flat.end(), rel.begin(), rel.end());
    for (auto& rel : r.rhs) flat.insert(flat.end(), rel.begin(), rel.end());
    return flat;
}

// Rank of a canonical rule: position of its flattened variable sequence among
// all restricted-growth sequences of that length.
inline std::uint64_t rule_rank(const Rule& r) { return rgs_rank(rule_flat(canonical_rule(r))); }

inline Rule rule_unrank(const RuleSignature& sig, std::uint64_t rank) {
    std::size_t slots = sig.total_slots();
    auto seq = rgs_unrank(slots, rank);
    auto la = sig.lhs.arity_sequence();
    auto ra = sig.rhs.arity_sequence();
    Rule r;
    std::size_t pos = 0;
    for (auto k : la) {
        r.lhs.emplace_back(seq.begin() + pos, seq.begin() + pos + k);
        pos += k;
    }
    for (auto k : ra) {
        r.rhs.emplace_back(seq.begin() + pos, seq.begin() + pos + k);
        pos += k;
    }
    return r;
}

// Bell-number lower-bound estimate for the number of canonical rules.
inline double estimate_rule_count(const RuleSignature& sig) {
    double denom = 1.0;
    for (auto& [k, c] : sig.lhs.counts)
        for (std::uint32_t i = 2; i <= c; ++i) denom *= i;
    for (auto& [k, c] : sig.rhs.counts)
        for (std::uint32_t i = 2; i <= c; ++i) denom *= i;
    return static_cast<double>(bell_number(sig.total_slots())) / denom;
}

// ---- rule enumeration ------------------------------------------------------

// Left connectivity: the lhs hypergraph is connected and every weakly
// connected component of the rhs contains at least one lhs variable. This is
// the reading that reproduces the published rule-space counts.
inline bool left_connected(const Rule& r) {
    if (!is_connected(Hypergraph{std::vector<Relation>(r.lhs)})) return false;
    if (r.rhs.empty()) return true;
    auto lv = r.lhs_variables();
    std::vector<int> comp(r.rhs.size(), -1);
    int nc = 0;
    for (std::size_t i = 0; i < r.rhs.size(); ++i) {
        if (comp[i] != -1) continue;
        std::vector<std::size_t> stack{i};
        comp[i] = nc;
        while (!stack.empty()) {
            auto a = stack.back();
            stack.pop_back();
            for (std::size_t b = 0; b < r.rhs.size(); ++b) {
                if (comp[b] != -1) continue;
                bool share = false;
                for (auto x : r.rhs[a]) {
                    for (auto y : r.rhs[b])
                        if (x == y) {
                            share = true;
                            break;
                        }
                    if (share) break;
                }
                if (share) {
                    comp[b] = nc;
                    stack.push_back(b);
                }
            }
        }
        ++nc;
    }
    std::vector<bool> anchored(nc, false);
    for (std::size_t i = 0; i < r.rhs.size(); ++i)
        for (auto v : r.rhs[i])
            if (std::binary_search(lv.begin(), lv.end(), v)) anchored[comp[i]] = true;
    for (bool a : anchored)
        if (!a) return false;
    return true;
}

// Orderly generation: extend the flattened restricted-growth presentation one
// relation at a time, keeping only prefixes that are already canonical.
inline std::vector<Rule> enumerate_rules(const RuleSignature& sig, bool left_connected_only,
                                         std::size_t slot_bound = 16) {
    if (sig.total_slots() > slot_bound) throw ResourceLimit("enumerate_rules: signature too large");
    auto la = sig.lhs.arity_sequence();
    auto ra = sig.rhs.arity_sequence();
    std::vector<std::uint32_t> arities = la;
    arities.insert(arities.end(), ra.begin(), ra.end());
    std::size_t lhs_count = la.size();

    std::vector<Rule> out;
    Rule cur;

    auto canonical_prefix = [&]() {
        Rule c = canonical_rule(cur, 32);
        return c == cur;
    };

    std::function<void(std::size_t, std::uint32_t)> rec = [&](std::size_t idx,
                                                              std::uint32_t max_label) {
        if (idx == arities.size()) {
            if (!left_connected_only || left_connected(cur)) out.push_back(cur);
            return;
        }
        std::uint32_t k = arities[idx];
        Relation tuple(k);
        std::function<void(std::size_t, std::uint32_t)> fill = [&](std::size_t p,
                                                                   std::uint32_t cm) {
            if (p == k) {
                auto& side = (idx < lhs_count) ? cur.lhs : cur.rhs;
                side.push_back(tuple);
                if (canonical_prefix()) rec(idx + 1, cm);
                side.pop_back();
                return;
            }
            for (std::uint32_t v = 1; v <= cm + 1; ++v) {
                tuple[p] = v;
                fill(p + 1, std::max(cm, v));
            }
        };
        fill(0, max_label);
    };
    rec(0, 0);
    std::sort(out.begin(), out.end(),
              [](const Rule& a, const Rule& b) { return rule_flat(a) < rule_flat(b); });
    return out;
}

inline std::uint64_t count_rules(const RuleSignature& sig, bool left_connected_only,
                                 std::size_t slot_bound = 16) {
    return enumerate_rules(sig, left_connected_only, slot_bound).size();
}

// ---- symmetry --------------------------------------------------------------

enum class TernaryClass { None, S2_231, S2_321, S2_213, A3, S3, NotTernary };

struct SymmetryReport {
    bool global_reversal_symmetric = false;
    // Permutations of relation positions (uniform arity only) that leave the
    // canonical rule fixed; each entry is an image vector of 0-based slots.
    std::vector<std::vector<std::uint32_t>> invariant_position_permutations;
    TernaryClass ternary_class = TernaryClass::NotTernary;
    // Permutations of the lhs variable set mapping the lhs onto itself.
    std::vector<std::vector<Variable>> lhs_automorphism_group;
    // Permutations of the lhs variable set leaving the canonical rule fixed.
    std::vector<std::vector<Variable>> invariant_variable_permutations;
};

namespace detail {

inline Rule apply_position_perm(const Rule& r, const std::vector<std::uint32_t>& perm) {
    Rule out = r;
    auto remap = [&](std::vector<Relation>& side) {
        for (auto& rel : side) {
            if (rel.size() != perm.size()) continue;
            Relation t(rel.size());
            for (std::size_t i = 0; i < rel.size(); ++i) t[i] = rel[perm[i]];
            rel = t;
        }
    };
    remap(out.lhs);
    remap(out.rhs);
    return out;
}

inline Rule reverse_relations(const Rule& r) {
    Rule out = r;
    for (auto& rel : out.lhs) std::reverse(rel.begin(), rel.end());
    for (auto& rel : out.rhs) std::reverse(rel.begin(), rel.end());
    return out;
}

inline void permutations(std::size_t n, std::vector<std::vector<std::uint32_t>>& out) {
    std::vector<std::uint32_t> p(n);
    std::iota(p.begin(), p.end(), 0u);
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
}

} // namespace detail

inline SymmetryReport classify_symmetry(const Rule& rule) {
    SymmetryReport rep;
    Rule canon = canonical_rule(rule);
    rep.global_reversal_symmetric =
        canonical_rule(detail::reverse_relations(rule)) == canon;

    // position permutations for uniform-arity rules
    std::set<std::size_t> arities;
    for (auto& r : rule.lhs) arities.insert(r.size());
    for (auto& r : rule.rhs) arities.insert(r.size());
    if (arities.size() == 1) {
        std::size_t k = *arities.begin();
        if (k <= 6) {
            std::vector<std::vector<std::uint32_t>> perms;
            detail::permutations(k, perms);
            for (auto& p : perms)
                if (canonical_rule(detail::apply_position_perm(rule, p)) == canon)
                    rep.invariant_position_permutations.push_back(p);
            if (k == 3) {
                auto has = [&](std::initializer_list<std::uint32_t> img) {
                    std::vector<std::uint32_t> v(img);
                    for (auto& p : rep.invariant_position_permutations)
                        if (p == v) return true;
                    return false;
                };
                std::size_t order = rep.invariant_position_permutations.size();
                if (order == 6)
                    rep.ternary_class = TernaryClass::S3;
                else if (order == 3)
                    rep.ternary_class = TernaryClass::A3;
                else if (order == 2) {
                    if (has({0, 2, 1}))
                        rep.ternary_class = TernaryClass::S2_231;
                    else if (has({2, 1, 0}))
                        rep.ternary_class = TernaryClass::S2_321;
                    else
                        rep.ternary_class = TernaryClass::S2_213;
                } else {
                    rep.ternary_class = TernaryClass::None;
                }
            }
        }
    }

    // lhs automorphisms and invariant variable permutations
    auto lv = rule.lhs_variables();
    if (lv.size() <= 8) {
        std::vector<std::vector<std::uint32_t>> perms;
        detail::permutations(lv.size(), perms);
        std::vector<Relation> lhs_sorted = rule.lhs;
        std::sort(lhs_sorted.begin(), lhs_sorted.end());
        for (auto& p : perms) {
            std::unordered_map<Variable, Variable> m;
            for (std::size_t i = 0; i < lv.size(); ++i) m[lv[i]] = lv[p[i]];
            auto map_side = [&](const std::vector<Relation>& side) {
                std::vector<Relation> out = side;
                for (auto& rel : out)
                    for (auto& v : rel) {
                        auto it = m.find(v);
                        if (it != m.end()) v = it->second;
                    }
                return out;
            };
            std::vector<Variable> image(lv.size());
            for (std::size_t i = 0; i < lv.size(); ++i) image[i] = lv[p[i]];

            auto mapped_lhs = map_side(rule.lhs);
            std::sort(mapped_lhs.begin(), mapped_lhs.end());
            if (mapped_lhs == lhs_sorted) rep.lhs_automorphism_group.push_back(image);

            // Permuting variables on the lhs only: the rule as seen by a
            // permuted match. Outcomes coincide exactly when the canonical
            // form is unchanged. (A joint renaming would be vacuous.)
            Rule mapped{map_side(rule.lhs), rule.rhs};
            if (canonical_rule(mapped) == canon)
                rep.invariant_variable_permutations.push_back(image);
        }
    }
    return rep;
}

// ---- signature parsing -----------------------------------------------------

inline RuleSignature parse_rule_signature(const std::string& text) {
    auto pos = text.find("->");
    if (pos == std::string::npos) throw ParseError("expected '->' in rule signature", 0);
    return {parse_signature(text.substr(0, pos)), parse_signature(text.substr(pos + 2))};
}

} // namespace hyperforge

#endif
