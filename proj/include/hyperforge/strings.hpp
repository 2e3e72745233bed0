#ifndef HYPERFORGE_STRINGS_HPP
#define HYPERFORGE_STRINGS_HPP

#include <hyperforge/common.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace hyperforge {

// One transformation: pattern -> replacement. Patterns may be empty (an
// insertion rule); replacements may be empty (a deletion rule).
struct StringRule {
    std::string pattern;
    std::string replacement;
    bool operator==(const StringRule& o) const {
        return pattern == o.pattern && replacement == o.replacement;
    }
    bool operator<(const StringRule& o) const {
        if (pattern != o.pattern) return pattern < o.pattern;
        return replacement < o.replacement;
    }
};

using StringRuleSet = std::vector<StringRule>;

// Grammar: `A -> BBB ; BB -> A`; the empty string is written `()`.
inline StringRuleSet parse_string_rules(const std::string& text) {
    StringRuleSet out;
    std::size_t start = 0;
    auto trim = [](std::string s) {
        std::size_t b = s.find_first_not_of(" \t\r\n");
        std::size_t e = s.find_last_not_of(" \t\r\n");
        if (b == std::string::npos) return std::string();
        return s.substr(b, e - b + 1);
    };
    auto decode = [&](std::string s, std::size_t at) {
        s = trim(s);
        if (s == "()") return std::string();
        for (char c : s)
            if (!std::isupper(static_cast<unsigned char>(c)))
                throw ParseError("string rules use uppercase symbols", at);
        return s;
    };
    while (start <= text.size()) {
        std::size_t semi = text.find(';', start);
        std::string part = text.substr(start, semi == std::string::npos ? std::string::npos
                                                                        : semi - start);
        std::size_t arrow = part.find("->");
        if (arrow == std::string::npos) throw ParseError("expected '->' in string rule", start);
        StringRule r;
        r.pattern = decode(part.substr(0, arrow), start);
        r.replacement = decode(part.substr(arrow + 2), start + arrow + 2);
        out.push_back(std::move(r));
        if (semi == std::string::npos) break;
        start = semi + 1;
    }
    if (out.empty()) throw SemanticError("empty string rule set");
    return out;
}

inline std::string to_string(const StringRuleSet& rs) {
    std::string out;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        if (i) out += " ; ";
        out += (rs[i].pattern.empty() ? "()" : rs[i].pattern) + " -> " +
               (rs[i].replacement.empty() ? "()" : rs[i].replacement);
    }
    return out;
}

struct StringMatch {
    std::uint32_t rule_index;
    std::uint32_t offset;
};

// All (rule, offset) pairs, ordered by (offset, rule index). An empty pattern
// matches at every gap, including both ends.
inline std::vector<StringMatch> string_matches(const std::string& s, const StringRuleSet& rules) {
    std::vector<StringMatch> out;
    for (std::uint32_t o = 0; o <= s.size(); ++o) {
        for (std::uint32_t ri = 0; ri < rules.size(); ++ri) {
            const auto& pat = rules[ri].pattern;
            if (pat.empty()) {
                out.push_back({ri, o});
                continue;
            }
            if (o + pat.size() > s.size()) continue;
            if (s.compare(o, pat.size(), pat) == 0) out.push_back({ri, o});
        }
    }
    return out;
}

inline std::string apply_match(const std::string& s, const StringRuleSet& rules,
                               const StringMatch& m) {
    const auto& r = rules[m.rule_index];
    return s.substr(0, m.offset) + r.replacement + s.substr(m.offset + r.pattern.size());
}

enum class StringPolicy {
    Sequential,    // rule-major scan: for each rule in order, first occurrence
    MaxScan,       // one left-to-right pass; non-overlapping replacements
    PositionMajor, // position-major scan: at each offset try every rule
};

// One update step under a deterministic policy; MaxScan applies a maximal
// non-overlapping batch in a single pass, the other two a single event.
inline std::string apply_policy(const std::string& s, const StringRuleSet& rules,
                                StringPolicy policy) {
    switch (policy) {
    case StringPolicy::Sequential: {
        for (std::uint32_t ri = 0; ri < rules.size(); ++ri) {
            const auto& pat = rules[ri].pattern;
            if (pat.empty()) return apply_match(s, rules, {ri, 0});
            auto pos = s.find(pat);
            if (pos != std::string::npos)
                return apply_match(s, rules, {ri, static_cast<std::uint32_t>(pos)});
        }
        return s;
    }
    case StringPolicy::PositionMajor: {
        for (std::uint32_t o = 0; o <= s.size(); ++o)
            for (std::uint32_t ri = 0; ri < rules.size(); ++ri) {
                const auto& pat = rules[ri].pattern;
                if (pat.empty()) return apply_match(s, rules, {ri, o});
                if (o + pat.size() <= s.size() && s.compare(o, pat.size(), pat) == 0)
                    return apply_match(s, rules, {ri, o});
            }
        return s;
    }
    case StringPolicy::MaxScan: {
        std::string out;
        std::size_t i = 0;
        while (i < s.size()) {
            bool applied = false;
            for (std::uint32_t ri = 0; ri < rules.size() && !applied; ++ri) {
                const auto& pat = rules[ri].pattern;
                if (pat.empty()) continue; // insertions have no scan anchor
                if (i + pat.size() <= s.size() && s.compare(i, pat.size(), pat) == 0) {
                    out += rules[ri].replacement;
                    i += pat.size();
                    applied = true;
                }
            }
            if (!applied) out += s[i++];
        }
        return out;
    }
    }
    return s;
}

// All one-event successors (for multiway construction).
inline std::vector<std::string> successors_all(const std::string& s, const StringRuleSet& rules) {
    std::vector<std::string> out;
    for (auto& m : string_matches(s, rules)) out.push_back(apply_match(s, rules, m));
    return out;
}

// ---- token-level traces ------------------------------------------------------

using TokenId = std::uint32_t;

struct StringEvent {
    std::uint32_t rule_index = 0;
    std::uint32_t step = 0;
    std::uint32_t position = 0; // leftmost consumed position at event time
    std::vector<TokenId> consumed;
    std::vector<TokenId> produced;
};

struct TokenInfo {
    char symbol;
    int creator = -1;
    int consumer = -1;
    std::uint32_t created_step = 0;
};

struct StringTrace {
    std::string initial;
    StringRuleSet rules;
    std::vector<TokenInfo> tokens;
    std::vector<StringEvent> events;
    std::vector<std::vector<TokenId>> states; // token sequence after each step
    std::uint32_t steps_run = 0;
    bool reached_fixed_point = false;

    std::string state_string(std::uint32_t step) const {
        std::string out;
        for (auto id : states[step]) out += tokens[id].symbol;
        return out;
    }
    std::string final_string() const { return state_string(steps_run); }
};

// Evolves with token lineage: every replacement consumes its span and creates
// fresh tokens.
inline StringTrace evolve_string(const std::string& init, const StringRuleSet& rules,
                                 StringPolicy policy, std::uint32_t max_steps,
                                 std::size_t length_cap = 1000000) {
    StringTrace tr;
    tr.initial = init;
    tr.rules = rules;
    std::vector<TokenId> seq;
    for (char c : init) {
        seq.push_back(static_cast<TokenId>(tr.tokens.size()));
        tr.tokens.push_back({c, -1, -1, 0});
    }
    tr.states.push_back(seq);

    auto apply_at = [&](const StringMatch& m, std::uint32_t step) {
        const auto& rule = rules[m.rule_index];
        StringEvent ev;
        ev.rule_index = m.rule_index;
        ev.step = step;
        ev.position = m.offset;
        int ei = static_cast<int>(tr.events.size());
        for (std::size_t i = 0; i < rule.pattern.size(); ++i) {
            TokenId id = seq[m.offset + i];
            ev.consumed.push_back(id);
            tr.tokens[id].consumer = ei;
        }
        std::vector<TokenId> fresh;
        for (char c : rule.replacement) {
            TokenId id = static_cast<TokenId>(tr.tokens.size());
            tr.tokens.push_back({c, ei, -1, step});
            fresh.push_back(id);
        }
        ev.produced = fresh;
        seq.erase(seq.begin() + m.offset, seq.begin() + m.offset + rule.pattern.size());
        seq.insert(seq.begin() + m.offset, fresh.begin(), fresh.end());
        tr.events.push_back(std::move(ev));
    };

    for (std::uint32_t step = 1; step <= max_steps; ++step) {
        std::string cur = tr.state_string(step - 1);
        bool any = false;
        if (policy == StringPolicy::MaxScan) {
            // single pass, non-overlapping, leftmost; apply right-to-left so
            // recorded offsets stay valid during splicing
            std::vector<StringMatch> batch;
            std::size_t i = 0;
            while (i < cur.size()) {
                bool applied = false;
                for (std::uint32_t ri = 0; ri < rules.size() && !applied; ++ri) {
                    const auto& pat = rules[ri].pattern;
                    if (pat.empty()) continue;
                    if (i + pat.size() <= cur.size() && cur.compare(i, pat.size(), pat) == 0) {
                        batch.push_back({ri, static_cast<std::uint32_t>(i)});
                        i += pat.size();
                        applied = true;
                    }
                }
                if (!applied) ++i;
            }
            for (auto it = batch.rbegin(); it != batch.rend(); ++it) apply_at(*it, step);
            any = !batch.empty();
        } else {
            StringMatch chosen{0, 0};
            bool found = false;
            if (policy == StringPolicy::Sequential) {
                for (std::uint32_t ri = 0; ri < rules.size() && !found; ++ri) {
                    const auto& pat = rules[ri].pattern;
                    if (pat.empty()) {
                        chosen = {ri, 0};
                        found = true;
                        break;
                    }
                    auto pos = cur.find(pat);
                    if (pos != std::string::npos) {
                        chosen = {ri, static_cast<std::uint32_t>(pos)};
                        found = true;
                    }
                }
            } else {
                for (std::uint32_t o = 0; o <= cur.size() && !found; ++o)
                    for (std::uint32_t ri = 0; ri < rules.size() && !found; ++ri) {
                        const auto& pat = rules[ri].pattern;
                        if (pat.empty() || (o + pat.size() <= cur.size() &&
                                            cur.compare(o, pat.size(), pat) == 0)) {
                            chosen = {ri, o};
                            found = true;
                        }
                    }
            }
            if (found) {
                apply_at(chosen, step);
                any = true;
            }
        }
        if (!any) {
            tr.reached_fixed_point = true;
            break;
        }
        tr.states.push_back(seq);
        tr.steps_run = step;
        if (seq.size() > length_cap) throw ResourceLimit("evolve_string: length cap exceeded");
    }
    return tr;
}

// ---- overlaps and combinatorics ---------------------------------------------

// Placements of b against a (offset of b relative to a) whose intersection is
// nonempty and agrees symbolwise; the identical placement of a string with
// itself is excluded.
inline std::vector<int> overlaps(const std::string& a, const std::string& b) {
    std::vector<int> out;
    if (a.empty() || b.empty()) return out;
    for (int o = -static_cast<int>(b.size()) + 1; o < static_cast<int>(a.size()); ++o) {
        if (a == b && o == 0) continue;
        bool ok = true, any = false;
        for (std::size_t i = 0; i < b.size(); ++i) {
            int pos = o + static_cast<int>(i);
            if (pos < 0 || pos >= static_cast<int>(a.size())) continue;
            any = true;
            if (a[static_cast<std::size_t>(pos)] != b[i]) {
                ok = false;
                break;
            }
        }
        if (ok && any) out.push_back(o);
    }
    return out;
}

inline bool self_nonoverlapping(const std::string& s) { return overlaps(s, s).empty(); }

inline bool set_nonoverlapping(const std::vector<std::string>& set) {
    for (std::size_t i = 0; i < set.size(); ++i)
        for (std::size_t j = i; j < set.size(); ++j)
            if (!overlaps(set[i], set[j]).empty()) return false;
    return true;
}

// a[0]=1; a[n] = k a[n-1] - (n even ? a[n/2] : 0): count of length-n strings
// over k symbols that do not overlap themselves.
inline std::uint64_t count_nonoverlapping(std::uint32_t n, std::uint32_t k) {
    std::vector<std::uint64_t> a(n + 1);
    a[0] = 1;
    for (std::uint32_t i = 1; i <= n; ++i) {
        a[i] = k * a[i - 1];
        if (i % 2 == 0) a[i] -= a[i / 2];
    }
    return a[n];
}

inline double nonoverlapping_fraction(std::uint32_t n, std::uint32_t k) {
    double p = 1.0;
    for (std::uint32_t i = 0; i < n; ++i) p *= k;
    return static_cast<double>(count_nonoverlapping(n, k)) / p;
}

// Number of multisets of s strings of length exactly n (k-symbol alphabet)
// that allow no overlaps with themselves or each other.
inline std::uint64_t count_nonoverlapping_sets(std::uint32_t n, std::uint32_t s,
                                               std::uint32_t k = 2) {
    std::vector<std::string> pool;
    std::vector<std::string> frontier{""};
    for (std::uint32_t len = 1; len <= n; ++len) {
        std::vector<std::string> next;
        for (auto& p : frontier)
            for (std::uint32_t c = 0; c < k; ++c) next.push_back(p + static_cast<char>('A' + c));
        frontier = next;
    }
    for (auto& w : frontier)
        if (self_nonoverlapping(w)) pool.push_back(w);

    // multisets over the pool; repeated members are fine (their only mutual
    // placements are self-overlaps, which pool membership already excludes)
    std::uint64_t count = 0;
    std::vector<std::size_t> pick;
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
        if (pick.size() == s) {
            ++count;
            return;
        }
        for (std::size_t i = from; i < pool.size(); ++i) {
            bool ok = true;
            for (auto j : pick)
                if (j != i && !overlaps(pool[j], pool[i]).empty()) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            pick.push_back(i);
            rec(i);
            pick.pop_back();
        }
    };
    rec(0);
    return count;
}

// ---- rule-space counting -----------------------------------------------------

struct StringSignature {
    std::uint32_t alphabet = 2;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> shape; // (lhs len, rhs len)
};

// One representative per equivalence class of ordered rule lists under symbol
// renaming and simultaneous reversal: the lexicographically least image.
inline std::vector<StringRuleSet> enumerate_string_rules(const StringSignature& sig) {
    std::uint32_t k = sig.alphabet;
    std::vector<std::vector<std::uint32_t>> perms;
    {
        std::vector<std::uint32_t> p(k);
        for (std::uint32_t i = 0; i < k; ++i) p[i] = i;
        do {
            perms.push_back(p);
        } while (std::next_permutation(p.begin(), p.end()));
    }
    auto canonical = [&](const StringRuleSet& rs) {
        StringRuleSet best = rs;
        for (auto& sigma : perms) {
            for (int rev = 0; rev < 2; ++rev) {
                StringRuleSet img = rs;
                for (auto& r : img) {
                    auto map = [&](std::string s) {
                        if (rev) std::reverse(s.begin(), s.end());
                        for (auto& c : s)
                            c = static_cast<char>('A' + sigma[static_cast<std::uint32_t>(c - 'A')]);
                        return s;
                    };
                    r = {map(r.pattern), map(r.replacement)};
                }
                if (img < best) best = img;
            }
        }
        return best;
    };
    std::vector<StringRuleSet> out;
    // enumerate raw assignments slot by slot
    std::vector<std::uint32_t> lengths;
    for (auto& [p, q] : sig.shape) {
        lengths.push_back(p);
        lengths.push_back(q);
    }
    std::size_t total = 0;
    for (auto l : lengths) total += l;
    std::vector<std::uint32_t> symbol(total, 0);
    std::set<StringRuleSet> seen;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == total) {
            StringRuleSet rs;
            std::size_t pos = 0;
            for (auto& [p, q] : sig.shape) {
                StringRule r;
                for (std::uint32_t c = 0; c < p; ++c)
                    r.pattern += static_cast<char>('A' + symbol[pos++]);
                for (std::uint32_t c = 0; c < q; ++c)
                    r.replacement += static_cast<char>('A' + symbol[pos++]);
                rs.push_back(r);
            }
            auto canon = canonical(rs);
            if (canon == rs && seen.insert(canon).second) out.push_back(canon);
            return;
        }
        for (std::uint32_t c = 0; c < k; ++c) {
            symbol[i] = c;
            rec(i + 1);
        }
    };
    rec(0);
    return out;
}

// Inequivalent ordered rule lists under symbol renaming and simultaneous
// reversal of every side (Burnside count over S_k x {id, reverse}).
inline std::uint64_t count_string_rules(const StringSignature& sig) {
    std::uint32_t k = sig.alphabet;
    std::vector<std::vector<std::uint32_t>> perms;
    {
        std::vector<std::uint32_t> p(k);
        for (std::uint32_t i = 0; i < k; ++i) p[i] = i;
        do {
            perms.push_back(p);
        } while (std::next_permutation(p.begin(), p.end()));
    }
    auto fixed_strings = [&](const std::vector<std::uint32_t>& sigma, bool rev,
                             std::uint32_t len) -> std::uint64_t {
        std::uint32_t fix = 0, fix2 = 0;
        for (std::uint32_t i = 0; i < k; ++i) {
            if (sigma[i] == i) ++fix;
            if (sigma[sigma[i]] == i) ++fix2;
        }
        if (!rev) {
            std::uint64_t r = 1;
            for (std::uint32_t i = 0; i < len; ++i) r *= fix;
            return r;
        }
        // s = sigma(reverse(s)): each mirror pair needs s[i] in Fix(sigma^2)
        // with the partner determined; an odd middle needs sigma(c) = c.
        std::uint64_t r = 1;
        for (std::uint32_t i = 0; i < len / 2; ++i) r *= fix2;
        if (len % 2 == 1) r *= fix;
        return r;
    };
    std::uint64_t total = 0;
    for (auto& sigma : perms) {
        for (int rev = 0; rev < 2; ++rev) {
            std::uint64_t fixed = 1;
            for (auto& [p, q] : sig.shape)
                fixed *= fixed_strings(sigma, rev, p) * fixed_strings(sigma, rev, q);
            total += fixed;
        }
    }
    return total / (static_cast<std::uint64_t>(perms.size()) * 2);
}

} // namespace hyperforge

#endif
