#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <hyperforge/hypergraph.hpp>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

using namespace hyperforge;

namespace {

// Independent oracle: minimum presentation over every relation ordering that
// respects the (arity desc, pattern asc) group order, with first-occurrence
// renaming applied to the flattened sequence. Exponential; test sizes only.
std::vector<std::uint32_t> oracle_canonical_flat(const Hypergraph& h) {
    std::vector<std::size_t> idx(h.relations.size());
    std::iota(idx.begin(), idx.end(), 0u);
    auto group_key = [&](std::size_t i) {
        return std::make_pair(-static_cast<int>(h.relations[i].size()),
                              detail::tuple_pattern(h.relations[i]));
    };
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return group_key(a) < group_key(b); });
    std::vector<std::uint32_t> best;
    bool has_best = false;
    do {
        bool ordered = true;
        for (std::size_t i = 1; i < idx.size(); ++i)
            if (group_key(idx[i - 1]) > group_key(idx[i])) {
                ordered = false;
                break;
            }
        if (!ordered) continue;
        std::map<ElementId, std::uint32_t> naming;
        std::vector<std::uint32_t> flat;
        for (auto i : idx)
            for (auto e : h.relations[i]) {
                auto it = naming.find(e);
                if (it == naming.end())
                    it = naming.emplace(e, static_cast<std::uint32_t>(naming.size()) + 1).first;
                flat.push_back(it->second);
            }
        if (!has_best || flat < best) {
            best = flat;
            has_best = true;
        }
    } while (std::next_permutation(idx.begin(), idx.end()));
    return best;
}

Hypergraph relabeled(const Hypergraph& h, SplitMix64& rng) {
    auto els = h.elements();
    std::vector<ElementId> target(els.size());
    std::iota(target.begin(), target.end(), 100u);
    rng.shuffle(target);
    std::unordered_map<ElementId, ElementId> m;
    for (std::size_t i = 0; i < els.size(); ++i) m[els[i]] = target[i];
    Hypergraph out = h;
    for (auto& r : out.relations)
        for (auto& e : r) e = m[e];
    rng.shuffle(out.relations);
    return out;
}

} // namespace

TEST_CASE("signature") {
    CHECK(signature(Hypergraph{}).str() == "empty");
    CHECK(signature(parse_hypergraph("{{1,2},{1,3}}")).str() == "2_2");
    CHECK(signature(parse_hypergraph("{{1,1,2},{3,4}}")).str() == "1_3 1_2");
}

TEST_CASE("weak connectivity") {
    CHECK(is_connected(parse_hypergraph("{{1,2},{2,3}}")));
    CHECK_FALSE(is_connected(parse_hypergraph("{{1,2},{3,4}}")));
    CHECK(is_connected(parse_hypergraph("{{1,2},{1,3}}")));
    CHECK(is_connected(Hypergraph{}));
    CHECK(is_connected(parse_hypergraph("{{1},{1},{1,2}}")));
    CHECK_FALSE(is_connected(parse_hypergraph("{{1},{2}}")));
}

TEST_CASE("canonicalize basics") {
    auto c = canonicalize(parse_hypergraph("{{3,2,1}}"));
    CHECK(c.key.str() == "{{1,2,3}}");

    // two presentations of the same structure share a key
    auto a = parse_hypergraph("{{1,1},{2,4,5},{7,5}}");
    auto b = parse_hypergraph("{{7,3},{4,4},{8,5,3}}");
    CHECK(canonical_key(a) == canonical_key(b));
    CHECK(canonical_key(a).str() == "{{1,2,3},{4,4},{5,3}}");

    // idempotence
    auto again = canonicalize(canonical_key(a).to_hypergraph());
    CHECK(again.key == canonical_key(a));

    // empty
    CHECK(canonical_key(Hypergraph{}).flat.empty());
}

TEST_CASE("canonical key first-occurrence property") {
    SplitMix64 rng(7);
    std::vector<std::string> fixtures = {
        "{{1,2},{2,3},{3,1}}", "{{1,1},{1,2},{2,2}}", "{{1,2,3},{3,4},{4,4}}",
        "{{1,2},{1,2},{2,1}}", "{{5},{5,6},{6,7,5}}"};
    for (auto& f : fixtures) {
        auto key = canonical_key(parse_hypergraph(f));
        std::uint32_t seen = 0;
        for (auto v : key.flat) {
            CHECK(v >= 1);
            CHECK(v <= seen + 1);
            seen = std::max(seen, v);
        }
    }
}

TEST_CASE("canonicalize matches exhaustive oracle") {
    SplitMix64 rng(42);
    std::vector<std::string> fixtures = {
        "{{1,2},{1,3}}",
        "{{1,1},{2,2},{1,2}}",
        "{{1,2,3},{3,4},{4,4}}",
        "{{1,2},{2,3},{3,4},{4,1}}",
        "{{1,1,2},{2,2,1}}",
        "{{1,2},{1,2},{3,1},{2,3}}",
        "{{1},{2},{1,2},{2,1}}",
    };
    for (auto& f : fixtures) {
        auto h = parse_hypergraph(f);
        for (int trial = 0; trial < 40; ++trial) {
            auto g = relabeled(h, rng);
            CHECK(canonical_key(g).flat == oracle_canonical_flat(g));
            CHECK(canonical_key(g) == canonical_key(h));
        }
    }
}

TEST_CASE("canonicalize invariance under shuffles") {
    SplitMix64 rng(2024);
    std::vector<std::string> fixtures = {"{{1,2},{1,3},{2,3},{4,1}}", "{{1,1,1},{1,2,3},{3,4,4}}"};
    for (auto& f : fixtures) {
        auto h = parse_hypergraph(f);
        auto key = canonical_key(h);
        for (int trial = 0; trial < 1000; ++trial) CHECK(canonical_key(relabeled(h, rng)) == key);
    }
}

TEST_CASE("isomorphic") {
    CHECK(isomorphic(parse_hypergraph("{{1,2}}"), parse_hypergraph("{{5,9}}")));
    CHECK_FALSE(isomorphic(parse_hypergraph("{{1,2},{1,2}}"), parse_hypergraph("{{1,2}}")));
    CHECK_FALSE(isomorphic(parse_hypergraph("{{1,2},{2,3}}"), parse_hypergraph("{{1,2},{1,3}}")));

    // brute-force oracle over all bijections, up to 6 elements
    auto brute_iso = [](const Hypergraph& a, const Hypergraph& b) {
        auto ea = a.elements(), eb = b.elements();
        if (ea.size() != eb.size() || a.size() != b.size()) return false;
        std::vector<std::size_t> p(ea.size());
        std::iota(p.begin(), p.end(), 0u);
        std::vector<Relation> sb = b.relations;
        std::sort(sb.begin(), sb.end());
        do {
            std::unordered_map<ElementId, ElementId> m;
            for (std::size_t i = 0; i < ea.size(); ++i) m[ea[i]] = eb[p[i]];
            std::vector<Relation> sa = a.relations;
            for (auto& r : sa)
                for (auto& e : r) e = m[e];
            std::sort(sa.begin(), sa.end());
            if (sa == sb) return true;
        } while (std::next_permutation(p.begin(), p.end()));
        return false;
    };

    SplitMix64 rng(5);
    std::vector<Hypergraph> pool;
    for (auto s : {"{{1,2},{2,3}}", "{{1,2},{1,3}}", "{{1,1},{2,2},{1,2}}", "{{1,2},{2,1}}",
                   "{{1,2,3},{3,2,1}}", "{{1,2},{2,3},{3,1}}", "{{1,2},{2,3},{1,3}}"})
        pool.push_back(parse_hypergraph(s));
    for (std::size_t i = 0; i < pool.size(); ++i)
        for (std::size_t j = 0; j < pool.size(); ++j) {
            auto shuffled = relabeled(pool[j], rng);
            CHECK(isomorphic(pool[i], shuffled) == brute_iso(pool[i], shuffled));
        }
}

TEST_CASE("enumerate hypergraphs: tiny signatures against printed forms") {
    auto ones = enumerate_hypergraphs(parse_signature("1_2"), false);
    REQUIRE(ones.size() == 2);
    CHECK(to_string(ones[0]) == "{{1,1}}");
    CHECK(to_string(ones[1]) == "{{1,2}}");

    auto two2 = enumerate_hypergraphs(parse_signature("2_2"), true);
    REQUIRE(two2.size() == 8);
    std::vector<std::string> got;
    for (auto& h : two2) got.push_back(to_string(h));
    std::vector<std::string> expect = {"{{1,1},{1,1}}", "{{1,1},{1,2}}", "{{1,1},{2,1}}",
                                       "{{1,2},{1,2}}", "{{1,2},{2,1}}", "{{1,2},{1,3}}",
                                       "{{1,2},{2,3}}", "{{1,2},{3,2}}"};
    std::sort(got.begin(), got.end());
    std::sort(expect.begin(), expect.end());
    CHECK(got == expect);

    auto one3 = enumerate_hypergraphs(parse_signature("1_3"), false);
    REQUIRE(one3.size() == 5);
    std::vector<std::string> got3;
    for (auto& h : one3) got3.push_back(to_string(h));
    std::vector<std::string> expect3 = {"{{1,1,1}}", "{{1,1,2}}", "{{1,2,1}}", "{{1,2,2}}",
                                        "{{1,2,3}}"};
    std::sort(got3.begin(), got3.end());
    std::sort(expect3.begin(), expect3.end());
    CHECK(got3 == expect3);
}

TEST_CASE("enumerate hypergraphs: connected counts") {
    CHECK(enumerate_hypergraphs(parse_signature("3_2"), true).size() == 32);
    CHECK(enumerate_hypergraphs(parse_signature("1_4"), true).size() == 15);
    CHECK(enumerate_hypergraphs(parse_signature("1_5"), true).size() == 52);
    CHECK(enumerate_hypergraphs(parse_signature("2_3"), true).size() == 102);
}

TEST_CASE("enumeration output is canonical and duplicate-free") {
    auto all = enumerate_hypergraphs(parse_signature("3_2"), false);
    std::set<std::string> keys;
    for (auto& h : all) {
        auto c = canonicalize(h);
        CHECK(to_string(c.key.to_hypergraph()) == to_string(h));
        keys.insert(c.key.str());
    }
    CHECK(keys.size() == all.size());
}

TEST_CASE("resource limit") {
    Hypergraph big;
    for (ElementId i = 0; i < 70; ++i) big.relations.push_back({i, i + 1});
    CHECK_THROWS_AS(canonicalize(big), ResourceLimit);
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(parse_hypergraph("{{1,2}"), ParseError);
    CHECK_THROWS_AS(parse_hypergraph("{{1,,2}}"), ParseError);
    CHECK(parse_hypergraph("{}").empty());
    CHECK(to_string(parse_hypergraph(" { { 1 , 2 } , { 2 , 3 } } ")) == "{{1,2},{2,3}}");
}
