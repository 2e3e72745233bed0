#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <hyperforge/rules.hpp>

#include <set>

using namespace hyperforge;

TEST_CASE("parse rules") {
    auto rs = parse_rules("{{x,y}} -> {{x,y},{y,z}}");
    REQUIRE(rs.size() == 1);
    CHECK(RuleSignature::of(rs[0]).str() == "1_2 -> 2_2");
    CHECK(rs[0].fresh_variables().size() == 1);

    auto self_loop = parse_rules("{{x,x}} -> {{y,y},{y,y},{x,y}}");
    CHECK(self_loop[0].lhs == std::vector<Relation>{{1, 1}});
    CHECK(self_loop[0].rhs.size() == 3);

    CHECK_THROWS_AS(parse_rules("{{x,y}} ->"), ParseError);
    CHECK_THROWS_AS(parse_rules("{} -> {{x,y}}"), SemanticError);

    auto multi = parse_rules("{{x,y},{x,z}} -> {{x,z},{x,w},{y,w},{z,w}} ; {{a}} -> {{a},{a}}");
    CHECK(multi.size() == 2);

    // integers as variables
    auto nums = parse_rules("{{1,1,2},{3,4}} -> {{2,2,4},{1,5,4},{2,2},{3,1}}");
    CHECK(RuleSignature::of(nums[0]).str() == "1_3 1_2 -> 2_3 2_2");
}

TEST_CASE("canonical rule reproduces the worked mixed-arity form") {
    auto first = parse_rule_single("{{1,1},{2,4,5},{7,5}} -> {{3,8},{2,7},{5,4,1},{4,6},{5,1,7}}");
    auto second = parse_rule_single("{{7,3},{4,4},{8,5,3}} -> {{3,4,7},{5,6},{8,7},{3,5,4},{1,2}}");
    auto expected =
        parse_rule_single("{{1,2,3},{4,4},{5,3}} -> {{3,2,4},{3,4,5},{1,5},{2,6},{7,8}}");
    CHECK(canonical_rule(first) == expected);
    CHECK(canonical_rule(second) == expected);
    CHECK(canonical_rule(expected) == expected); // idempotent
}

TEST_CASE("canonical rule is invariant under variable permutation") {
    SplitMix64 rng(11);
    std::vector<std::string> fixtures = {
        "{{x,y},{x,z}} -> {{x,z},{x,w},{y,w},{z,w}}",
        "{{x,x,y}} -> {{y,y,y},{x,y,z}}",
        "{{a,b},{c,b}} -> {{a,a},{b,b},{c,d}}",
    };
    for (auto& f : fixtures) {
        auto r = parse_rule_single(f);
        auto canon = canonical_rule(r);
        auto vars = r.all_variables();
        std::vector<Variable> perm = vars;
        for (int t = 0; t < 200; ++t) {
            rng.shuffle(perm);
            std::unordered_map<Variable, Variable> m;
            for (std::size_t i = 0; i < vars.size(); ++i) m[vars[i]] = perm[i] + 50;
            Rule mapped = r;
            for (auto* side : {&mapped.lhs, &mapped.rhs})
                for (auto& rel : *side)
                    for (auto& v : rel) v = m[v];
            rng.shuffle(mapped.lhs);
            rng.shuffle(mapped.rhs);
            CHECK(canonical_rule(mapped) == canon);
        }
    }
}

TEST_CASE("canonical rule flat has successive integers") {
    auto r = canonical_rule(
        parse_rule_single("{{p,q},{q,r}} -> {{w,r},{w,r},{p,w},{q,r}}"));
    auto flat = rule_flat(r);
    std::uint32_t seen = 0;
    for (auto v : flat) {
        CHECK(v <= seen + 1);
        seen = std::max(seen, v);
    }
}

TEST_CASE("rgs rank basics") {
    CHECK(rgs_rank({1, 1, 1, 1}) == 0);
    CHECK(rgs_unrank(4, 0) == std::vector<std::uint32_t>{1, 1, 1, 1});
    CHECK(bell_number(4) == 15);
    CHECK(bell_number(6) == 203);
    CHECK(bell_number(8) == 4140);
    // last sequence of length 4 is 1,2,3,4
    CHECK(rgs_unrank(4, 14) == std::vector<std::uint32_t>{1, 2, 3, 4});
    for (std::uint64_t k = 0; k < 15; ++k) CHECK(rgs_rank(rgs_unrank(4, k)) == k);
    CHECK_THROWS_AS(rgs_unrank(4, 15), OutOfRange);
}

TEST_CASE("rule rank round trip") {
    RuleSignature sig = parse_rule_signature("1_2->2_2");
    auto rules = enumerate_rules(sig, false);
    CHECK(rules.size() == 117);
    for (auto& r : rules) {
        auto rank = rule_rank(r);
        CHECK(rule_unrank(sig, rank) == r);
    }

    // ranking is injective over canonical 1_2->1_2 rules
    auto small = enumerate_rules(parse_rule_signature("1_2->1_2"), true);
    CHECK(small.size() == 11);
    std::set<std::uint64_t> ranks;
    for (auto& r : small) ranks.insert(rule_rank(r));
    CHECK(ranks.size() == 11);
}

TEST_CASE("rule enumeration counts") {
    CHECK(enumerate_rules(parse_rule_signature("1_2->1_2"), true).size() == 11);
    CHECK(enumerate_rules(parse_rule_signature("1_2->2_2"), true).size() == 73);
    CHECK(enumerate_rules(parse_rule_signature("2_2->1_2"), true).size() == 64);
    CHECK(enumerate_rules(parse_rule_signature("2_2->2_2"), true).size() == 562);
    CHECK(enumerate_rules(parse_rule_signature("2_2->2_2"), false).size() == 1252);
    CHECK(enumerate_rules(parse_rule_signature("1_1->2_1"), true).size() == 1);
    CHECK(enumerate_rules(parse_rule_signature("1_1->2_1"), false).size() == 4);
    CHECK(enumerate_rules(parse_rule_signature("1_3->1_3"), true).size() == 178);
}

TEST_CASE("rule count estimates") {
    CHECK(estimate_rule_count(parse_rule_signature("1_1->2_1")) == doctest::Approx(2.5));
    CHECK(estimate_rule_count(parse_rule_signature("1_2->2_2")) == doctest::Approx(101.5));
    CHECK(estimate_rule_count(parse_rule_signature("2_2->2_2")) == doctest::Approx(1035.0));
    // estimate is a lower bound on the unconstrained count
    for (auto s : {"1_2->1_2", "1_2->2_2", "2_2->2_2", "1_1->2_1"}) {
        auto sig = parse_rule_signature(s);
        CHECK(estimate_rule_count(sig) <=
              static_cast<double>(enumerate_rules(sig, false).size()) + 0.5);
    }
}

TEST_CASE("symmetry classification") {
    // reversal-invariant ternary rule
    auto sym = parse_rule_single("{{1,2,3},{3,4,5}} -> {{6,7,1},{6,3,8},{5,7,8}}");
    CHECK(classify_symmetry(sym).global_reversal_symmetric);

    auto asym = parse_rule_single("{{1,2,3},{2,4,5}} -> {{5,6,4},{6,5,3},{7,8,5}}");
    CHECK_FALSE(classify_symmetry(asym).global_reversal_symmetric);

    // worked variable-permutation example
    auto rep = classify_symmetry(parse_rule_single("{{x,y},{z,y}} -> {{x,x},{y,y},{z,w}}"));
    // variables x=1,y=2,z=3; invariant images of (x,y,z)
    std::set<std::vector<Variable>> got(rep.invariant_variable_permutations.begin(),
                                        rep.invariant_variable_permutations.end());
    std::set<std::vector<Variable>> expect = {
        {1, 2, 3}, {2, 1, 3}, {3, 1, 2}, {3, 2, 1}};
    CHECK(got == expect);

    // identity is always present
    for (auto s : {"{{x,y}} -> {{x,y},{y,z}}", "{{x,y},{x,z}} -> {{x,z},{x,w},{y,w},{z,w}}"}) {
        auto r = classify_symmetry(parse_rule_single(s));
        bool has_id = false;
        for (auto& p : r.invariant_variable_permutations) {
            bool id = true;
            auto vars = parse_rule_single(s).lhs_variables();
            for (std::size_t i = 0; i < p.size(); ++i)
                if (p[i] != vars[i]) id = false;
            if (id) has_id = true;
        }
        CHECK(has_id);
        bool aut_id = !r.lhs_automorphism_group.empty();
        CHECK(aut_id);
    }
}

TEST_CASE("reversal census small") {
    auto rules = enumerate_rules(parse_rule_signature("1_2->2_2"), true);
    int symmetric = 0;
    for (auto& r : rules)
        if (classify_symmetry(r).global_reversal_symmetric) ++symmetric;
    CHECK(symmetric == 11);
}

TEST_CASE("ternary symmetry census 1_3->1_3") {
    auto rules = enumerate_rules(parse_rule_signature("1_3->1_3"), true);
    REQUIRE(rules.size() == 178);
    std::map<TernaryClass, int> census;
    for (auto& r : rules) census[classify_symmetry(r).ternary_class]++;
    CHECK(census[TernaryClass::None] == 114);
    CHECK(census[TernaryClass::S2_231] == 20);
    CHECK(census[TernaryClass::S2_321] == 20);
    CHECK(census[TernaryClass::S2_213] == 20);
    CHECK(census[TernaryClass::A3] == 2);
    CHECK(census[TernaryClass::S3] == 2);
}

TEST_CASE("resource limits") {
    RuleSignature sig = parse_rule_signature("3_3->3_3");
    CHECK_THROWS_AS(enumerate_rules(sig, true), ResourceLimit);
}
