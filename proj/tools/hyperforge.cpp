// Command-line surface for the rewriting toolkit: evolution, multiway and
// causal analysis, causal-invariance testing, rule-space enumeration, and
// geometry estimators. Outputs are deterministic for a fixed seed.

#include <hyperforge/graph_io.hpp>
#include <hyperforge/invariance.hpp>

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

using namespace hyperforge;

namespace {

struct Output {
    std::string path;
    void write(const std::string& text) const {
        if (path.empty() || path == "-") {
            std::cout << text;
            return;
        }
        std::ofstream os(path, std::ios::binary);
        if (!os) throw SemanticError("cannot open output file: " + path);
        os << text;
    }
};

bool is_hypergraph_rules(const std::string& text) { return text.find('{') != std::string::npos; }

Hypergraph parse_init_hypergraph(const std::string& text) {
    if (text.rfind("selfloops", 0) == 0) {
        std::istringstream is(text.substr(9));
        std::uint32_t n = 0, k = 0;
        is >> n >> k;
        if (!n || !k) throw SemanticError("selfloops expects: selfloops N K");
        return self_loops(n, k);
    }
    return parse_hypergraph(text);
}

std::string decode_string_state(const std::string& text) {
    if (text == "()") return "";
    return text;
}

UpdatePolicy parse_policy(const std::string& text) {
    if (text == "standard") return UpdatePolicy::standard();
    if (text == "exhaust") return UpdatePolicy::exhaust();
    if (text.rfind("random:", 0) == 0)
        return UpdatePolicy::random(std::stoull(text.substr(7)));
    throw SemanticError("policy must be standard, exhaust or random:SEED");
}

StringPolicy parse_string_policy(const std::string& text) {
    if (text == "sequential") return StringPolicy::Sequential;
    if (text == "maxscan" || text == "standard") return StringPolicy::MaxScan;
    if (text == "positionmajor") return StringPolicy::PositionMajor;
    throw SemanticError("string policy must be sequential, maxscan or positionmajor");
}

std::string format_stats_line(std::uint32_t step, std::size_t relations, std::size_t elements) {
    std::ostringstream os;
    os << step << "," << relations << "," << elements << "\n";
    return os.str();
}

std::string rules_from_file(const std::string& path, std::size_t line_index) {
    std::ifstream is(path);
    if (!is) throw SemanticError("cannot open rules file: " + path);
    std::string line;
    std::size_t i = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (i == line_index) return line;
        ++i;
    }
    throw SemanticError("rules file has no line " + std::to_string(line_index));
}

std::vector<std::string> all_rule_lines(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw SemanticError("cannot open rules file: " + path);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(is, line))
        if (!line.empty()) out.push_back(line);
    return out;
}

DistanceGraph parse_reference(const std::string& spec) {
    auto split = [&](const std::string& s) {
        std::vector<std::string> parts;
        std::size_t start = 0;
        while (true) {
            auto colon = s.find(':', start);
            parts.push_back(s.substr(start, colon == std::string::npos ? std::string::npos
                                                                       : colon - start));
            if (colon == std::string::npos) break;
            start = colon + 1;
        }
        return parts;
    };
    auto p = split(spec);
    auto num = [&](std::size_t i) { return static_cast<std::uint32_t>(std::stoul(p.at(i))); };
    if (p[0] == "grid") return reference_grid(num(1), num(2), false);
    if (p[0] == "torus") return reference_grid(num(1), num(2), true);
    if (p[0] == "tree") return reference_tree(num(1), num(2));
    if (p[0] == "complete") return reference_complete(num(1));
    if (p[0] == "sierpinski")
        return reference_sierpinski(num(1), p.size() > 2 && p[2] == "tetrahedron"
                                                ? SierpinskiBase::Tetrahedron
                                                : SierpinskiBase::Triangle);
    if (p[0] == "sphere") return reference_geodesic_sphere(num(1));
    throw SemanticError("unknown reference graph: " + spec);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hyperforge: substitution-system evolution and analysis"};
    app.require_subcommand(1);

    std::string rules_text, rules_file, init_text, out_path, format = "dot";
    std::uint32_t steps = 8, layers = 6, jobs = 1;
    std::size_t rules_line = 0;

    // ---- evolve ----
    auto* evolve_cmd = app.add_subcommand("evolve", "run one evolution trace");
    std::string policy_text = "standard", emit = "stats";
    std::size_t relation_cap = kDefaultRelationCap;
    evolve_cmd->add_option("--rule,--rules", rules_text, "rule set");
    evolve_cmd->add_option("--rules-file", rules_file, "file with one rule set per line");
    evolve_cmd->add_option("--rules-line", rules_line, "line index into --rules-file");
    evolve_cmd->add_option("--init", init_text, "initial condition")->required();
    evolve_cmd->add_option("--steps", steps, "number of steps");
    evolve_cmd->add_option("--policy", policy_text, "standard | random:SEED | exhaust");
    evolve_cmd->add_option("--emit", emit, "state | trace | stats");
    evolve_cmd->add_option("--max-relations", relation_cap, "relation cap");
    evolve_cmd->add_option("--out", out_path, "output file");

    // ---- multiway ----
    auto* multiway_cmd = app.add_subcommand("multiway", "build a multiway graph");
    std::string mode_text = "states";
    std::size_t node_cap = kDefaultMultiwayNodeCap;
    bool generational_flag = false, weights_flag = false;
    multiway_cmd->add_option("--rule,--rules", rules_text, "rule set");
    multiway_cmd->add_option("--rules-file", rules_file, "file with one rule set per line");
    multiway_cmd->add_option("--rules-line", rules_line, "line index into --rules-file");
    multiway_cmd->add_option("--init", init_text, "initial condition")->required();
    multiway_cmd->add_option("--layers", layers, "layers to build");
    multiway_cmd->add_option("--mode", mode_text, "evolution | states");
    multiway_cmd->add_option("--node-cap", node_cap, "node cap");
    multiway_cmd->add_flag("--generational", generational_flag,
                           "generational multiway (strings)");
    multiway_cmd->add_flag("--weights", weights_flag, "annotate path weights");
    multiway_cmd->add_option("--emit", emit, "graph | counts");
    multiway_cmd->add_option("--format", format, "dot | graphml | json | csv");
    multiway_cmd->add_option("--out", out_path, "output file");

    // ---- causal ----
    auto* causal_cmd = app.add_subcommand("causal", "causal graph of a trace or multiway system");
    std::string trace_path, grid_spec;
    bool initial_event = false, multiway_flag = false, paths_check = false;
    std::uint32_t cone_from = 0;
    bool cone_flag = false;
    causal_cmd->add_option("--rule,--rules", rules_text, "rule set");
    causal_cmd->add_option("--init", init_text, "initial condition");
    causal_cmd->add_option("--steps", steps, "steps (trace mode)");
    causal_cmd->add_option("--layers", layers, "layers (multiway mode)");
    causal_cmd->add_option("--policy", policy_text, "standard | random:SEED (hypergraph traces)");
    causal_cmd->add_option("--trace", trace_path, "trace JSON file");
    causal_cmd->add_flag("--initial-event", initial_event, "add an initial pseudo-event");
    causal_cmd->add_flag("--multiway", multiway_flag, "multiway causal graph");
    causal_cmd->add_flag("--paths-isomorphic", paths_check,
                         "check all per-path causal graphs for isomorphism");
    causal_cmd->add_option("--grid", grid_spec, "reference directed grid d:n");
    causal_cmd->add_flag("--cones", cone_flag, "emit cone volume profile");
    causal_cmd->add_option("--cone-from", cone_from, "cone start event");
    causal_cmd->add_option("--emit", emit, "graph | loops | disconnection | cones");
    causal_cmd->add_option("--format", format, "dot | graphml | json | csv");
    causal_cmd->add_option("--out", out_path, "output file");

    // ---- boost ----
    auto* boost_cmd = app.add_subcommand("boost", "boosted foliation of a sorting-style trace");
    double beta = 0.0;
    boost_cmd->add_option("--rule,--rules", rules_text, "rule set (defaults to BA -> AB)");
    boost_cmd->add_option("--init", init_text, "initial string")->required();
    boost_cmd->add_option("--beta", beta, "boost velocity in (-1, 1)")->required();
    boost_cmd->add_option("--steps", steps, "maximum steps");
    boost_cmd->add_option("--out", out_path, "output file");

    // ---- branchial ----
    auto* branchial_cmd = app.add_subcommand("branchial", "branchial slices of a multiway system");
    std::uint32_t slice_index = 0, thickening = 0;
    bool slice_given = false;
    branchial_cmd->add_option("--rule,--rules", rules_text, "rule set");
    branchial_cmd->add_option("--init", init_text, "initial condition")->required();
    branchial_cmd->add_option("--layers", layers, "layers to build");
    branchial_cmd->add_option("--slice", slice_index, "slice to export")->each([&](std::string) {
        slice_given = true;
    });
    branchial_cmd->add_option("--thicken", thickening, "thickening depth");
    branchial_cmd->add_option("--emit", emit, "graph | counts");
    branchial_cmd->add_option("--format", format, "dot | graphml | json | csv");
    branchial_cmd->add_option("--out", out_path, "output file");

    // ---- ci ----
    auto* ci_cmd = app.add_subcommand("ci", "causal invariance via critical pairs");
    bool do_complete = false;
    std::uint32_t max_steps = kDefaultResolveSteps;
    std::string report = "table";
    ci_cmd->add_option("--rule,--rules", rules_text, "rule set");
    ci_cmd->add_option("--rules-file", rules_file, "census over one rule set per line");
    ci_cmd->add_flag("--complete", do_complete, "add bridging rules until the pairs resolve");
    ci_cmd->add_option("--max-steps", max_steps, "resolution search depth");
    ci_cmd->add_option("--node-cap", node_cap, "resolution node cap");
    ci_cmd->add_option("--report", report, "json | table");
    ci_cmd->add_option("--jobs", jobs, "parallel workers for census runs");
    ci_cmd->add_option("--out", out_path, "output file");

    // ---- enumerate ----
    auto* enum_cmd = app.add_subcommand("enumerate", "rule-space and state-space enumeration");
    std::string sig_text;
    bool left_connected_flag = false, connected_flag = false, count_only = false;
    bool symmetry_census = false, halting_census_flag = false, estimate_flag = false;
    std::uint32_t halting_cap = 20;
    enum_cmd->add_option("--sig", sig_text, "signature: '2_2->3_2' for rules, '2_2' for states")
        ->required();
    enum_cmd->add_flag("--left-connected", left_connected_flag, "left-connected rules only");
    enum_cmd->add_flag("--connected", connected_flag, "connected states only");
    enum_cmd->add_flag("--count", count_only, "print the count only");
    enum_cmd->add_flag("--estimate", estimate_flag, "Bell-number estimate");
    enum_cmd->add_flag("--symmetry-census", symmetry_census, "reversal/ternary symmetry census");
    enum_cmd->add_flag("--halting-census", halting_census_flag,
                       "halting statistics from self-loop initial conditions");
    enum_cmd->add_option("--step-cap", halting_cap, "halting census step cap");
    enum_cmd->add_option("--jobs", jobs, "parallel workers");
    enum_cmd->add_option("--out", out_path, "output file");

    // ---- analyze ----
    auto* analyze_cmd = app.add_subcommand("analyze", "geometry estimators");
    std::string what = "dimension", reference, window_text, sources_text = "0";
    double dim_hint = 2.0;
    std::uint32_t corr_r = 3, corr_s = 1;
    analyze_cmd->add_option("--what", what, "dimension | curvature | stats | correlation");
    analyze_cmd->add_option("--reference", reference,
                            "reference graph, e.g. torus:2:64, sierpinski:7, sphere:9");
    analyze_cmd->add_option("--rule,--rules", rules_text, "rule set to evolve instead");
    analyze_cmd->add_option("--init", init_text, "initial condition (with --rules)");
    analyze_cmd->add_option("--steps", steps, "steps (with --rules)");
    analyze_cmd->add_option("--window", window_text, "radius window a:b");
    analyze_cmd->add_option("--sources", sources_text, "all | corners | center | id[,id...]");
    analyze_cmd->add_option("--dim", dim_hint, "dimension hint for curvature fits");
    analyze_cmd->add_option("--r", corr_r, "ball radius for correlation");
    analyze_cmd->add_option("--s", corr_s, "separation for correlation");
    analyze_cmd->add_option("--out", out_path, "output file");

    // Flat key=value config files mirror the flags; explicit flags win. The
    // file is spliced in right after the subcommand name so later (explicit)
    // occurrences take precedence under the take-last policy.
    std::vector<std::string> args(argv + 1, argv + argc);
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
        if (args[i] != "--config") continue;
        std::ifstream is(args[i + 1]);
        if (!is) {
            std::cerr << "error[semantic]: cannot open config file: " << args[i + 1] << "\n";
            return 1;
        }
        args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
        std::vector<std::string> injected;
        std::string line;
        while (std::getline(is, line)) {
            auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            auto trim = [](std::string s) {
                auto b = s.find_first_not_of(" \t\r");
                auto e = s.find_last_not_of(" \t\r");
                return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
            };
            std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
            if (key.empty()) continue;
            injected.push_back("--" + key + "=" + value);
        }
        args.insert(args.begin() + 1, injected.begin(), injected.end());
        break;
    }
    for (auto* sub :
         {evolve_cmd, multiway_cmd, causal_cmd, boost_cmd, branchial_cmd, ci_cmd, enum_cmd,
          analyze_cmd}) {
        for (auto* opt : sub->get_options())
            if (opt->get_expected_max() == 1) opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }

    {
        std::vector<const char*> cargs;
        cargs.push_back(argv[0]);
        for (auto& a : args) cargs.push_back(a.c_str());
        try {
            app.parse(static_cast<int>(cargs.size()), cargs.data());
        } catch (const CLI::ParseError& e) {
            return app.exit(e);
        }
    }

    Output out{out_path};
    try {
        if (!rules_file.empty() && rules_text.empty() && !ci_cmd->parsed())
            rules_text = rules_from_file(rules_file, rules_line);

        if (evolve_cmd->parsed()) {
            if (is_hypergraph_rules(rules_text)) {
                auto rules = parse_rules(rules_text);
                auto init = parse_init_hypergraph(init_text);
                auto tr = evolve(init, rules, parse_policy(policy_text), steps, relation_cap);
                if (emit == "state") {
                    out.write(to_string(tr.final_state()) + "\n");
                } else if (emit == "trace") {
                    out.write(trace_to_json(tr).dump(2) + "\n");
                } else {
                    std::string text = "step,relations,elements\n";
                    for (std::uint32_t s = 0; s <= tr.steps_run; ++s) {
                        auto h = tr.state_at(s);
                        text += format_stats_line(s, h.size(), h.elements().size());
                    }
                    out.write(text);
                }
            } else {
                auto rules = parse_string_rules(rules_text);
                auto tr = evolve_string(decode_string_state(init_text), rules,
                                        parse_string_policy(policy_text), steps, relation_cap);
                if (emit == "state") {
                    out.write(tr.final_string() + "\n");
                } else {
                    std::string text = "step,length,string\n";
                    for (std::uint32_t s = 0; s <= tr.steps_run; ++s) {
                        auto str = tr.state_string(s);
                        text += std::to_string(s) + "," + std::to_string(str.size()) + "," +
                                str + "\n";
                    }
                    out.write(text);
                }
            }
        } else if (multiway_cmd->parsed()) {
            MultiwayGraph g;
            MultiwayMode mode =
                mode_text == "evolution" ? MultiwayMode::Evolution : MultiwayMode::States;
            if (generational_flag) {
                g = generational(decode_string_state(init_text),
                                 parse_string_rules(rules_text), layers, node_cap);
            } else if (is_hypergraph_rules(rules_text)) {
                g = build_hypergraph_multiway({parse_init_hypergraph(init_text)},
                                              parse_rules(rules_text), mode, layers, node_cap);
            } else {
                g = build_string_multiway({decode_string_state(init_text)},
                                          parse_string_rules(rules_text), mode, layers,
                                          node_cap);
            }
            if (emit == "counts") {
                std::string text = "layer,states\n";
                for (std::size_t t = 0; t < g.layers.size(); ++t)
                    text += std::to_string(t) + "," + std::to_string(g.layers[t].size()) + "\n";
                out.write(text);
            } else {
                std::vector<std::uint64_t> w;
                if (weights_flag && g.mode == MultiwayMode::States) w = path_weights(g);
                out.write(export_graph(to_export(g, w.empty() ? nullptr : &w),
                                       parse_format(format)));
            }
        } else if (causal_cmd->parsed()) {
            CausalGraph cg;
            if (!grid_spec.empty()) {
                auto colon = grid_spec.find(':');
                cg = directed_grid(std::stoul(grid_spec.substr(0, colon)),
                                   std::stoul(grid_spec.substr(colon + 1)));
            } else if (!trace_path.empty()) {
                std::ifstream is(trace_path);
                if (!is) throw SemanticError("cannot open trace: " + trace_path);
                nlohmann::json j;
                is >> j;
                cg = causal_graph(trace_from_json(j), initial_event);
            } else if (multiway_flag || paths_check) {
                if (is_hypergraph_rules(rules_text)) {
                    auto tree = build_hypergraph_multiway_tree(parse_init_hypergraph(init_text),
                                                               parse_rules(rules_text), layers,
                                                               node_cap);
                    cg = multiway_causal(tree);
                    if (paths_check) {
                        auto paths = tree.maximal_event_paths();
                        auto ref = path_causal(tree, paths.at(0));
                        bool all = true;
                        for (auto& p : paths)
                            if (!causal_isomorphic(path_causal(tree, p), ref)) all = false;
                        out.write(std::string("paths=") + std::to_string(paths.size()) +
                                  " isomorphic=" + (all ? "yes" : "no") + "\n");
                        return 0;
                    }
                } else {
                    auto tree = build_string_multiway_tree(decode_string_state(init_text),
                                                           parse_string_rules(rules_text),
                                                           layers, node_cap);
                    cg = multiway_causal(tree);
                    if (paths_check) {
                        auto paths = tree.maximal_event_paths();
                        auto ref = path_causal(tree, paths.at(0));
                        bool all = true;
                        for (auto& p : paths)
                            if (!causal_isomorphic(path_causal(tree, p), ref)) all = false;
                        out.write(std::string("paths=") + std::to_string(paths.size()) +
                                  " isomorphic=" + (all ? "yes" : "no") + "\n");
                        return 0;
                    }
                }
            } else if (is_hypergraph_rules(rules_text)) {
                auto tr = evolve(parse_init_hypergraph(init_text), parse_rules(rules_text),
                                 parse_policy(policy_text), steps);
                cg = causal_graph(tr, initial_event);
            } else {
                auto tr = evolve_string(decode_string_state(init_text),
                                        parse_string_rules(rules_text),
                                        parse_string_policy(policy_text), steps);
                cg = causal_graph(tr, initial_event);
            }
            if (cone_flag || emit == "cones") {
                std::string text = "t,C_t\n";
                for (std::uint32_t t = 0; t <= steps; ++t)
                    text += std::to_string(t) + "," +
                            std::to_string(cone_volume(cg, cone_from, t)) + "\n";
                out.write(text);
            } else if (emit == "loops") {
                auto loops = detect_loops(cg);
                out.write("loops=" + std::to_string(loops.size()) + "\n");
            } else if (emit == "disconnection") {
                auto rep = detect_disconnection(cg);
                std::string text = "slice,components\n";
                for (std::size_t s = 0; s < rep.suffix_components.size(); ++s)
                    text +=
                        std::to_string(s) + "," + std::to_string(rep.suffix_components[s]) + "\n";
                out.write(text);
            } else {
                out.write(export_graph(to_export(cg), parse_format(format)));
            }
        } else if (boost_cmd->parsed()) {
            auto rules =
                parse_string_rules(rules_text.empty() ? std::string("BA -> AB") : rules_text);
            auto tr = evolve_string(decode_string_state(init_text), rules, StringPolicy::MaxScan,
                                    steps == 8 ? 256 : steps);
            auto f = foliate_grid(tr, beta);
            std::ostringstream os;
            os << "beta=" << f.beta << " gamma=" << f.gamma << " slices=" << f.slice_count
               << " strict=" << (f.strict ? "yes" : "no") << "\nfinal=" << f.final_string << "\n";
            out.write(os.str());
        } else if (branchial_cmd->parsed()) {
            MultiwayGraph g;
            if (is_hypergraph_rules(rules_text))
                g = build_hypergraph_multiway({parse_init_hypergraph(init_text)},
                                              parse_rules(rules_text), MultiwayMode::Evolution,
                                              layers, node_cap);
            else
                g = build_string_multiway({decode_string_state(init_text)},
                                          parse_string_rules(rules_text),
                                          MultiwayMode::Evolution, layers, node_cap);
            auto slices = branchial(g, nullptr, thickening);
            if (emit == "counts") {
                std::string text = "slice,nodes,edges\n";
                for (std::size_t t = 0; t < slices.size(); ++t)
                    text += std::to_string(t) + "," + std::to_string(slices[t].nodes.size()) +
                            "," + std::to_string(slices[t].edges.size()) + "\n";
                out.write(text);
            } else {
                auto idx = slice_given ? slice_index
                                       : static_cast<std::uint32_t>(slices.size() - 1);
                out.write(export_graph(to_export(slices.at(idx), g), parse_format(format)));
            }
        } else if (ci_cmd->parsed()) {
            auto run_one = [&](const std::string& text, nlohmann::json& j) {
                if (is_hypergraph_rules(text)) {
                    auto v = total_ci(parse_rules(text), max_steps, node_cap);
                    j["rules"] = text;
                    j["pairs"] = v.pairs.size();
                    j["verdict"] = v.kind == CIVerdict::Kind::TotallyCausalInvariant
                                       ? "causal-invariant"
                                       : (v.kind == CIVerdict::Kind::NotCausalInvariant
                                              ? "not-causal-invariant"
                                              : "unknown");
                    j["max_depth"] = v.max_resolution_depth;
                } else {
                    auto rules = parse_string_rules(text);
                    if (do_complete) {
                        auto res = complete(rules, 8, max_steps, node_cap);
                        j["additions"] = nlohmann::json::array();
                        for (auto& a : res.additions)
                            j["additions"].push_back((a.pattern.empty() ? "()" : a.pattern) +
                                                     " -> " + a.replacement);
                        rules = res.rules;
                        j["verdict_after"] = res.verdict.is_ci() ? "causal-invariant"
                                                                 : "not-causal-invariant";
                    }
                    auto v = total_ci(rules, max_steps, node_cap);
                    j["rules"] = text;
                    j["pairs"] = v.pairs.size();
                    j["verdict"] = v.kind == CIVerdict::Kind::TotallyCausalInvariant
                                       ? "causal-invariant"
                                       : (v.kind == CIVerdict::Kind::NotCausalInvariant
                                              ? "not-causal-invariant"
                                              : "unknown");
                    j["max_depth"] = v.max_resolution_depth;
                }
            };
            std::vector<std::string> inputs;
            if (!rules_file.empty())
                inputs = all_rule_lines(rules_file);
            else
                inputs.push_back(rules_text);
            std::vector<nlohmann::json> results(inputs.size());
            if (jobs > 1 && inputs.size() > 1) {
                std::atomic<std::size_t> next{0};
                std::vector<std::thread> pool;
                for (std::uint32_t w = 0; w < jobs; ++w)
                    pool.emplace_back([&] {
                        while (true) {
                            std::size_t i = next.fetch_add(1);
                            if (i >= inputs.size()) break;
                            run_one(inputs[i], results[i]);
                        }
                    });
                for (auto& t : pool) t.join();
            } else {
                for (std::size_t i = 0; i < inputs.size(); ++i) run_one(inputs[i], results[i]);
            }
            nlohmann::json report_json = nlohmann::json::array();
            for (auto& j : results) report_json.push_back(j);
            if (report == "json") {
                out.write(report_json.dump(2) + "\n");
            } else {
                std::string text;
                for (auto& j : report_json) {
                    text += j["rules"].get<std::string>() + ": " +
                            j["verdict"].get<std::string>() + " (pairs " +
                            std::to_string(j["pairs"].get<std::size_t>()) + ", depth " +
                            std::to_string(j["max_depth"].get<std::uint32_t>()) + ")";
                    if (j.contains("additions")) {
                        text += " additions:";
                        for (auto& a : j["additions"]) text += " [" + a.get<std::string>() + "]";
                    }
                    text += "\n";
                }
                out.write(text);
            }
        } else if (enum_cmd->parsed()) {
            bool is_rule_sig = sig_text.find("->") != std::string::npos;
            std::ostringstream os;
            // memoized counts keyed by signature and flags
            const char* cache_dir = std::getenv("HYPERFORGE_CACHE");
            std::string cache_key = sig_text + (left_connected_flag ? "|lc" : "") +
                                    (connected_flag ? "|conn" : "");
            if (count_only && cache_dir && *cache_dir) {
                std::ifstream is(std::string(cache_dir) + "/counts.json");
                if (is) {
                    nlohmann::json j;
                    is >> j;
                    if (j.contains(cache_key)) {
                        out.write(std::to_string(j[cache_key].get<std::uint64_t>()) + "\n");
                        return 0;
                    }
                }
            }
            auto store_count = [&](std::uint64_t n) {
                if (!count_only || !cache_dir || !*cache_dir) return;
                nlohmann::json j;
                {
                    std::ifstream is(std::string(cache_dir) + "/counts.json");
                    if (is) is >> j;
                }
                j[cache_key] = n;
                std::ofstream osf(std::string(cache_dir) + "/counts.json");
                if (osf) osf << j.dump(2) << "\n";
            };
            if (estimate_flag) {
                os << estimate_rule_count(parse_rule_signature(sig_text)) << "\n";
            } else if (is_rule_sig) {
                auto sig = parse_rule_signature(sig_text);
                auto rules = enumerate_rules(sig, left_connected_flag);
                if (count_only) store_count(rules.size());
                if (symmetry_census) {
                    std::size_t reversal = 0;
                    std::map<TernaryClass, std::size_t> classes;
                    for (auto& r : rules) {
                        auto rep = classify_symmetry(r);
                        if (rep.global_reversal_symmetric) ++reversal;
                        classes[rep.ternary_class]++;
                    }
                    os << "total," << rules.size() << "\nreversal_symmetric," << reversal << "\n";
                    auto name = [](TernaryClass c) {
                        switch (c) {
                        case TernaryClass::None: return "E";
                        case TernaryClass::S2_231: return "S2(1,3,2)";
                        case TernaryClass::S2_321: return "S2(3,2,1)";
                        case TernaryClass::S2_213: return "S2(2,1,3)";
                        case TernaryClass::A3: return "A3";
                        case TernaryClass::S3: return "S3";
                        default: return "n/a";
                        }
                    };
                    for (auto& [c, n] : classes)
                        if (c != TernaryClass::NotTernary) os << name(c) << "," << n << "\n";
                } else if (halting_census_flag) {
                    auto init = self_loops(sig.lhs.counts[0].second, sig.lhs.counts[0].first);
                    std::size_t halts = 0, connected = 0;
                    std::uint32_t max_halt = 0;
                    std::string argmax;
                    for (auto& r : rules) {
                        auto v = halting_verdict(r, init, UpdatePolicy::standard(), halting_cap);
                        if (v.halts) {
                            ++halts;
                            if (v.halting_time > max_halt) {
                                max_halt = v.halting_time;
                                argmax = to_string(r);
                            }
                        } else if (v.connected_throughout) {
                            ++connected;
                        }
                    }
                    os << "total," << rules.size() << "\nhalting," << halts << "\nmax_halting_time,"
                       << max_halt << "\nmax_rule," << argmax << "\nconnected_growing,"
                       << connected << "\n";
                } else if (count_only) {
                    os << rules.size() << "\n";
                } else {
                    for (auto& r : rules) os << to_string(r) << "\n";
                }
            } else {
                auto sig = parse_signature(sig_text);
                auto states = enumerate_hypergraphs(sig, connected_flag);
                if (count_only) {
                    store_count(states.size());
                    os << states.size() << "\n";
                } else {
                    for (auto& h : states) os << to_string(h) << "\n";
                }
            }
            out.write(os.str());
        } else if (analyze_cmd->parsed()) {
            DistanceGraph g;
            if (!reference.empty()) {
                g = parse_reference(reference);
            } else {
                auto tr = evolve(parse_init_hypergraph(init_text), parse_rules(rules_text),
                                 UpdatePolicy::standard(), steps);
                g = distance_graph(tr.final_state());
            }
            std::vector<std::uint32_t> sources;
            if (sources_text == "all") {
                for (std::uint32_t v = 0; v < g.size(); ++v) sources.push_back(v);
            } else if (sources_text == "corners") {
                std::size_t min_deg = SIZE_MAX;
                for (auto& nb : g.adj) min_deg = std::min(min_deg, nb.size());
                for (std::uint32_t v = 0; v < g.size(); ++v)
                    if (g.adj[v].size() == min_deg) sources.push_back(v);
            } else if (sources_text == "center") {
                std::uint32_t best = 0, ecc = std::numeric_limits<std::uint32_t>::max();
                for (std::uint32_t v = 0; v < g.size(); ++v) {
                    auto e = g.eccentricity(v);
                    if (e < ecc) {
                        ecc = e;
                        best = v;
                    }
                }
                sources.push_back(best);
            } else {
                std::istringstream is(sources_text);
                std::string part;
                while (std::getline(is, part, ',')) sources.push_back(std::stoul(part));
            }
            std::uint32_t r_min = 2, r_max = std::max(4u, g.eccentricity(sources.at(0)) / 2);
            if (!window_text.empty()) {
                auto colon = window_text.find(':');
                r_min = std::stoul(window_text.substr(0, colon));
                r_max = std::stoul(window_text.substr(colon + 1));
            }
            std::ostringstream os;
            if (what == "dimension") {
                auto est = estimate_dimension(g, sources, r_min, r_max);
                auto prof = averaged_volume(g, sources, r_max + 1);
                os << "dimension," << est.dimension << "\nsigma," << est.dispersion << "\n";
                os << "r,V,delta,sigma\n";
                for (std::uint32_t r = 0; r + 1 <= r_max; ++r)
                    os << r << "," << prof.volume[r] << "," << (r >= 1 ? prof.delta[r] : 0.0)
                       << "," << prof.dispersion[r] << "\n";
            } else if (what == "curvature") {
                auto prof = averaged_volume(g, sources, r_max + 1);
                auto fit = fit_curvature(prof, dim_hint, r_min, r_max);
                os << "dimension," << fit.dimension << "\namplitude," << fit.amplitude
                   << "\ncurvature," << fit.curvature << "\nresidual," << fit.residual << "\n";
            } else if (what == "stats") {
                auto s = graph_stats(g);
                os << "vertices," << s.vertices << "\nedges," << s.edges << "\ndiameter,"
                   << s.diameter << "\nradius," << s.radius << "\nglobal_clustering,"
                   << s.global_clustering << "\nmean_local_clustering," << s.mean_local_clustering
                   << "\nfundamental_cycles," << s.cycle_lengths.size() << "\nlongest_cycle,"
                   << (s.cycle_lengths.empty() ? 0 : s.cycle_lengths.back()) << "\n";
            } else if (what == "correlation") {
                os << "r,s,S\n"
                   << corr_r << "," << corr_s << "," << correlation(g, corr_r, corr_s) << "\n";
            } else {
                throw SemanticError("unknown analysis: " + what);
            }
            out.write(os.str());
        }
    } catch (const ResourceLimit& e) {
        std::cerr << "error[" << e.code() << "]: " << e.what() << "\n";
        return 2;
    } catch (const BudgetExhausted& e) {
        std::cerr << "error[" << e.code() << "]: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error[" << e.code() << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
