#ifndef HYPERFORGE_GRAPH_IO_HPP
#define HYPERFORGE_GRAPH_IO_HPP

#include <hyperforge/causal.hpp>
#include <hyperforge/geometry.hpp>

#include <json.hpp>

#include <map>
#include <sstream>
#include <string>

namespace hyperforge {

// Neutral graph container for serialization. Node and edge attributes use
// stable keys so exports are bit-reproducible.
struct ExportGraph {
    struct Node {
        std::string id;
        std::map<std::string, std::string> attrs;
    };
    struct Edge {
        std::string src, dst;
        std::map<std::string, std::string> attrs;
    };
    bool directed = true;
    std::vector<Node> nodes;
    std::vector<Edge> edges;

    void sort() {
        std::stable_sort(nodes.begin(), nodes.end(),
                         [](const Node& a, const Node& b) { return a.id < b.id; });
        std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
            if (a.src != b.src) return a.src < b.src;
            if (a.dst != b.dst) return a.dst < b.dst;
            return a.attrs < b.attrs;
        });
    }
};

namespace detail {

inline std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace detail

inline std::string to_dot(ExportGraph g) {
    g.sort();
    std::ostringstream os;
    os << (g.directed ? "digraph" : "graph") << " G {\n";
    for (auto& n : g.nodes) {
        os << "  \"" << detail::dot_escape(n.id) << "\"";
        if (!n.attrs.empty()) {
            os << " [";
            bool first = true;
            for (auto& [k, v] : n.attrs) {
                if (!first) os << ", ";
                first = false;
                os << k << "=\"" << detail::dot_escape(v) << "\"";
            }
            os << "]";
        }
        os << ";\n";
    }
    const char* arrow = g.directed ? " -> " : " -- ";
    for (auto& e : g.edges) {
        os << "  \"" << detail::dot_escape(e.src) << "\"" << arrow << "\""
           << detail::dot_escape(e.dst) << "\"";
        if (!e.attrs.empty()) {
            os << " [";
            bool first = true;
            for (auto& [k, v] : e.attrs) {
                if (!first) os << ", ";
                first = false;
                os << k << "=\"" << detail::dot_escape(v) << "\"";
            }
            os << "]";
        }
        os << ";\n";
    }
    os << "}\n";
    return os.str();
}

inline std::string to_graphml(ExportGraph g) {
    g.sort();
    // collect attribute keys
    std::set<std::string> node_keys, edge_keys;
    for (auto& n : g.nodes)
        for (auto& [k, v] : n.attrs) node_keys.insert(k);
    for (auto& e : g.edges)
        for (auto& [k, v] : e.attrs) edge_keys.insert(k);
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n";
    for (auto& k : node_keys)
        os << "  <key id=\"n_" << detail::xml_escape(k) << "\" for=\"node\" attr.name=\""
           << detail::xml_escape(k) << "\" attr.type=\"string\"/>\n";
    for (auto& k : edge_keys)
        os << "  <key id=\"e_" << detail::xml_escape(k) << "\" for=\"edge\" attr.name=\""
           << detail::xml_escape(k) << "\" attr.type=\"string\"/>\n";
    os << "  <graph edgedefault=\"" << (g.directed ? "directed" : "undirected") << "\">\n";
    for (auto& n : g.nodes) {
        os << "    <node id=\"" << detail::xml_escape(n.id) << "\"";
        if (n.attrs.empty()) {
            os << "/>\n";
        } else {
            os << ">\n";
            for (auto& [k, v] : n.attrs)
                os << "      <data key=\"n_" << detail::xml_escape(k) << "\">"
                   << detail::xml_escape(v) << "</data>\n";
            os << "    </node>\n";
        }
    }
    for (auto& e : g.edges) {
        os << "    <edge source=\"" << detail::xml_escape(e.src) << "\" target=\""
           << detail::xml_escape(e.dst) << "\"";
        if (e.attrs.empty()) {
            os << "/>\n";
        } else {
            os << ">\n";
            for (auto& [k, v] : e.attrs)
                os << "      <data key=\"e_" << detail::xml_escape(k) << "\">"
                   << detail::xml_escape(v) << "</data>\n";
            os << "    </edge>\n";
        }
    }
    os << "  </graph>\n</graphml>\n";
    return os.str();
}

inline nlohmann::json to_json(ExportGraph g) {
    g.sort();
    nlohmann::json j;
    j["directed"] = g.directed;
    j["nodes"] = nlohmann::json::array();
    for (auto& n : g.nodes) {
        nlohmann::json jn;
        jn["id"] = n.id;
        for (auto& [k, v] : n.attrs) jn[k] = v;
        j["nodes"].push_back(jn);
    }
    j["edges"] = nlohmann::json::array();
    for (auto& e : g.edges) {
        nlohmann::json je;
        je["src"] = e.src;
        je["dst"] = e.dst;
        for (auto& [k, v] : e.attrs) je[k] = v;
        j["edges"].push_back(je);
    }
    return j;
}

inline ExportGraph export_graph_from_json(const nlohmann::json& j) {
    ExportGraph g;
    g.directed = j.at("directed").get<bool>();
    for (auto& jn : j.at("nodes")) {
        ExportGraph::Node n;
        n.id = jn.at("id").get<std::string>();
        for (auto it = jn.begin(); it != jn.end(); ++it)
            if (it.key() != "id") n.attrs[it.key()] = it.value().get<std::string>();
        g.nodes.push_back(n);
    }
    for (auto& je : j.at("edges")) {
        ExportGraph::Edge e;
        e.src = je.at("src").get<std::string>();
        e.dst = je.at("dst").get<std::string>();
        for (auto it = je.begin(); it != je.end(); ++it)
            if (it.key() != "src" && it.key() != "dst")
                e.attrs[it.key()] = it.value().get<std::string>();
        g.edges.push_back(e);
    }
    return g;
}

inline std::string to_csv(ExportGraph g) {
    g.sort();
    std::set<std::string> keys;
    for (auto& e : g.edges)
        for (auto& [k, v] : e.attrs) keys.insert(k);
    std::ostringstream os;
    os << "src,dst";
    for (auto& k : keys) os << "," << k;
    os << "\n";
    auto quote = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string out = "\"";
        for (char c : s) {
            if (c == '"') out += '"';
            out += c;
        }
        out += "\"";
        return out;
    };
    for (auto& e : g.edges) {
        os << quote(e.src) << "," << quote(e.dst);
        for (auto& k : keys) {
            auto it = e.attrs.find(k);
            os << "," << quote(it == e.attrs.end() ? "" : it->second);
        }
        os << "\n";
    }
    return os.str();
}

enum class ExportFormat { Dot, GraphML, Json, Csv };

inline ExportFormat parse_format(const std::string& s) {
    if (s == "dot") return ExportFormat::Dot;
    if (s == "graphml") return ExportFormat::GraphML;
    if (s == "json") return ExportFormat::Json;
    if (s == "csv") return ExportFormat::Csv;
    throw UnsupportedFormat("unknown export format: " + s);
}

inline std::string export_graph(const ExportGraph& g, ExportFormat f) {
    switch (f) {
    case ExportFormat::Dot: return to_dot(g);
    case ExportFormat::GraphML: return to_graphml(g);
    case ExportFormat::Json: return to_json(g).dump(2) + "\n";
    case ExportFormat::Csv: return to_csv(g);
    }
    throw UnsupportedFormat("unknown export format");
}

// ---- conversions ---------------------------------------------------------------

inline ExportGraph to_export(const MultiwayGraph& g,
                             const std::vector<std::uint64_t>* weights = nullptr) {
    ExportGraph out;
    out.directed = true;
    for (std::uint32_t i = 0; i < g.nodes.size(); ++i) {
        ExportGraph::Node n;
        n.id = g.mode == MultiwayMode::Evolution
                   ? g.nodes[i].key + "@" + std::to_string(g.nodes[i].layer)
                   : g.nodes[i].key;
        n.attrs["key"] = g.nodes[i].key;
        n.attrs["layer"] = std::to_string(g.nodes[i].layer);
        if (weights) n.attrs["weight"] = std::to_string((*weights)[i]);
        out.nodes.push_back(n);
    }
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (auto& e : g.edges) {
        if (g.mode == MultiwayMode::States && !seen.insert({e.src, e.dst}).second) continue;
        ExportGraph::Edge ee;
        ee.src = out.nodes[e.src].id;
        ee.dst = out.nodes[e.dst].id;
        ee.attrs["event"] = e.desc;
        out.edges.push_back(ee);
    }
    return out;
}

inline ExportGraph to_export(const CausalGraph& g) {
    ExportGraph out;
    out.directed = true;
    for (std::uint32_t i = 0; i < g.nodes.size(); ++i) {
        ExportGraph::Node n;
        n.id = std::to_string(i);
        n.attrs["rule"] = std::to_string(g.nodes[i].rule);
        n.attrs["step"] = std::to_string(g.nodes[i].step);
        out.nodes.push_back(n);
    }
    for (auto& [a, b] : g.edges)
        out.edges.push_back({std::to_string(a), std::to_string(b), {}});
    return out;
}

inline ExportGraph to_export(const BranchialGraph& bg, const MultiwayGraph& g) {
    ExportGraph out;
    out.directed = false;
    for (auto n : bg.nodes) {
        ExportGraph::Node en;
        en.id = g.nodes[n].key;
        en.attrs["layer"] = std::to_string(g.nodes[n].layer);
        out.nodes.push_back(en);
    }
    for (auto& [a, b] : bg.edges)
        out.edges.push_back({g.nodes[a].key, g.nodes[b].key, {}});
    return out;
}

inline ExportGraph to_export(const DistanceGraph& g) {
    ExportGraph out;
    out.directed = false;
    for (std::uint32_t v = 0; v < g.size(); ++v)
        out.nodes.push_back({std::to_string(v), {}});
    for (std::uint32_t v = 0; v < g.size(); ++v)
        for (auto w : g.adj[v])
            if (v < w) out.edges.push_back({std::to_string(v), std::to_string(w), {}});
    return out;
}

// ---- trace serialization ---------------------------------------------------------

inline nlohmann::json trace_to_json(const Trace& tr) {
    nlohmann::json j;
    j["initial"] = nlohmann::json::array();
    for (auto& r : tr.initial.relations) j["initial"].push_back(r);
    j["rules"] = to_string(tr.rules);
    j["events"] = nlohmann::json::array();
    for (auto& ev : tr.events) {
        nlohmann::json je;
        je["rule"] = ev.match.rule_index;
        je["inputs"] = ev.match.inputs;
        je["binding"] = ev.match.binding;
        je["produced"] = ev.produced;
        je["step"] = ev.step;
        j["events"].push_back(je);
    }
    return j;
}

// Rebuilds a trace by replaying serialized events against the rule set.
inline Trace trace_from_json(const nlohmann::json& j) {
    Hypergraph init;
    for (auto& r : j.at("initial")) init.relations.push_back(r.get<Relation>());
    RuleSet rules = parse_rules(j.at("rules").get<std::string>());
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
    for (auto& je : j.at("events")) {
        Match m;
        m.rule_index = je.at("rule").get<std::uint32_t>();
        m.inputs = je.at("inputs").get<std::vector<InstanceId>>();
        m.binding = je.at("binding").get<std::vector<ElementId>>();
        std::uint32_t step = je.at("step").get<std::uint32_t>();
        for (auto id : m.inputs) {
            if (id >= tr.instances.size() || tr.instances[id].consumer != -1)
                throw SemanticError("trace replay: consumed instance not alive");
        }
        apply_match(st, tr.instances, rules, m, step, tr.events);
        tr.steps_run = std::max(tr.steps_run, step);
    }
    return tr;
}

} // namespace hyperforge

#endif
