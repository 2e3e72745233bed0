#ifndef HYPERFORGE_GEOMETRY_HPP
#define HYPERFORGE_GEOMETRY_HPP

#include <hyperforge/hypergraph.hpp>

#include <cmath>
#include <deque>
#include <map>

namespace hyperforge {

// Undirected unit-weight graph for the intrinsic-geometry estimators.
struct DistanceGraph {
    std::vector<std::vector<std::uint32_t>> adj;

    std::size_t size() const { return adj.size(); }

    std::uint32_t add_node() {
        adj.push_back({});
        return static_cast<std::uint32_t>(adj.size() - 1);
    }
    void add_edge(std::uint32_t a, std::uint32_t b) {
        if (a == b) return;
        for (auto x : adj[a])
            if (x == b) return;
        adj[a].push_back(b);
        adj[b].push_back(a);
    }

    std::vector<std::int32_t> distances(std::uint32_t source) const {
        std::vector<std::int32_t> dist(adj.size(), -1);
        std::deque<std::uint32_t> q{source};
        dist[source] = 0;
        while (!q.empty()) {
            auto u = q.front();
            q.pop_front();
            for (auto v : adj[u])
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    q.push_back(v);
                }
        }
        return dist;
    }
    std::uint32_t eccentricity(std::uint32_t source) const {
        auto d = distances(source);
        std::int32_t m = 0;
        for (auto x : d) m = std::max(m, x);
        return static_cast<std::uint32_t>(m);
    }
    std::size_t edge_count() const {
        std::size_t e = 0;
        for (auto& a : adj) e += a.size();
        return e / 2;
    }
};

// Clique expansion: all members of one relation become pairwise adjacent.
inline DistanceGraph distance_graph(const Hypergraph& h) {
    DistanceGraph g;
    std::unordered_map<ElementId, std::uint32_t> index;
    auto node = [&](ElementId e) {
        auto it = index.find(e);
        if (it != index.end()) return it->second;
        auto id = g.add_node();
        index[e] = id;
        return id;
    };
    for (auto& r : h.relations) {
        for (auto e : r) node(e);
        for (std::size_t i = 0; i < r.size(); ++i)
            for (std::size_t j = i + 1; j < r.size(); ++j) g.add_edge(node(r[i]), node(r[j]));
    }
    return g;
}

// ---- volume profiles -----------------------------------------------------------

struct VolumeProfile {
    std::vector<double> volume;     // V[r], r = 0..r_max (averaged over sources)
    std::vector<double> dispersion; // 1 sigma across sources
    std::vector<double> delta;      // log differences, index r >= 1

    static std::vector<double> log_differences(const std::vector<double>& v) {
        std::vector<double> out(v.size(), 0.0);
        for (std::size_t r = 1; r + 1 < v.size(); ++r)
            out[r] = (std::log(v[r + 1]) - std::log(v[r])) /
                     (std::log(double(r + 1)) - std::log(double(r)));
        return out;
    }
};

inline std::vector<std::uint64_t> ball_counts(const DistanceGraph& g, std::uint32_t source,
                                              std::uint32_t r_max) {
    auto dist = g.distances(source);
    std::vector<std::uint64_t> v(r_max + 1, 0);
    for (auto d : dist)
        if (d >= 0)
            for (std::uint32_t r = static_cast<std::uint32_t>(d); r <= r_max; ++r) v[r]++;
    return v;
}

inline VolumeProfile ball_volume(const DistanceGraph& g, std::uint32_t source,
                                 std::uint32_t r_max) {
    if (source >= g.size()) throw UnknownNode("ball_volume: source not in graph");
    VolumeProfile p;
    auto v = ball_counts(g, source, r_max);
    p.volume.assign(v.begin(), v.end());
    p.dispersion.assign(v.size(), 0.0);
    p.delta = VolumeProfile::log_differences(p.volume);
    return p;
}

inline VolumeProfile averaged_volume(const DistanceGraph& g,
                                     const std::vector<std::uint32_t>& sources,
                                     std::uint32_t r_max) {
    VolumeProfile p;
    p.volume.assign(r_max + 1, 0.0);
    p.dispersion.assign(r_max + 1, 0.0);
    std::vector<std::vector<std::uint64_t>> all;
    for (auto s : sources) all.push_back(ball_counts(g, s, r_max));
    for (std::uint32_t r = 0; r <= r_max; ++r) {
        double mean = 0;
        for (auto& v : all) mean += static_cast<double>(v[r]);
        mean /= static_cast<double>(all.size());
        double var = 0;
        for (auto& v : all) var += (v[r] - mean) * (v[r] - mean);
        p.volume[r] = mean;
        p.dispersion[r] = all.size() > 1 ? std::sqrt(var / (all.size() - 1)) : 0.0;
    }
    p.delta = VolumeProfile::log_differences(p.volume);
    return p;
}

// Exact ball size in the infinite d-dimensional grid: sum 2^i C(d,i) C(r,i).
inline std::uint64_t grid_ball_closed_form(std::uint32_t d, std::uint32_t r) {
    if (d < 1) throw OutOfRange("grid_ball_closed_form: d >= 1 required");
    auto binom = [](std::uint64_t n, std::uint64_t k) {
        if (k > n) return std::uint64_t{0};
        std::uint64_t out = 1;
        for (std::uint64_t i = 0; i < k; ++i) out = out * (n - i) / (i + 1);
        return out;
    };
    std::uint64_t total = 0;
    for (std::uint32_t i = 0; i <= d; ++i)
        total += (std::uint64_t{1} << i) * binom(d, i) * binom(r, i);
    return total;
}

// ---- dimension and curvature -----------------------------------------------------

struct DimensionEstimate {
    double dimension = 0.0;
    double dispersion = 0.0;
    std::uint32_t r_min = 0, r_max = 0;
};

// Log-weighted mean of the log differences over the window, which telescopes
// to the secant slope of log V against log r; robust against the log-periodic
// oscillation of self-similar graphs. Dispersion is 1 sigma across sources.
inline DimensionEstimate estimate_dimension(const DistanceGraph& g,
                                            const std::vector<std::uint32_t>& sources,
                                            std::uint32_t r_min, std::uint32_t r_max) {
    if (r_min < 1 || r_max < r_min || sources.empty())
        throw WindowTooLarge("estimate_dimension: bad window");
    for (auto s : sources)
        if (g.eccentricity(s) < r_max + 1)
            throw WindowTooLarge("estimate_dimension: window exceeds reach of source " +
                                 std::to_string(s));
    std::vector<double> per_source;
    for (auto s : sources) {
        auto v = ball_counts(g, s, r_max + 1);
        double num = std::log(double(v[r_max + 1])) - std::log(double(v[r_min]));
        double den = std::log(double(r_max + 1)) - std::log(double(r_min));
        per_source.push_back(num / den);
    }
    DimensionEstimate est;
    est.r_min = r_min;
    est.r_max = r_max;
    double mean = 0;
    for (auto x : per_source) mean += x;
    mean /= static_cast<double>(per_source.size());
    double var = 0;
    for (auto x : per_source) var += (x - mean) * (x - mean);
    est.dimension = mean;
    est.dispersion =
        per_source.size() > 1 ? std::sqrt(var / (per_source.size() - 1)) : 0.0;
    return est;
}

struct CurvatureFit {
    double dimension = 0.0;
    double amplitude = 0.0;  // a
    double curvature = 0.0;  // c in V_r ~ a r^d (1 - c r^2)
    double residual = 0.0;
    std::uint32_t r_min = 0, r_max = 0;
};

// Least squares of V_r / r^d against a - (a c) r^2 over the window. Rejected
// when the log differences keep growing (exponential volume growth).
inline CurvatureFit fit_curvature(const VolumeProfile& profile, double d, std::uint32_t r_min,
                                  std::uint32_t r_max) {
    if (r_max + 1 >= profile.volume.size() || r_min < 1 || r_max <= r_min)
        throw WindowTooLarge("fit_curvature: window outside profile");
    // growth check over the window
    double d_lo = profile.delta[r_min], d_hi = profile.delta[r_max];
    if (d_hi > d_lo + 1.0)
        throw FitRejected("fit_curvature: volume grows super-polynomially over the window");

    double s1 = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (std::uint32_t r = r_min; r <= r_max; ++r) {
        double x = double(r) * double(r);
        double y = profile.volume[r] / std::pow(double(r), d);
        s1 += 1;
        sx += x;
        sxx += x * x;
        sy += y;
        sxy += x * y;
    }
    double den = s1 * sxx - sx * sx;
    CurvatureFit fit;
    fit.dimension = d;
    fit.r_min = r_min;
    fit.r_max = r_max;
    double a = (sy * sxx - sx * sxy) / den;
    double b = (s1 * sxy - sx * sy) / den; // y = a + b x with b = -a c
    fit.amplitude = a;
    fit.curvature = a != 0 ? -b / a : 0.0;
    double rss = 0;
    for (std::uint32_t r = r_min; r <= r_max; ++r) {
        double x = double(r) * double(r);
        double y = profile.volume[r] / std::pow(double(r), d);
        double e = y - (a + b * x);
        rss += e * e;
    }
    fit.residual = std::sqrt(rss / s1);
    return fit;
}

// ---- geodesics and tubes ----------------------------------------------------------

// One shortest path with a deterministic tie-break: among shortest paths the
// lexicographically smallest vertex sequence.
inline std::vector<std::uint32_t> geodesic(const DistanceGraph& g, std::uint32_t a,
                                           std::uint32_t b) {
    if (a >= g.size() || b >= g.size()) throw UnknownNode("geodesic: endpoint not in graph");
    auto dist_b = g.distances(b);
    if (dist_b[a] < 0) throw Disconnected("geodesic: endpoints not connected");
    std::vector<std::uint32_t> path{a};
    std::uint32_t cur = a;
    while (cur != b) {
        std::uint32_t next = cur;
        bool found = false;
        std::vector<std::uint32_t> nbrs = g.adj[cur];
        std::sort(nbrs.begin(), nbrs.end());
        for (auto v : nbrs)
            if (dist_b[v] == dist_b[cur] - 1) {
                next = v;
                found = true;
                break;
            }
        if (!found) throw Disconnected("geodesic: broken descent");
        path.push_back(next);
        cur = next;
    }
    return path;
}

// Number of vertices within distance r of any vertex on the path.
inline std::uint64_t tube_volume(const DistanceGraph& g, const std::vector<std::uint32_t>& path,
                                 std::uint32_t r) {
    std::vector<std::int32_t> dist(g.size(), -1);
    std::deque<std::uint32_t> q;
    for (auto v : path) {
        if (v >= g.size()) throw UnknownNode("tube_volume: path vertex not in graph");
        if (dist[v] < 0) {
            dist[v] = 0;
            q.push_back(v);
        }
    }
    std::uint64_t count = q.size();
    while (!q.empty()) {
        auto u = q.front();
        q.pop_front();
        if (dist[u] == static_cast<std::int32_t>(r)) continue;
        for (auto v : g.adj[u])
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                ++count;
                q.push_back(v);
            }
    }
    return count;
}

// ---- graph statistics --------------------------------------------------------------

struct GraphStats {
    std::size_t vertices = 0;
    std::size_t edges = 0;
    std::uint32_t diameter = 0;
    std::uint32_t radius = 0;
    std::map<std::uint32_t, std::uint32_t> degree_histogram;
    double global_clustering = 0.0;
    double mean_local_clustering = 0.0;
    std::vector<std::uint32_t> cycle_lengths; // fundamental cycles of a BFS forest
};

inline GraphStats graph_stats(const DistanceGraph& g) {
    GraphStats s;
    s.vertices = g.size();
    s.edges = g.edge_count();
    std::uint32_t diam = 0, rad = g.size() ? std::numeric_limits<std::uint32_t>::max() : 0;
    for (std::uint32_t v = 0; v < g.size(); ++v) {
        auto e = g.eccentricity(v);
        diam = std::max(diam, e);
        rad = std::min(rad, e);
        s.degree_histogram[static_cast<std::uint32_t>(g.adj[v].size())]++;
    }
    s.diameter = diam;
    s.radius = g.size() ? rad : 0;

    // clustering
    std::uint64_t closed = 0, open = 0;
    double local_sum = 0;
    for (std::uint32_t v = 0; v < g.size(); ++v) {
        auto& nb = g.adj[v];
        std::uint64_t links = 0;
        for (std::size_t i = 0; i < nb.size(); ++i)
            for (std::size_t j = i + 1; j < nb.size(); ++j) {
                bool conn = false;
                for (auto x : g.adj[nb[i]])
                    if (x == nb[j]) conn = true;
                if (conn) ++links;
            }
        std::uint64_t possible = nb.size() < 2 ? 0 : nb.size() * (nb.size() - 1) / 2;
        closed += links;
        open += possible;
        if (possible) local_sum += double(links) / double(possible);
    }
    s.global_clustering = open ? double(closed) / double(open) : 0.0;
    s.mean_local_clustering = g.size() ? local_sum / double(g.size()) : 0.0;

    // fundamental cycles of a BFS forest
    std::vector<std::int32_t> parent(g.size(), -2), depth(g.size(), 0);
    for (std::uint32_t root = 0; root < g.size(); ++root) {
        if (parent[root] != -2) continue;
        parent[root] = -1;
        std::deque<std::uint32_t> q{root};
        while (!q.empty()) {
            auto u = q.front();
            q.pop_front();
            for (auto v : g.adj[u])
                if (parent[v] == -2) {
                    parent[v] = static_cast<std::int32_t>(u);
                    depth[v] = depth[u] + 1;
                    q.push_back(v);
                }
        }
    }
    for (std::uint32_t u = 0; u < g.size(); ++u) {
        for (auto v : g.adj[u]) {
            if (v <= u) continue;
            if (parent[v] == static_cast<std::int32_t>(u) ||
                parent[u] == static_cast<std::int32_t>(v))
                continue;
            // cycle through the tree path u..v
            std::uint32_t a = u, b = v, len = 1;
            while (a != b) {
                if (depth[a] < depth[b]) std::swap(a, b);
                a = static_cast<std::uint32_t>(parent[a]);
                ++len;
            }
            s.cycle_lengths.push_back(len);
        }
    }
    std::sort(s.cycle_lengths.begin(), s.cycle_lengths.end());
    return s;
}

// Two-point volume correlation S_r(s) over vertex pairs at distance s.
inline double correlation(const DistanceGraph& g, std::uint32_t r, std::uint32_t s) {
    if (g.size() < 2) throw SemanticError("correlation: graph too small");
    std::vector<std::uint64_t> vr(g.size());
    for (std::uint32_t v = 0; v < g.size(); ++v) vr[v] = ball_counts(g, v, r)[r];
    double mean = 0;
    for (auto x : vr) mean += static_cast<double>(x);
    mean /= static_cast<double>(g.size());

    double sum = 0;
    std::uint64_t pairs = 0;
    for (std::uint32_t v = 0; v < g.size(); ++v) {
        auto dist = g.distances(v);
        for (std::uint32_t w = 0; w < g.size(); ++w)
            if (dist[w] == static_cast<std::int32_t>(s)) {
                sum += static_cast<double>(vr[v]) * static_cast<double>(vr[w]);
                ++pairs;
            }
    }
    if (!pairs) throw SemanticError("correlation: no pairs at the requested separation");
    double vv = sum / static_cast<double>(pairs);
    return (vv - mean * mean) / (mean * mean);
}

// ---- reference graphs --------------------------------------------------------------

inline DistanceGraph reference_grid(std::uint32_t d, std::uint32_t n, bool periodic) {
    DistanceGraph g;
    std::uint64_t total = 1;
    for (std::uint32_t i = 0; i < d; ++i) total *= n;
    if (total > 3000000) throw ResourceLimit("reference grid too large");
    g.adj.resize(total);
    for (std::uint64_t v = 0; v < total; ++v) {
        std::uint64_t stride = 1;
        for (std::uint32_t a = 0; a < d; ++a) {
            std::uint64_t c = (v / stride) % n;
            if (c + 1 < n)
                g.add_edge(static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(v + stride));
            else if (periodic && n > 2)
                g.add_edge(static_cast<std::uint32_t>(v),
                           static_cast<std::uint32_t>(v - (n - 1) * stride));
            stride *= n;
        }
    }
    return g;
}

inline DistanceGraph reference_tree(std::uint32_t branching, std::uint32_t depth) {
    DistanceGraph g;
    g.add_node();
    std::vector<std::uint32_t> frontier{0};
    for (std::uint32_t d = 0; d < depth; ++d) {
        std::vector<std::uint32_t> next;
        for (auto v : frontier)
            for (std::uint32_t b = 0; b < branching; ++b) {
                auto w = g.add_node();
                g.add_edge(v, w);
                next.push_back(w);
            }
        frontier = std::move(next);
    }
    return g;
}

inline DistanceGraph reference_complete(std::uint32_t n) {
    DistanceGraph g;
    g.adj.resize(n);
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j) g.add_edge(i, j);
    return g;
}

enum class SierpinskiBase { Triangle, Tetrahedron };

inline DistanceGraph reference_sierpinski(std::uint32_t level,
                                          SierpinskiBase base = SierpinskiBase::Triangle) {
    // union-find over provisional nodes, contracted at the end
    std::vector<std::uint32_t> parent;
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    auto unite = [&](std::uint32_t a, std::uint32_t b) { parent[find(a)] = find(b); };
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    auto fresh = [&]() {
        parent.push_back(static_cast<std::uint32_t>(parent.size()));
        return static_cast<std::uint32_t>(parent.size() - 1);
    };

    std::size_t corners = base == SierpinskiBase::Triangle ? 3 : 4;
    std::function<std::vector<std::uint32_t>(std::uint32_t)> build =
        [&](std::uint32_t k) -> std::vector<std::uint32_t> {
        if (k == 0) {
            std::vector<std::uint32_t> c;
            for (std::size_t i = 0; i < corners; ++i) c.push_back(fresh());
            for (std::size_t i = 0; i < corners; ++i)
                for (std::size_t j = i + 1; j < corners; ++j) edges.push_back({c[i], c[j]});
            return c;
        }
        std::vector<std::vector<std::uint32_t>> sub;
        for (std::size_t i = 0; i < corners; ++i) sub.push_back(build(k - 1));
        // copy i keeps its i-th corner outermost; glue corner j of copy i to
        // corner i of copy j
        for (std::size_t i = 0; i < corners; ++i)
            for (std::size_t j = i + 1; j < corners; ++j) unite(sub[i][j], sub[j][i]);
        std::vector<std::uint32_t> c;
        for (std::size_t i = 0; i < corners; ++i) c.push_back(sub[i][i]);
        return c;
    };
    build(level);

    std::unordered_map<std::uint32_t, std::uint32_t> compact;
    DistanceGraph g;
    auto node = [&](std::uint32_t raw) {
        auto root = find(raw);
        auto it = compact.find(root);
        if (it != compact.end()) return it->second;
        auto id = g.add_node();
        compact[root] = id;
        return id;
    };
    for (auto& [a, b] : edges) g.add_edge(node(a), node(b));
    return g;
}

// Geodesic icosahedral sphere of the given frequency: 12 vertices of degree
// five, all others degree six; 10 f^2 + 2 vertices.
inline DistanceGraph reference_geodesic_sphere(std::uint32_t freq) {
    if (freq < 1) throw OutOfRange("geodesic sphere frequency must be >= 1");
    static const int F[20][3] = {{0, 1, 2},  {0, 2, 3},  {0, 3, 4},  {0, 4, 5},  {0, 5, 1},
                                 {1, 6, 2},  {2, 6, 7},  {2, 7, 3},  {3, 7, 8},  {3, 8, 4},
                                 {4, 8, 9},  {4, 9, 5},  {5, 9, 10}, {5, 10, 1}, {1, 10, 6},
                                 {6, 11, 7}, {7, 11, 8}, {8, 11, 9}, {9, 11, 10}, {10, 11, 6}};
    DistanceGraph g;
    std::map<std::tuple<int, int, int>, std::uint32_t> corner_nodes;   // icosa vertex
    std::map<std::tuple<int, int, int, int>, std::uint32_t> edge_nodes; // (a, b, t)
    std::map<std::tuple<int, int, int, int>, std::uint32_t> face_nodes; // (face, i, j)

    auto corner = [&](int v) {
        auto key = std::make_tuple(v, -1, -1);
        auto it = corner_nodes.find(key);
        if (it != corner_nodes.end()) return it->second;
        auto id = g.add_node();
        corner_nodes[key] = id;
        return id;
    };
    auto on_edge = [&](int a, int b, int t) {
        // t steps from a toward b, 0 < t < freq
        if (a > b) {
            std::swap(a, b);
            t = static_cast<int>(freq) - t;
        }
        auto key = std::make_tuple(a, b, t, 0);
        auto it = edge_nodes.find(key);
        if (it != edge_nodes.end()) return it->second;
        auto id = g.add_node();
        edge_nodes[key] = id;
        return id;
    };

    std::uint32_t f = freq;
    for (int face = 0; face < 20; ++face) {
        int A = F[face][0], B = F[face][1], C = F[face][2];
        auto vertex = [&](std::uint32_t i, std::uint32_t j) -> std::uint32_t {
            std::uint32_t k = f - i - j; // barycentric: i toward A? use (i,j,k)
            if (i == f) return corner(A);
            if (j == f) return corner(B);
            if (k == f) return corner(C);
            if (k == 0) return on_edge(A, B, static_cast<int>(j)); // between A and B
            if (j == 0) return on_edge(A, C, static_cast<int>(k));
            if (i == 0) return on_edge(B, C, static_cast<int>(k));
            auto key = std::make_tuple(face, static_cast<int>(i), static_cast<int>(j), 0);
            auto it = face_nodes.find(key);
            if (it != face_nodes.end()) return it->second;
            auto id = g.add_node();
            face_nodes[key] = id;
            return id;
        };
        for (std::uint32_t i = 0; i <= f; ++i) {
            for (std::uint32_t j = 0; i + j <= f; ++j) {
                auto v = vertex(i, j);
                if (i + j < f) {
                    g.add_edge(v, vertex(i + 1, j));
                    g.add_edge(v, vertex(i, j + 1));
                    g.add_edge(vertex(i + 1, j), vertex(i, j + 1));
                }
            }
        }
    }
    return g;
}

} // namespace hyperforge

#endif
