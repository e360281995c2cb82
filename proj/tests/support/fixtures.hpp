#pragma once

// Test-only fixtures and brute-force oracles. Nothing here calls into the
// routing, auction or statistics code under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "dispatchsim/generator.hpp"
#include "dispatchsim/roadnet.hpp"

namespace dispatchsim::testing {

inline SpeedProfile constant_profile(const std::string& id, double speed) {
    SpeedProfile p{id, {}};
    p.speeds.fill(speed);
    return p;
}

// Directed edge list spec for small hand-built graphs.
struct EdgeSpec {
    NodeId from, to;
    double length;
    Access access = Access::All;
};

// Nodes 1..n at the given positions; every edge uses profile "E" (emergency)
// and "C" (civilian).
inline RoadGraph make_graph(const std::vector<GridPoint>& positions, const std::vector<EdgeSpec>& edges,
                            double emergency_speed = 10.0, double civilian_speed = 10.0) {
    std::vector<RoadNode> nodes;
    for (std::size_t i = 0; i < positions.size(); ++i) nodes.push_back({static_cast<NodeId>(i + 1), positions[i]});
    std::vector<RoadEdge> es;
    for (const auto& e : edges) es.push_back({e.from, e.to, e.length, "E", "C", e.access});
    return RoadGraph(std::move(nodes), std::move(es),
                     {constant_profile("E", emergency_speed), constant_profile("C", civilian_speed)});
}

// Straight east-west line of n nodes spaced `spacing` metres, edges both ways.
inline RoadGraph line_graph(int n, double spacing, double speed) {
    std::vector<GridPoint> pos;
    std::vector<EdgeSpec> edges;
    for (int i = 0; i < n; ++i) pos.push_back({1000.0 + i * spacing, 1000.0});
    for (int i = 1; i < n; ++i) {
        edges.push_back({i, i + 1, spacing});
        edges.push_back({i + 1, i, spacing});
    }
    return make_graph(pos, edges, speed, speed);
}

// cols x rows grid, `spacing` metres apart from (1000, 1000), two-way edges.
// Node id = r * cols + c + 1.
inline RoadGraph grid_graph(int cols, int rows, double spacing, double speed) {
    std::vector<GridPoint> pos;
    std::vector<EdgeSpec> edges;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) pos.push_back({1000.0 + c * spacing, 1000.0 + r * spacing});
    }
    auto id = [&](int r, int c) { return static_cast<NodeId>(r * cols + c + 1); };
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) {
                edges.push_back({id(r, c), id(r, c + 1), spacing});
                edges.push_back({id(r, c + 1), id(r, c), spacing});
            }
            if (r + 1 < rows) {
                edges.push_back({id(r, c), id(r + 1, c), spacing});
                edges.push_back({id(r + 1, c), id(r, c), spacing});
            }
        }
    }
    return make_graph(pos, edges, speed, speed * 0.6);
}

// Random graph with constant per-edge speeds. Each edge gets its own pair of
// constant profiles so speeds vary across edges; some edges are emergency-only.
struct RandomGraph {
    RoadGraph graph;
    std::vector<double> emergency_speed;  // per edge
    std::vector<double> civilian_speed;   // per edge
};

inline RandomGraph random_graph(int n, std::uint64_t seed, double edge_density = 0.12) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(0.0, 5000.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> speed(3.0, 30.0);

    std::vector<RoadNode> nodes;
    for (int i = 0; i < n; ++i) nodes.push_back({static_cast<NodeId>(10 + 3 * i), {coord(rng), coord(rng)}});
    std::vector<RoadEdge> edges;
    std::vector<SpeedProfile> profiles;
    RandomGraph out{RoadGraph({{1, {0, 0}}}, {}, {}), {}, {}};
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            if (a == b || unit(rng) > edge_density) continue;
            const double straight = std::hypot(nodes[a].position.easting - nodes[b].position.easting,
                                               nodes[a].position.northing - nodes[b].position.northing);
            const double length = std::max(1.0, straight * (0.8 + 0.6 * unit(rng)));
            const double es = speed(rng);
            const double cs = std::min(es, speed(rng));
            const auto k = std::to_string(edges.size());
            profiles.push_back(constant_profile("e" + k, es));
            profiles.push_back(constant_profile("c" + k, cs));
            edges.push_back({nodes[a].id, nodes[b].id, length, "e" + k, "c" + k,
                             unit(rng) < 0.1 ? Access::EmergencyOnly : Access::All});
            out.emergency_speed.push_back(es);
            out.civilian_speed.push_back(cs);
        }
    }
    out.graph = RoadGraph(std::move(nodes), std::move(edges), std::move(profiles));
    return out;
}

// All-pairs minimum travel time by Floyd-Warshall on constant edge costs.
// Result indexed by position in graph.nodes(); infinity when unreachable.
inline std::vector<std::vector<double>> floyd_warshall(const RoadGraph& g, const std::vector<double>& speed,
                                                       bool emergency) {
    const std::size_t n = g.nodes().size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
    auto idx = [&](NodeId id) {
        for (std::size_t i = 0; i < n; ++i) {
            if (g.nodes()[i].id == id) return i;
        }
        return n;
    };
    for (std::size_t i = 0; i < n; ++i) d[i][i] = 0.0;
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
        const auto& edge = g.edges()[e];
        if (!emergency && edge.access == Access::EmergencyOnly) continue;
        const std::size_t a = idx(edge.from), b = idx(edge.to);
        d[a][b] = std::min(d[a][b], edge.length / speed[e]);
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
            }
        }
    }
    return d;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("dispatchsim_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// Default-config synthetic dataset, generated once per process.
inline constexpr std::uint64_t kSyntheticSeed = 7;

inline const std::filesystem::path& synthetic_dir() {
    static const std::filesystem::path dir = [] {
        auto d = scratch_dir("synthetic");
        write_synthetic(generate_synthetic(GeneratorConfig{}, kSyntheticSeed), d);
        return d;
    }();
    return dir;
}

}  // namespace dispatchsim::testing
