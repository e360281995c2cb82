#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "dispatchsim/geometry.hpp"

namespace dispatchsim {

using NodeId = std::int64_t;
using EdgeIndex = std::size_t;

// Seconds since the Unix epoch. Routes carry fractional seconds.
using Seconds = double;

inline constexpr int kHoursPerWeek = 168;
inline constexpr double kMaxSpeedMps = 60.0;

// Hour-of-week slot for a timestamp, 0 = Monday 00:00 UTC.
int hour_of_week(Seconds t);

enum class VehicleClass { Emergency, Civilian };
enum class Access { All, EmergencyOnly };

const char* to_string(VehicleClass c);
const char* to_string(Access a);

struct SpeedProfile {
    std::string id;
    std::array<double, kHoursPerWeek> speeds{};  // m/s

    double at(Seconds t) const { return speeds[static_cast<std::size_t>(hour_of_week(t))]; }
    double max_speed() const;
};

struct RoadNode {
    NodeId id = 0;
    GridPoint position;
};

struct RoadEdge {
    NodeId from = 0;
    NodeId to = 0;
    double length = 0.0;  // metres
    std::string profile_emergency;
    std::string profile_civilian;
    Access access = Access::All;
};

struct Route {
    NodeId origin = 0;
    NodeId destination = 0;
    std::vector<EdgeIndex> edges;
    Seconds departure_time = 0.0;
    std::vector<Seconds> entry_times;  // one per edge
    std::vector<Seconds> entry_offsets;  // entry_times minus departure, kept unrounded
    double total_length = 0.0;
    Seconds total_travel_time = 0.0;

    bool empty() const { return edges.empty(); }
    Seconds arrival_time() const { return departure_time + total_travel_time; }
};

// Directed road network with per-class hour-of-week speed profiles.
// Immutable once constructed; all queries are const and thread-safe.
class RoadGraph {
public:
    // Validates every invariant; throws ValidationError naming the offender.
    RoadGraph(std::vector<RoadNode> nodes, std::vector<RoadEdge> edges,
              std::vector<SpeedProfile> profiles);

    const std::vector<RoadNode>& nodes() const { return nodes_; }
    const std::vector<RoadEdge>& edges() const { return edges_; }
    const std::vector<SpeedProfile>& profiles() const { return profiles_; }

    bool contains(NodeId id) const { return index_.contains(id); }
    const RoadNode& node(NodeId id) const;
    const std::vector<EdgeIndex>& out_edges(NodeId id) const;

    bool traversable(EdgeIndex e, VehicleClass vclass) const;
    const SpeedProfile& profile(EdgeIndex e, VehicleClass vclass) const;
    // Frozen-link traversal: speed fixed by the hour-of-week at entry.
    Seconds traversal_time(EdgeIndex e, VehicleClass vclass, Seconds entry) const;

    // Nearest node by Euclidean distance; ties go to the smallest id.
    NodeId snap(const GridPoint& p) const;

    // Minimum-travel-time route under the frozen-link rule.
    // Throws ValidationError for unknown nodes, NoRouteError if unreachable.
    Route plan_route(NodeId origin, NodeId dest, Seconds departure, VehicleClass vclass) const;

    Seconds estimate_travel_time(const GridPoint& from, const GridPoint& to, Seconds departure,
                                 VehicleClass vclass) const;

    // Point reached after `elapsed` seconds along `route`; clamps at the destination.
    GridPoint position_along_route(const Route& route, Seconds elapsed) const;

private:
    std::size_t node_index(NodeId id) const;
    void build_spatial_index();

    std::vector<RoadNode> nodes_;
    std::vector<RoadEdge> edges_;
    std::vector<SpeedProfile> profiles_;

    std::unordered_map<NodeId, std::size_t> index_;
    std::vector<std::vector<EdgeIndex>> adjacency_;
    // Per edge, per class: index into profiles_.
    std::vector<std::array<std::size_t, 2>> edge_profile_;
    // Seconds-per-metre lower bound used as an admissible, consistent A* heuristic.
    std::array<double, 2> min_pace_{};

    // Uniform bucket grid over node positions for snapping.
    double cell_size_ = 1.0;
    double min_e_ = 0.0, min_n_ = 0.0;
    std::size_t cols_ = 1, rows_ = 1;
    std::vector<std::vector<std::size_t>> cells_;
};

// Free-function spellings of the routing operations.
inline NodeId snap_to_node(const RoadGraph& g, const GridPoint& p) { return g.snap(p); }
inline Route plan_route(const RoadGraph& g, NodeId origin, NodeId dest, Seconds departure,
                        VehicleClass vclass) {
    return g.plan_route(origin, dest, departure, vclass);
}
inline Seconds estimate_travel_time(const RoadGraph& g, const GridPoint& from, const GridPoint& to,
                                    Seconds departure, VehicleClass vclass) {
    return g.estimate_travel_time(from, to, departure, vclass);
}
inline GridPoint position_along_route(const Route& route, const RoadGraph& g, Seconds elapsed) {
    return g.position_along_route(route, elapsed);
}

// Graph files: nodes.csv, edges.csv, profiles.csv inside `dir`.
inline constexpr const char* kNodesHeader = "id,easting_m,northing_m";
inline constexpr const char* kEdgesHeader =
    "from,to,length_m,profile_emergency,profile_civilian,access";
std::string profiles_header();

RoadGraph load_graph(const std::filesystem::path& dir);
void write_graph(const RoadGraph& g, const std::filesystem::path& dir);

}  // namespace dispatchsim
