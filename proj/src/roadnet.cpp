#include "dispatchsim/roadnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <unordered_set>

#include "dispatchsim/csv.hpp"
#include "dispatchsim/error.hpp"

namespace dispatchsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1970-01-01 was a Thursday; Monday 00:00 is hour 0 of the week.
constexpr std::int64_t kEpochHourOfWeek = 72;

std::size_t class_slot(VehicleClass c) { return c == VehicleClass::Emergency ? 0 : 1; }

double squared_distance(const GridPoint& a, const GridPoint& b) {
    const double de = a.easting - b.easting;
    const double dn = a.northing - b.northing;
    return de * de + dn * dn;
}

}  // namespace

int hour_of_week(Seconds t) {
    const auto hours = static_cast<std::int64_t>(std::floor(t / 3600.0));
    auto how = (hours + kEpochHourOfWeek) % kHoursPerWeek;
    if (how < 0) how += kHoursPerWeek;
    return static_cast<int>(how);
}

const char* to_string(VehicleClass c) {
    return c == VehicleClass::Emergency ? "emergency" : "civilian";
}

const char* to_string(Access a) { return a == Access::All ? "ALL" : "EMERGENCY"; }

double SpeedProfile::max_speed() const { return *std::max_element(speeds.begin(), speeds.end()); }

RoadGraph::RoadGraph(std::vector<RoadNode> nodes, std::vector<RoadEdge> edges,
                     std::vector<SpeedProfile> profiles)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), profiles_(std::move(profiles)) {
    if (nodes_.empty()) throw ValidationError("road graph has no nodes");

    std::unordered_map<std::string, std::size_t> profile_index;
    for (std::size_t i = 0; i < profiles_.size(); ++i) {
        const auto& p = profiles_[i];
        if (!profile_index.emplace(p.id, i).second) {
            throw ValidationError("duplicate speed profile '" + p.id + "'");
        }
        for (int h = 0; h < kHoursPerWeek; ++h) {
            const double s = p.speeds[static_cast<std::size_t>(h)];
            if (!std::isfinite(s) || s <= 0.0 || s > kMaxSpeedMps) {
                throw ValidationError("speed profile '" + p.id + "' hour " + std::to_string(h) +
                                      ": speed must be in (0, 60] m/s");
            }
        }
    }

    index_.reserve(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        if (!std::isfinite(n.position.easting) || !std::isfinite(n.position.northing) ||
            n.position.easting < 0.0 || n.position.northing < 0.0) {
            throw ValidationError("node " + std::to_string(n.id) +
                                  ": coordinates must be finite and non-negative");
        }
        if (!index_.emplace(n.id, i).second) {
            throw ValidationError("duplicate node id " + std::to_string(n.id));
        }
    }

    adjacency_.assign(nodes_.size(), {});
    edge_profile_.resize(edges_.size());
    for (EdgeIndex e = 0; e < edges_.size(); ++e) {
        const auto& edge = edges_[e];
        for (NodeId end : {edge.from, edge.to}) {
            if (!index_.contains(end)) {
                throw ValidationError("edge " + std::to_string(e) + " references unknown node " +
                                      std::to_string(end));
            }
        }
        if (!std::isfinite(edge.length) || edge.length <= 0.0) {
            throw ValidationError("edge " + std::to_string(e) + ": length must be positive");
        }
        auto lookup = [&](const std::string& id) {
            auto it = profile_index.find(id);
            if (it == profile_index.end()) {
                throw ValidationError("edge " + std::to_string(e) + " references unknown profile '" +
                                      id + "'");
            }
            return it->second;
        };
        edge_profile_[e] = {lookup(edge.profile_emergency), lookup(edge.profile_civilian)};
        adjacency_[index_.at(edge.from)].push_back(e);
    }

    for (VehicleClass c : {VehicleClass::Emergency, VehicleClass::Civilian}) {
        double pace = kInf;
        for (EdgeIndex e = 0; e < edges_.size(); ++e) {
            if (!traversable(e, c)) continue;
            const double straight =
                distance(node(edges_[e].from).position, node(edges_[e].to).position);
            if (straight <= 0.0) continue;
            pace = std::min(pace, edges_[e].length / profile(e, c).max_speed() / straight);
        }
        // Shaved so rounding can never make the heuristic overestimate.
        min_pace_[class_slot(c)] = std::isfinite(pace) ? pace * (1.0 - 1e-9) : 0.0;
    }

    build_spatial_index();
}

void RoadGraph::build_spatial_index() {
    double max_e = nodes_.front().position.easting;
    double max_n = nodes_.front().position.northing;
    min_e_ = max_e;
    min_n_ = max_n;
    for (const auto& n : nodes_) {
        min_e_ = std::min(min_e_, n.position.easting);
        min_n_ = std::min(min_n_, n.position.northing);
        max_e = std::max(max_e, n.position.easting);
        max_n = std::max(max_n, n.position.northing);
    }
    const double width = std::max(max_e - min_e_, 1.0);
    const double height = std::max(max_n - min_n_, 1.0);
    cell_size_ = std::max(std::sqrt(width * height / static_cast<double>(nodes_.size())), 1.0);
    cols_ = static_cast<std::size_t>(width / cell_size_) + 1;
    rows_ = static_cast<std::size_t>(height / cell_size_) + 1;
    cells_.assign(cols_ * rows_, {});
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& p = nodes_[i].position;
        const auto cx = std::min(static_cast<std::size_t>((p.easting - min_e_) / cell_size_), cols_ - 1);
        const auto cy = std::min(static_cast<std::size_t>((p.northing - min_n_) / cell_size_), rows_ - 1);
        cells_[cy * cols_ + cx].push_back(i);
    }
}

std::size_t RoadGraph::node_index(NodeId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw ValidationError("unknown node " + std::to_string(id));
    return it->second;
}

const RoadNode& RoadGraph::node(NodeId id) const { return nodes_[node_index(id)]; }

const std::vector<EdgeIndex>& RoadGraph::out_edges(NodeId id) const {
    return adjacency_[node_index(id)];
}

bool RoadGraph::traversable(EdgeIndex e, VehicleClass vclass) const {
    return edges_[e].access == Access::All || vclass == VehicleClass::Emergency;
}

const SpeedProfile& RoadGraph::profile(EdgeIndex e, VehicleClass vclass) const {
    return profiles_[edge_profile_[e][class_slot(vclass)]];
}

Seconds RoadGraph::traversal_time(EdgeIndex e, VehicleClass vclass, Seconds entry) const {
    return edges_[e].length / profile(e, vclass).at(entry);
}

NodeId RoadGraph::snap(const GridPoint& p) const {
    const double qe = std::clamp(p.easting, min_e_, min_e_ + static_cast<double>(cols_) * cell_size_);
    const double qn = std::clamp(p.northing, min_n_, min_n_ + static_cast<double>(rows_) * cell_size_);
    const auto cx = static_cast<std::ptrdiff_t>(
        std::min(static_cast<std::size_t>((qe - min_e_) / cell_size_), cols_ - 1));
    const auto cy = static_cast<std::ptrdiff_t>(
        std::min(static_cast<std::size_t>((qn - min_n_) / cell_size_), rows_ - 1));

    std::size_t best = nodes_.size();
    double best_d2 = kInf;
    auto consider = [&](std::size_t i) {
        const double d2 = squared_distance(nodes_[i].position, p);
        if (best == nodes_.size() || d2 < best_d2 || (d2 == best_d2 && nodes_[i].id < nodes_[best].id)) {
            best = i;
            best_d2 = d2;
        }
    };

    const auto max_ring = static_cast<std::ptrdiff_t>(std::max(cols_, rows_));
    for (std::ptrdiff_t ring = 0; ring <= max_ring; ++ring) {
        // Nodes in this ring or beyond are at least (ring - 1) cells from the
        // projection of p onto the grid box, hence from p itself.
        const double bound = static_cast<double>(std::max<std::ptrdiff_t>(ring - 1, 0)) * cell_size_;
        if (best != nodes_.size() && bound * bound > best_d2) break;
        for (std::ptrdiff_t y = cy - ring; y <= cy + ring; ++y) {
            if (y < 0 || y >= static_cast<std::ptrdiff_t>(rows_)) continue;
            const bool edge_row = (y == cy - ring || y == cy + ring);
            for (std::ptrdiff_t x = cx - ring; x <= cx + ring; x += (edge_row || ring == 0) ? 1 : 2 * ring) {
                if (x < 0 || x >= static_cast<std::ptrdiff_t>(cols_)) continue;
                for (std::size_t i : cells_[static_cast<std::size_t>(y) * cols_ + static_cast<std::size_t>(x)]) {
                    consider(i);
                }
            }
        }
    }
    return nodes_[best].id;
}

Route RoadGraph::plan_route(NodeId origin, NodeId dest, Seconds departure, VehicleClass vclass) const {
    const std::size_t src = node_index(origin);
    const std::size_t dst = node_index(dest);

    Route route;
    route.origin = origin;
    route.destination = dest;
    route.departure_time = departure;
    if (src == dst) return route;

    const double pace = min_pace_[class_slot(vclass)];
    const GridPoint& goal = nodes_[dst].position;
    auto heuristic = [&](std::size_t i) { return pace * distance(nodes_[i].position, goal); };

    // Labels are elapsed seconds since departure; absolute epoch times would
    // cost about seven significant digits.
    constexpr EdgeIndex kNoEdge = std::numeric_limits<EdgeIndex>::max();
    std::vector<double> elapsed(nodes_.size(), kInf);
    std::vector<EdgeIndex> via(nodes_.size(), kNoEdge);
    std::vector<bool> settled(nodes_.size(), false);

    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    elapsed[src] = 0.0;
    open.emplace(heuristic(src), src);

    while (!open.empty()) {
        const std::size_t u = open.top().second;
        open.pop();
        if (settled[u]) continue;
        settled[u] = true;
        if (u == dst) break;
        for (EdgeIndex e : adjacency_[u]) {
            if (!traversable(e, vclass)) continue;
            const std::size_t v = index_.at(edges_[e].to);
            if (settled[v]) continue;
            const double t = elapsed[u] + traversal_time(e, vclass, departure + elapsed[u]);
            if (t < elapsed[v]) {
                elapsed[v] = t;
                via[v] = e;
                open.emplace(t + heuristic(v), v);
            }
        }
    }

    if (!settled[dst]) {
        throw NoRouteError("no " + std::string(to_string(vclass)) + " route from node " +
                           std::to_string(origin) + " to node " + std::to_string(dest));
    }

    for (std::size_t at = dst; at != src;) {
        const EdgeIndex e = via[at];
        route.edges.push_back(e);
        at = index_.at(edges_[e].from);
    }
    std::reverse(route.edges.begin(), route.edges.end());

    double clock = 0.0;
    route.entry_times.reserve(route.edges.size());
    route.entry_offsets.reserve(route.edges.size());
    for (EdgeIndex e : route.edges) {
        route.entry_times.push_back(departure + clock);
        route.entry_offsets.push_back(clock);
        clock += traversal_time(e, vclass, departure + clock);
        route.total_length += edges_[e].length;
    }
    route.total_travel_time = clock;
    return route;
}

Seconds RoadGraph::estimate_travel_time(const GridPoint& from, const GridPoint& to, Seconds departure,
                                        VehicleClass vclass) const {
    return plan_route(snap(from), snap(to), departure, vclass).total_travel_time;
}

GridPoint RoadGraph::position_along_route(const Route& route, Seconds elapsed) const {
    if (route.empty()) return node(route.destination).position;
    if (elapsed >= route.total_travel_time) return node(route.destination).position;
    if (elapsed <= 0.0) return node(route.origin).position;

    // Offsets from departure keep sub-microsecond resolution that epoch seconds lose.
    const auto& offsets = route.entry_offsets;
    auto it = std::upper_bound(offsets.begin(), offsets.end(), elapsed);
    const auto i = static_cast<std::size_t>(std::distance(offsets.begin(), it)) - 1;
    const Seconds enter = offsets[i];
    const Seconds exit = i + 1 < route.edges.size() ? offsets[i + 1] : route.total_travel_time;
    const auto& edge = edges_[route.edges[i]];
    const double f = exit > enter ? std::clamp((elapsed - enter) / (exit - enter), 0.0, 1.0) : 1.0;
    return lerp(node(edge.from).position, node(edge.to).position, f);
}

std::string profiles_header() {
    std::string h = "profile_id";
    for (int i = 0; i < kHoursPerWeek; ++i) h += ",h" + std::to_string(i);
    return h;
}

RoadGraph load_graph(const std::filesystem::path& dir) {
    std::vector<SpeedProfile> profiles;
    csv::read_file(dir / "profiles.csv", profiles_header(), [&](const csv::Row& row) {
        SpeedProfile p;
        p.id = row.text(0);
        for (int h = 0; h < kHoursPerWeek; ++h) {
            p.speeds[static_cast<std::size_t>(h)] = row.real(static_cast<std::size_t>(h) + 1);
        }
        profiles.push_back(std::move(p));
    });

    std::vector<RoadNode> nodes;
    csv::read_file(dir / "nodes.csv", kNodesHeader, [&](const csv::Row& row) {
        nodes.push_back({row.integer(0), {row.real(1), row.real(2)}});
    });

    std::vector<RoadEdge> edges;
    csv::read_file(dir / "edges.csv", kEdgesHeader, [&](const csv::Row& row) {
        RoadEdge e;
        e.from = row.integer(0);
        e.to = row.integer(1);
        e.length = row.real(2);
        e.profile_emergency = row.text(3);
        e.profile_civilian = row.text(4);
        const auto access = row.raw(5);
        if (access == "ALL") {
            e.access = Access::All;
        } else if (access == "EMERGENCY") {
            e.access = Access::EmergencyOnly;
        } else {
            row.fail("access: expected ALL or EMERGENCY, found '" + std::string(access) + "'");
        }
        edges.push_back(std::move(e));
    });

    return RoadGraph(std::move(nodes), std::move(edges), std::move(profiles));
}

void write_graph(const RoadGraph& g, const std::filesystem::path& dir) {
    std::ostringstream nodes;
    nodes << kNodesHeader << '\n';
    for (const auto& n : g.nodes()) {
        nodes << n.id << ',' << csv::format_real(n.position.easting) << ','
              << csv::format_real(n.position.northing) << '\n';
    }
    csv::write_text(dir / "nodes.csv", nodes.str());

    std::ostringstream edges;
    edges << kEdgesHeader << '\n';
    for (const auto& e : g.edges()) {
        edges << e.from << ',' << e.to << ',' << csv::format_real(e.length) << ','
              << e.profile_emergency << ',' << e.profile_civilian << ',' << to_string(e.access) << '\n';
    }
    csv::write_text(dir / "edges.csv", edges.str());

    std::ostringstream profiles;
    profiles << profiles_header() << '\n';
    for (const auto& p : g.profiles()) {
        profiles << p.id;
        for (double s : p.speeds) profiles << ',' << csv::format_real(s);
        profiles << '\n';
    }
    csv::write_text(dir / "profiles.csv", profiles.str());
}

}  // namespace dispatchsim
