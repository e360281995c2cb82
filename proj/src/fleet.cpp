#include "dispatchsim/fleet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "dispatchsim/error.hpp"

namespace dispatchsim {

namespace {

constexpr std::pair<Category, std::string_view> kCategoryNames[] = {
    {Category::A_red1, "A_red1"},     {Category::A_red2, "A_red2"},
    {Category::C_green1, "C_green1"}, {Category::C_green2, "C_green2"},
    {Category::C_green3, "C_green3"}, {Category::C_green4, "C_green4"},
};

}  // namespace

const char* to_string(Category c) {
    for (const auto& [cat, name] : kCategoryNames) {
        if (cat == c) return name.data();
    }
    return "?";
}

std::optional<Category> parse_category(std::string_view s) {
    for (const auto& [cat, name] : kCategoryNames) {
        if (name == s) return cat;
    }
    return std::nullopt;
}

const char* to_string(VehicleType t) { return t == VehicleType::AEU ? "AEU" : "FRU"; }

std::optional<VehicleType> parse_vehicle_type(std::string_view s) {
    if (s == "AEU") return VehicleType::AEU;
    if (s == "FRU") return VehicleType::FRU;
    return std::nullopt;
}

void validate(const Incident& inc) {
    const auto id = std::to_string(inc.id);
    if (inc.required_responses < 1) {
        throw ValidationError("incident " + id + ": required_responses must be >= 1");
    }
    if (inc.dispatch_time && *inc.dispatch_time < inc.call_time) {
        throw ValidationError("incident " + id + ": dispatch precedes call");
    }
    if (inc.type_determined_time && *inc.type_determined_time < inc.call_time) {
        throw ValidationError("incident " + id + ": type determination precedes call");
    }
}

const IdleWindow* Vehicle::window_at(Seconds t) const {
    // Windows are sorted by start; the candidate is the last one starting at or before t.
    auto it = std::upper_bound(idle_windows.begin(), idle_windows.end(), t,
                               [](Seconds x, const IdleWindow& w) { return x < w.prev_completion.time; });
    if (it == idle_windows.begin()) return nullptr;
    --it;
    return it->contains(t) ? &*it : nullptr;
}

GridPoint interpolate_idle_position(const IdleWindow& w, Seconds t, const RoadGraph& graph) {
    if (!w.contains(t)) {
        throw OutOfWindowError("time " + std::to_string(t) + " outside idle window starting at " +
                               std::to_string(w.prev_completion.time));
    }
    if (!w.next_dispatch) return w.prev_completion.point;
    const Route route = graph.plan_route(graph.snap(w.prev_completion.point), graph.snap(w.next_dispatch->point),
                                         w.prev_completion.time, VehicleClass::Emergency);
    return graph.position_along_route(route, t - w.prev_completion.time);
}

GridPoint interpolate_idle_position(const Vehicle& v, Seconds t, const RoadGraph& graph) {
    const IdleWindow* w = v.window_at(t);
    if (!w) {
        throw OutOfWindowError("vehicle " + std::to_string(v.id) + " is not idle at " + std::to_string(t));
    }
    return interpolate_idle_position(*w, t, graph);
}

const Vehicle* Mission::find_vehicle(VehicleId id) const {
    auto it = std::lower_bound(vehicles.begin(), vehicles.end(), id,
                               [](const Vehicle& v, VehicleId x) { return v.id < x; });
    return it != vehicles.end() && it->id == id ? &*it : nullptr;
}

Mission make_mission(std::shared_ptr<const RoadGraph> graph, std::vector<Incident> tasks,
                     std::vector<Vehicle> vehicles) {
    if (!graph) throw ValidationError("mission requires a road graph");
    std::sort(vehicles.begin(), vehicles.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < vehicles.size(); ++i) {
        if (vehicles[i].id == vehicles[i - 1].id) {
            throw ValidationError("duplicate vehicle id " + std::to_string(vehicles[i].id));
        }
    }
    std::set<IncidentId> seen;
    for (const auto& t : tasks) {
        if (!seen.insert(t.id).second) throw ValidationError("duplicate incident id " + std::to_string(t.id));
    }

    Mission m;
    m.graph = std::move(graph);
    m.tasks = std::move(tasks);
    m.vehicles = std::move(vehicles);
    for (const auto& v : m.vehicles) {
        if (!v.idle_windows.empty()) m.starting_configuration[v.id] = v.idle_windows.front().prev_completion.point;
    }
    return m;
}

double neighbourhood_radius_m(double area_km2) { return std::sqrt(area_km2 / std::numbers::pi) * 1000.0; }

std::vector<Candidate> idle_vehicles_near(const Mission& mission, const Incident& inc, double area_km2) {
    if (!(area_km2 > 0.0)) throw ValidationError("neighbourhood area must be positive");
    const double radius = neighbourhood_radius_m(area_km2);

    std::vector<Candidate> out;
    for (const auto& v : mission.vehicles) {
        const IdleWindow* w = v.window_at(inc.call_time);
        if (!w) continue;
        const GridPoint p = interpolate_idle_position(*w, inc.call_time, *mission.graph);
        if (distance(p, inc.position) <= radius) out.push_back({v.id, p});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.vehicle < b.vehicle; });
    return out;
}

}  // namespace dispatchsim
