#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dispatchsim/geometry.hpp"
#include "dispatchsim/roadnet.hpp"

namespace dispatchsim {

using IncidentId = std::int64_t;
using VehicleId = std::int64_t;
using CcgId = std::int64_t;

// Pre-2017 LAS categories. A = red1/red2, C = green1..green4.
enum class Category { A_red1, A_red2, C_green1, C_green2, C_green3, C_green4 };

const char* to_string(Category c);
std::optional<Category> parse_category(std::string_view s);
inline bool is_category_a(Category c) { return c == Category::A_red1 || c == Category::A_red2; }

struct Incident {
    IncidentId id = 0;
    Seconds call_time = 0.0;
    GridPoint position;
    Category category = Category::A_red1;
    CcgId ccg = 0;
    int required_responses = 1;
    std::optional<Seconds> dispatch_time;
    std::optional<Seconds> type_determined_time;
};

// Throws ValidationError if timestamps precede the call or required_responses < 1.
void validate(const Incident& inc);

enum class VehicleType { AEU, FRU };

const char* to_string(VehicleType t);
std::optional<VehicleType> parse_vehicle_type(std::string_view s);

struct TimedPoint {
    Seconds time = 0.0;
    GridPoint point;
};

// Interval between completing one assignment and being dispatched to the next.
// An open window (no next dispatch) extends forever.
struct IdleWindow {
    TimedPoint prev_completion;
    std::optional<TimedPoint> next_dispatch;

    bool contains(Seconds t) const {
        return prev_completion.time <= t && (!next_dispatch || t <= next_dispatch->time);
    }
};

struct Vehicle {
    VehicleId id = 0;
    VehicleType vtype = VehicleType::AEU;
    CcgId home_ccg = 0;
    std::vector<IdleWindow> idle_windows;  // chronological, non-overlapping

    // Window containing t, if the vehicle is idle at t.
    const IdleWindow* window_at(Seconds t) const;
};

// Vehicles travel between assignments on Emergency-class routes starting at the
// completion time; the position clamps at the next dispatch point.
// Throws OutOfWindowError if t lies outside the window.
GridPoint interpolate_idle_position(const IdleWindow& w, Seconds t, const RoadGraph& graph);
GridPoint interpolate_idle_position(const Vehicle& v, Seconds t, const RoadGraph& graph);

// The map, the scenario, the team and its starting configuration.
struct Mission {
    std::shared_ptr<const RoadGraph> graph;
    std::vector<Incident> tasks;
    std::vector<Vehicle> vehicles;
    std::map<VehicleId, GridPoint> starting_configuration;

    const Vehicle* find_vehicle(VehicleId id) const;
};

// Checks id uniqueness and fills starting_configuration from each vehicle's
// first idle window when it is empty.
Mission make_mission(std::shared_ptr<const RoadGraph> graph, std::vector<Incident> tasks,
                     std::vector<Vehicle> vehicles);

inline constexpr double kDefaultNeighbourhoodKm2 = 20.0;

// Radius in metres of a disc with the given area in km².
double neighbourhood_radius_m(double area_km2);

struct Candidate {
    VehicleId vehicle = 0;
    GridPoint position;

    friend bool operator==(const Candidate&, const Candidate&) = default;
};

// Idle vehicles at inc.call_time whose interpolated position lies within the
// disc of area `area_km2` centred on the incident, ordered by vehicle id.
std::vector<Candidate> idle_vehicles_near(const Mission& mission, const Incident& inc,
                                          double area_km2 = kDefaultNeighbourhoodKm2);

}  // namespace dispatchsim
