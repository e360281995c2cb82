#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "dispatchsim/error.hpp"
#include "dispatchsim/fleet.hpp"
#include "fixtures.hpp"

using namespace dispatchsim;
using namespace dispatchsim::testing;

namespace {

constexpr Seconds kT0 = 1451865600.0;

// Grid node position for the 25x25, 200 m grid used below.
GridPoint at(int c, int r) { return {1000.0 + 200.0 * c, 1000.0 + 200.0 * r}; }

IdleWindow window(GridPoint from, Seconds t, std::optional<TimedPoint> next = std::nullopt) {
    return {{t, from}, next};
}

Vehicle idle_vehicle(VehicleId id, GridPoint p) { return {id, VehicleType::AEU, 1, {window(p, 0.0)}}; }

}  // namespace

TEST_CASE("interpolate_idle_position") {
    const auto g = grid_graph(25, 25, 200.0, 10.0);
    const IdleWindow w = window(at(0, 0), kT0, TimedPoint{kT0 + 10000.0, at(10, 0)});

    CHECK(interpolate_idle_position(w, kT0, g) == at(0, 0));
    // 2000 m at 10 m/s takes 200 s; afterwards the vehicle waits at the dispatch point.
    CHECK(interpolate_idle_position(w, kT0 + 200.0, g) == at(10, 0));
    CHECK(interpolate_idle_position(w, kT0 + 5000.0, g) == at(10, 0));
    CHECK(interpolate_idle_position(w, kT0 + 10000.0, g) == at(10, 0));

    const auto route = g.plan_route(g.snap(at(0, 0)), g.snap(at(10, 0)), kT0, VehicleClass::Emergency);
    const Seconds half = route.total_travel_time / 2.0;
    CHECK(interpolate_idle_position(w, kT0 + half, g) == g.position_along_route(route, half));

    CHECK_THROWS_AS(interpolate_idle_position(w, kT0 - 1.0, g), OutOfWindowError);
    CHECK_THROWS_AS(interpolate_idle_position(w, kT0 + 10000.5, g), OutOfWindowError);

    SUBCASE("open window stays at the completion point") {
        const IdleWindow open = window(at(3, 4), kT0);
        for (double dt : {0.0, 1.0, 1e3, 1e7}) CHECK(interpolate_idle_position(open, kT0 + dt, g) == at(3, 4));
    }
    SUBCASE("vehicle overload picks the containing window") {
        Vehicle v{5, VehicleType::FRU, 1,
                  {window(at(0, 0), kT0, TimedPoint{kT0 + 100.0, at(0, 0)}), window(at(5, 5), kT0 + 500.0)}};
        CHECK(interpolate_idle_position(v, kT0 + 50.0, g) == at(0, 0));
        CHECK(interpolate_idle_position(v, kT0 + 600.0, g) == at(5, 5));
        CHECK_THROWS_AS(interpolate_idle_position(v, kT0 + 300.0, g), OutOfWindowError);
    }
}

TEST_CASE("interpolated positions are continuous in time") {
    const auto g = grid_graph(25, 25, 200.0, 13.0);
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> cell(0, 24);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        const IdleWindow w = window(at(cell(rng), cell(rng)), kT0, TimedPoint{kT0 + 4000.0, at(cell(rng), cell(rng))});
        const Seconds t1 = kT0 + 3999.0 * unit(rng);
        const Seconds t2 = t1 + unit(rng);
        const double moved = distance(interpolate_idle_position(w, t1, g), interpolate_idle_position(w, t2, g));
        CHECK(moved <= 13.0 * (t2 - t1) + 1e-6);
    }
}

TEST_CASE("neighbourhood disc") {
    CHECK(neighbourhood_radius_m(20.0) == doctest::Approx(2523.13).epsilon(1e-5));
    CHECK(neighbourhood_radius_m(std::numbers::pi) == doctest::Approx(1000.0));

    auto graph = std::make_shared<const RoadGraph>(grid_graph(25, 25, 200.0, 10.0));
    const Incident inc{1, 5000.0, at(5, 5), Category::A_red1, 1};
    auto mission = make_mission(graph, {inc},
                                {idle_vehicle(1, at(5, 5)), idle_vehicle(2, at(20, 5)),  // 3.0 km east
                                 idle_vehicle(3, at(17, 5))});                            // 2.4 km east
    const auto got = idle_vehicles_near(mission, inc);
    REQUIRE(got.size() == 2);
    CHECK(got[0] == Candidate{1, at(5, 5)});
    CHECK(got[1].vehicle == 3);
    CHECK(idle_vehicles_near(mission, inc, 40.0).size() == 3);
    CHECK_THROWS_AS(idle_vehicles_near(mission, inc, 0.0), ValidationError);

    SUBCASE("vehicles not idle at the call time are skipped") {
        Vehicle busy{9, VehicleType::AEU, 1, {window(at(5, 5), 6000.0)}};
        auto m2 = make_mission(graph, {inc}, {busy});
        CHECK(idle_vehicles_near(m2, inc).empty());
    }
}

TEST_CASE("neighbourhood membership against an exhaustive scan") {
    auto graph = std::make_shared<const RoadGraph>(grid_graph(25, 25, 200.0, 10.0));
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> cell(0, 24);
    std::uniform_real_distribution<double> when(0.0, 3000.0);

    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Vehicle> fleet;
        for (int v = 0; v < 20; ++v) {
            const Seconds start = when(rng);
            fleet.push_back({100 + v, VehicleType::AEU, 1,
                             {window(at(cell(rng), cell(rng)), start,
                                     TimedPoint{start + 1500.0 + when(rng), at(cell(rng), cell(rng))})}});
        }
        const Incident inc{trial + 1, 2000.0, at(cell(rng), cell(rng)), Category::A_red2, 1};
        auto mission = make_mission(graph, {inc}, fleet);

        for (double area : {2.0, 5.0, 20.0}) {
            const double radius = std::sqrt(area * 1e6 / std::numbers::pi);
            std::set<VehicleId> expected;
            for (const auto& v : fleet) {
                const auto& w = v.idle_windows.front();
                if (!w.contains(inc.call_time)) continue;
                if (distance(interpolate_idle_position(w, inc.call_time, *graph), inc.position) <= radius) {
                    expected.insert(v.id);
                }
            }
            std::set<VehicleId> got;
            for (const auto& c : idle_vehicles_near(mission, inc, area)) got.insert(c.vehicle);
            CHECK(got == expected);
        }

        // Monotone in area.
        const auto small = idle_vehicles_near(mission, inc, 3.0);
        const auto large = idle_vehicles_near(mission, inc, 12.0);
        for (const auto& c : small) {
            CHECK(std::find(large.begin(), large.end(), c) != large.end());
        }

        // Invariant under permutation of the vehicle list.
        auto shuffled = fleet;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(idle_vehicles_near(make_mission(graph, {inc}, shuffled), inc) == idle_vehicles_near(mission, inc));
    }
}

TEST_CASE("make_mission") {
    auto graph = std::make_shared<const RoadGraph>(grid_graph(3, 3, 200.0, 10.0));
    const Incident inc{1, 0.0, at(0, 0), Category::A_red1, 1};
    CHECK_THROWS_AS(make_mission(graph, {inc}, {idle_vehicle(1, at(0, 0)), idle_vehicle(1, at(1, 1))}),
                    ValidationError);
    CHECK_THROWS_AS(make_mission(graph, {inc, inc}, {}), ValidationError);
    auto m = make_mission(graph, {inc}, {idle_vehicle(7, at(1, 1)), idle_vehicle(3, at(2, 2))});
    CHECK(m.vehicles.front().id == 3);
    CHECK(m.starting_configuration.at(7) == at(1, 1));
    CHECK(m.find_vehicle(7) != nullptr);
    CHECK(m.find_vehicle(8) == nullptr);
}

TEST_CASE("incident validation and categories") {
    Incident inc{1, 100.0, {0, 0}, Category::C_green2, 1};
    CHECK_NOTHROW(validate(inc));
    inc.dispatch_time = 50.0;
    CHECK_THROWS_AS(validate(inc), ValidationError);
    inc.dispatch_time.reset();
    inc.required_responses = 0;
    CHECK_THROWS_AS(validate(inc), ValidationError);

    for (auto c : {Category::A_red1, Category::A_red2, Category::C_green1, Category::C_green2, Category::C_green3,
                   Category::C_green4}) {
        CHECK(parse_category(to_string(c)) == c);
    }
    CHECK_FALSE(parse_category("amber").has_value());
    CHECK(is_category_a(Category::A_red2));
    CHECK_FALSE(is_category_a(Category::C_green1));
}
