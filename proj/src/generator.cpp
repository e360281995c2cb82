#include "dispatchsim/generator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <tuple>
#include <variant>

#include "dispatchsim/csv.hpp"
#include "dispatchsim/error.hpp"

namespace dispatchsim {

namespace {

using Field = std::variant<int GeneratorConfig::*, double GeneratorConfig::*>;

const std::pair<const char*, Field> kFields[] = {
    {"grid_cols", &GeneratorConfig::grid_cols},
    {"grid_rows", &GeneratorConfig::grid_rows},
    {"spacing_m", &GeneratorConfig::spacing_m},
    {"origin_easting_m", &GeneratorConfig::origin_easting_m},
    {"origin_northing_m", &GeneratorConfig::origin_northing_m},
    {"arterial_every", &GeneratorConfig::arterial_every},
    {"max_detour", &GeneratorConfig::max_detour},
    {"emergency_shortcut_fraction", &GeneratorConfig::emergency_shortcut_fraction},
    {"arterial_speed_mps", &GeneratorConfig::arterial_speed_mps},
    {"local_speed_mps", &GeneratorConfig::local_speed_mps},
    {"civilian_speed_factor", &GeneratorConfig::civilian_speed_factor},
    {"rush_hour_factor", &GeneratorConfig::rush_hour_factor},
    {"ccg_cols", &GeneratorConfig::ccg_cols},
    {"ccg_rows", &GeneratorConfig::ccg_rows},
    {"vehicles", &GeneratorConfig::vehicles},
    {"fru_fraction", &GeneratorConfig::fru_fraction},
    {"start_year", &GeneratorConfig::start_year},
    {"start_month", &GeneratorConfig::start_month},
    {"months", &GeneratorConfig::months},
    {"incidents_per_day", &GeneratorConfig::incidents_per_day},
    {"category_a_fraction", &GeneratorConfig::category_a_fraction},
    {"type_determined_fraction", &GeneratorConfig::type_determined_fraction},
    {"type_determined_max_s", &GeneratorConfig::type_determined_max_s},
    {"hist_noise", &GeneratorConfig::hist_noise},
    {"hist_max_rank", &GeneratorConfig::hist_max_rank},
    {"on_scene_min_s", &GeneratorConfig::on_scene_min_s},
    {"on_scene_max_s", &GeneratorConfig::on_scene_max_s},
    {"observed_noise_sd", &GeneratorConfig::observed_noise_sd},
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

bool is_multiple_of_quantum(double v) { return std::fmod(v, kQuantumM) == 0.0; }

void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError("generator config: " + what);
}

std::int64_t epoch_seconds(int year, int month) {
    using namespace std::chrono;
    const sys_days d{std::chrono::year{year} / std::chrono::month{static_cast<unsigned>(month)} / 1};
    return static_cast<std::int64_t>(d.time_since_epoch().count()) * 86400;
}

std::string month_label(int year, int month) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
}

double round_tenth(double v) { return std::round(v * 10.0) / 10.0; }

struct SimVehicle {
    VehicleId id = 0;
    NodeId station = 0;
    GridPoint station_point;
    std::int64_t idle_since = 0;
    GridPoint idle_from;
    std::optional<Route> homeward;
};

}  // namespace

void GeneratorConfig::validate() const {
    require(grid_cols >= 2 && grid_rows >= 2, "grid must be at least 2x2");
    require(spacing_m > 0.0 && is_multiple_of_quantum(spacing_m), "spacing_m must be a positive multiple of 100");
    require(origin_easting_m >= 0.0 && origin_northing_m >= 0.0 && is_multiple_of_quantum(origin_easting_m) &&
                is_multiple_of_quantum(origin_northing_m),
            "origin must be non-negative multiples of 100");
    require(arterial_every >= 1, "arterial_every must be >= 1");
    require(max_detour >= 0.0 && max_detour <= 2.0, "max_detour must be in [0, 2]");
    require(emergency_shortcut_fraction >= 0.0 && emergency_shortcut_fraction <= 1.0,
            "emergency_shortcut_fraction must be in [0, 1]");
    require(arterial_speed_mps > 0.0 && arterial_speed_mps <= 50.0, "arterial_speed_mps must be in (0, 50]");
    require(local_speed_mps > 0.0 && local_speed_mps <= 50.0, "local_speed_mps must be in (0, 50]");
    require(civilian_speed_factor > 0.0 && civilian_speed_factor <= 1.0, "civilian_speed_factor must be in (0, 1]");
    require(rush_hour_factor > 0.0 && rush_hour_factor <= 1.0, "rush_hour_factor must be in (0, 1]");
    require(ccg_cols >= 1 && ccg_rows >= 1, "CCG tiling must be at least 1x1");
    require(vehicles >= 1, "vehicles must be >= 1");
    require(fru_fraction >= 0.0 && fru_fraction <= 1.0, "fru_fraction must be in [0, 1]");
    require(start_month >= 1 && start_month <= 12, "start_month must be in 1..12");
    require(start_year >= 1970 && start_year <= 2200, "start_year out of range");
    require(months >= 1, "months must be >= 1");
    require(incidents_per_day > 0.0, "incidents_per_day must be positive");
    require(category_a_fraction >= 0.0 && category_a_fraction <= 1.0, "category_a_fraction must be in [0, 1]");
    require(type_determined_fraction >= 0.0 && type_determined_fraction <= 1.0,
            "type_determined_fraction must be in [0, 1]");
    require(type_determined_max_s >= 1, "type_determined_max_s must be >= 1");
    require(hist_noise >= 0.0 && hist_noise <= 1.0, "hist_noise must be in [0, 1]");
    require(hist_max_rank >= 1, "hist_max_rank must be >= 1");
    require(on_scene_min_s >= 1 && on_scene_max_s >= on_scene_min_s, "on-scene range must satisfy 1 <= min <= max");
    require(observed_noise_sd >= 0.0, "observed_noise_sd must be non-negative");
}

GeneratorConfig parse_generator_config(const std::string& text, const std::string& source) {
    GeneratorConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ParseError(source, line_no, "expected key = value");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        const auto* field = std::find_if(std::begin(kFields), std::end(kFields),
                                         [&](const auto& f) { return key == f.first; });
        if (field == std::end(kFields)) throw ParseError(source, line_no, "unknown key '" + key + "'");
        std::visit(
            [&](auto member) {
                using T = std::remove_reference_t<decltype(cfg.*member)>;
                T v{};
                std::istringstream vs(value);
                if (!(vs >> v) || !vs.eof()) {
                    throw ParseError(source, line_no, key + ": invalid value '" + value + "'");
                }
                cfg.*member = v;
            },
            field->second);
    }
    cfg.validate();
    return cfg;
}

GeneratorConfig load_generator_config(const std::filesystem::path& path) {
    return parse_generator_config(csv::read_text(path), path.filename().string());
}

std::string serialize_generator_config(const GeneratorConfig& config) {
    std::ostringstream out;
    for (const auto& [name, field] : kFields) {
        out << name << " = ";
        std::visit(
            [&](auto member) {
                if constexpr (std::is_same_v<decltype(member), double GeneratorConfig::*>) {
                    out << csv::format_real(config.*member);
                } else {
                    out << config.*member;
                }
            },
            field);
        out << '\n';
    }
    return out.str();
}

SyntheticData generate_synthetic(const GeneratorConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Speed profiles. Emergency speeds dominate civilian ones hour by hour.
    std::vector<SpeedProfile> profiles;
    auto make_profiles = [&](const std::string& stem, double free_flow) {
        SpeedProfile e{stem + "_E", {}};
        SpeedProfile c{stem + "_C", {}};
        for (int h = 0; h < kHoursPerWeek; ++h) {
            const int day = h / 24;
            const int hour = h % 24;
            const bool peak = day < 5 && ((hour >= 7 && hour < 10) || (hour >= 16 && hour < 19));
            const bool night = hour < 6;
            const double es = std::min(free_flow * (peak ? 0.9 : 1.0) * (night ? 1.05 : 1.0), kMaxSpeedMps);
            const double cs = free_flow * cfg.civilian_speed_factor * (peak ? cfg.rush_hour_factor : 1.0) *
                              (night ? 1.1 : 1.0);
            e.speeds[static_cast<std::size_t>(h)] = es;
            c.speeds[static_cast<std::size_t>(h)] = std::min(cs, es);
        }
        profiles.push_back(e);
        profiles.push_back(c);
    };
    make_profiles("arterial", cfg.arterial_speed_mps);
    make_profiles("local", cfg.local_speed_mps);

    const int cols = cfg.grid_cols;
    const int rows = cfg.grid_rows;
    auto node_id = [&](int r, int c) { return static_cast<NodeId>(r) * cols + c + 1; };
    std::vector<RoadNode> nodes;
    nodes.reserve(static_cast<std::size_t>(rows * cols));
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            nodes.push_back({node_id(r, c),
                             {cfg.origin_easting_m + c * cfg.spacing_m, cfg.origin_northing_m + r * cfg.spacing_m}});
        }
    }

    std::vector<RoadEdge> edges;
    std::size_t emergency_only = 0;
    auto add_road = [&](NodeId a, NodeId b, double length, const std::string& stem, Access access) {
        edges.push_back({a, b, length, stem + "_E", stem + "_C", access});
        edges.push_back({b, a, length, stem + "_E", stem + "_C", access});
        if (access == Access::EmergencyOnly) emergency_only += 2;
    };
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) {
                const double len = round_tenth(cfg.spacing_m * (1.0 + cfg.max_detour * unit(rng)));
                add_road(node_id(r, c), node_id(r, c + 1), len, r % cfg.arterial_every == 0 ? "arterial" : "local",
                         Access::All);
            }
            if (r + 1 < rows) {
                const double len = round_tenth(cfg.spacing_m * (1.0 + cfg.max_detour * unit(rng)));
                add_road(node_id(r, c), node_id(r + 1, c), len, c % cfg.arterial_every == 0 ? "arterial" : "local",
                         Access::All);
            }
            if (r + 1 < rows && c + 1 < cols && unit(rng) < cfg.emergency_shortcut_fraction) {
                add_road(node_id(r, c), node_id(r + 1, c + 1), round_tenth(cfg.spacing_m * std::numbers::sqrt2 + 0.05),
                         "local", Access::EmergencyOnly);
            }
        }
    }

    RoadGraph graph(std::move(nodes), std::move(edges), std::move(profiles));

    const double width = (cols - 1) * cfg.spacing_m;
    const double height = (rows - 1) * cfg.spacing_m;
    auto ccg_of = [&](const GridPoint& p) -> CcgId {
        const int bc = std::clamp(static_cast<int>((p.easting - cfg.origin_easting_m) / (width / cfg.ccg_cols)), 0,
                                  cfg.ccg_cols - 1);
        const int br = std::clamp(static_cast<int>((p.northing - cfg.origin_northing_m) / (height / cfg.ccg_rows)), 0,
                                  cfg.ccg_rows - 1);
        return static_cast<CcgId>(br) * cfg.ccg_cols + bc + 1;
    };

    const std::int64_t start = epoch_seconds(cfg.start_year, cfg.start_month);
    const int end_month_index = (cfg.start_month - 1) + cfg.months;
    const std::int64_t end = epoch_seconds(cfg.start_year + end_month_index / 12, end_month_index % 12 + 1);

    SyntheticData out{std::move(graph), {}, {}, {}, {}};
    const RoadGraph& g = out.graph;

    // Fleet at random stations.
    std::uniform_int_distribution<std::size_t> pick_node(0, g.nodes().size() - 1);
    std::vector<SimVehicle> fleet;
    for (int i = 0; i < cfg.vehicles; ++i) {
        SimVehicle v;
        v.id = 100 + i;
        const RoadNode& station = g.nodes()[pick_node(rng)];
        v.station = station.id;
        v.station_point = station.position;
        v.idle_since = start;
        v.idle_from = station.position;
        const VehicleType vtype = unit(rng) < cfg.fru_fraction ? VehicleType::FRU : VehicleType::AEU;
        out.vehicles.push_back({v.id, vtype, ccg_of(station.position), VehicleEvent::Start, start,
                                station.position.easting, station.position.northing});
        fleet.push_back(std::move(v));
    }
    std::map<VehicleId, VehicleRecord> identity;
    for (const auto& r : out.vehicles) identity[r.vehicle_id] = r;

    // Incident stream.
    std::exponential_distribution<double> gap(cfg.incidents_per_day / 86400.0);
    std::uniform_int_distribution<int> green(0, 3);
    std::uniform_int_distribution<int> type_delay(1, cfg.type_determined_max_s);
    std::uniform_int_distribution<int> on_scene(cfg.on_scene_min_s, cfg.on_scene_max_s);
    std::uniform_int_distribution<int> noisy_rank(1, cfg.hist_max_rank);
    std::lognormal_distribution<double> observed_noise(0.0, cfg.observed_noise_sd);

    const Category greens[] = {Category::C_green1, Category::C_green2, Category::C_green3, Category::C_green4};
    std::size_t category_a = 0;
    std::size_t without_response = 0;
    double clock = static_cast<double>(start);
    for (IncidentId id = 1;; ++id) {
        clock += gap(rng);
        const auto call = static_cast<std::int64_t>(std::floor(clock));
        if (call >= end) break;

        IncidentRecord inc;
        inc.incident_id = id;
        inc.call_time = call;
        const GridPoint pos = quantize_location(
            {cfg.origin_easting_m + unit(rng) * width, cfg.origin_northing_m + unit(rng) * height});
        inc.easting_m = pos.easting;
        inc.northing_m = pos.northing;
        inc.ccg_id = ccg_of(pos);
        if (unit(rng) < cfg.category_a_fraction) {
            inc.category = unit(rng) < 0.5 ? Category::A_red1 : Category::A_red2;
            ++category_a;
        } else {
            inc.category = greens[green(rng)];
        }
        if (unit(rng) < cfg.type_determined_fraction) inc.type_determined_time = call + type_delay(rng);
        out.incidents.push_back(inc);

        // Available vehicles ranked by straight-line distance from where they are now.
        std::vector<std::pair<double, std::size_t>> ranked;
        for (std::size_t i = 0; i < fleet.size(); ++i) {
            const SimVehicle& v = fleet[i];
            if (v.idle_since >= call) continue;
            const GridPoint now = v.homeward ? g.position_along_route(*v.homeward, static_cast<double>(call - v.idle_since))
                                             : v.idle_from;
            ranked.emplace_back(distance(now, pos), i);
        }
        const bool noisy = unit(rng) < cfg.hist_noise;
        const int drawn_rank = noisy ? noisy_rank(rng) : 0;
        const double noise_draw = observed_noise(rng);
        const int scene_s = on_scene(rng);
        if (ranked.empty()) {
            ++without_response;
            continue;
        }
        std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
            return a.first < b.first || (a.first == b.first && fleet[a.second].id < fleet[b.second].id);
        });
        SimVehicle& v = fleet[ranked[std::min<std::size_t>(static_cast<std::size_t>(drawn_rank), ranked.size() - 1)].second];

        // Dispatch from the last node reached on the way home, stepping back
        // until a direct route from the completion point reaches it in time.
        const double elapsed = static_cast<double>(call - v.idle_since);
        NodeId from = g.snap(v.idle_from);
        if (v.homeward && !v.homeward->empty()) {
            const Route& home = *v.homeward;
            std::vector<NodeId> reached{home.origin};
            for (std::size_t e = 0; e < home.edges.size(); ++e) {
                const double t_reach = e + 1 < home.edges.size() ? home.entry_times[e + 1] : home.arrival_time();
                if (t_reach - home.departure_time > elapsed) break;
                reached.push_back(g.edges()[home.edges[e]].to);
            }
            while (reached.size() > 1 &&
                   g.plan_route(home.origin, reached.back(), home.departure_time, VehicleClass::Emergency)
                           .total_travel_time > elapsed) {
                reached.pop_back();
            }
            from = reached.back();
        }
        const GridPoint dispatch_point = g.node(from).position;

        Route trip;
        try {
            trip = g.plan_route(from, g.snap(pos), static_cast<double>(call), VehicleClass::Emergency);
        } catch (const NoRouteError&) {
            ++without_response;
            continue;
        }
        const double observed = round_tenth(trip.total_travel_time * noise_draw);
        const std::int64_t arrival = call + static_cast<std::int64_t>(std::llround(observed));
        const std::int64_t completion = arrival + scene_s;

        out.responses.push_back({id, v.id, call, dispatch_point.easting, dispatch_point.northing, arrival, observed});
        VehicleRecord done = identity.at(v.id);
        done.event = VehicleEvent::Complete;
        done.time = completion;
        done.easting_m = pos.easting;
        done.northing_m = pos.northing;
        out.vehicles.push_back(done);

        v.idle_since = completion;
        v.idle_from = pos;
        v.homeward = g.plan_route(g.snap(pos), v.station, static_cast<double>(completion), VehicleClass::Emergency);
    }

    std::stable_sort(out.vehicles.begin(), out.vehicles.end(), [](const auto& a, const auto& b) {
        return std::tie(a.vehicle_id, a.time) < std::tie(b.vehicle_id, b.time);
    });

    nlohmann::json config = nlohmann::json::object();
    for (const auto& [name, field] : kFields) {
        std::visit([&](auto member) { config[name] = cfg.*member; }, field);
    }
    out.manifest = {
        {"seed", seed},
        {"config", config},
        {"span",
         {{"start_time", start},
          {"end_time", end},
          {"first_month", month_label(cfg.start_year, cfg.start_month)},
          {"months", cfg.months}}},
        {"counts",
         {{"nodes", g.nodes().size()},
          {"edges", g.edges().size()},
          {"emergency_only_edges", emergency_only},
          {"profiles", g.profiles().size()},
          {"incidents", out.incidents.size()},
          {"category_a_incidents", category_a},
          {"responses", out.responses.size()},
          {"incidents_without_response", without_response},
          {"vehicles", fleet.size()},
          {"vehicle_records", out.vehicles.size()},
          // Every START/COMPLETE record opens exactly one idle window.
          {"idle_windows", out.vehicles.size()},
          {"ccgs", cfg.ccg_cols * cfg.ccg_rows}}},
    };
    return out;
}

void write_synthetic(const SyntheticData& data, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_graph(data.graph, dir);
    csv::write_text(dir / "incidents.csv", serialize_incidents(data.incidents));
    csv::write_text(dir / "responses.csv", serialize_responses(data.responses));
    csv::write_text(dir / "vehicles.csv", serialize_vehicles(data.vehicles));
    csv::write_text(dir / "manifest.json", data.manifest.dump(2) + "\n");
}

nlohmann::json read_manifest(const std::filesystem::path& dir) {
    try {
        return nlohmann::json::parse(csv::read_text(dir / "manifest.json"));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("manifest.json: " + std::string(e.what()));
    }
}

}  // namespace dispatchsim
