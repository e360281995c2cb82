#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "dispatchsim/data.hpp"
#include "dispatchsim/roadnet.hpp"

namespace dispatchsim {

// Knobs for the synthetic city. Read from a flat `key = value` file; unknown
// keys are rejected. Lines starting with '#' are comments.
struct GeneratorConfig {
    // Road grid: grid_cols x grid_rows nodes, spacing_m apart, lower-left at the origin.
    int grid_cols = 100;
    int grid_rows = 100;
    double spacing_m = 100.0;
    double origin_easting_m = 520000.0;
    double origin_northing_m = 170000.0;
    int arterial_every = 10;             // every n-th row/column is an arterial road
    double max_detour = 0.3;             // edge length = spacing * U(1, 1 + max_detour)
    double emergency_shortcut_fraction = 0.02;  // grid cells given an EMERGENCY-only diagonal
    double arterial_speed_mps = 20.0;    // emergency free-flow speeds
    double local_speed_mps = 12.0;
    double civilian_speed_factor = 0.6;  // civilian free-flow = emergency * factor
    double rush_hour_factor = 0.7;       // weekday peak multiplier for civilian traffic

    // Administrative tiling.
    int ccg_cols = 2;
    int ccg_rows = 2;

    // Fleet.
    int vehicles = 60;
    double fru_fraction = 0.3;

    // Demand, Poisson in time and uniform in space.
    int start_year = 2016;
    int start_month = 1;
    int months = 12;
    double incidents_per_day = 40.0;
    double category_a_fraction = 0.5;
    double type_determined_fraction = 0.8;
    int type_determined_max_s = 180;

    // Historical dispatcher: picks the nearest available vehicle by straight
    // line, except with probability hist_noise it picks rank 1..hist_max_rank.
    double hist_noise = 0.5;
    int hist_max_rank = 3;
    int on_scene_min_s = 900;
    int on_scene_max_s = 3600;
    // Observed travel = emergency route time * lognormal(0, observed_noise_sd).
    double observed_noise_sd = 0.1;

    void validate() const;
};

GeneratorConfig parse_generator_config(const std::string& text, const std::string& source = "config");
GeneratorConfig load_generator_config(const std::filesystem::path& path);
std::string serialize_generator_config(const GeneratorConfig& config);

struct SyntheticData {
    RoadGraph graph;
    std::vector<IncidentRecord> incidents;
    std::vector<ResponseRecord> responses;
    std::vector<VehicleRecord> vehicles;
    nlohmann::json manifest;
};

SyntheticData generate_synthetic(const GeneratorConfig& config, std::uint64_t seed);

// Writes nodes/edges/profiles, incidents, responses, vehicles and manifest.json.
void write_synthetic(const SyntheticData& data, const std::filesystem::path& dir);

nlohmann::json read_manifest(const std::filesystem::path& dir);

}  // namespace dispatchsim
