#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dispatchsim/fleet.hpp"

namespace dispatchsim {

// Rounds each coordinate to the nearest multiple of 100 m, halves upward.
// Throws ValidationError for non-finite input.
GridPoint quantize_location(const GridPoint& raw);

inline constexpr double kQuantumM = 100.0;

struct IncidentRecord {
    IncidentId incident_id = 0;
    std::int64_t call_time = 0;
    Category category = Category::A_red1;
    double easting_m = 0.0;
    double northing_m = 0.0;
    CcgId ccg_id = 0;
    std::optional<std::int64_t> type_determined_time;
};

struct ResponseRecord {
    IncidentId incident_id = 0;
    VehicleId vehicle_id = 0;
    std::int64_t dispatch_time = 0;
    double dispatch_easting_m = 0.0;
    double dispatch_northing_m = 0.0;
    std::int64_t arrival_time = 0;
    double observed_travel_time_s = 0.0;
};

// START: vehicle enters service idle at a position.
// COMPLETE: vehicle finishes an assignment and becomes idle at a position.
enum class VehicleEvent { Start, Complete };

struct VehicleRecord {
    VehicleId vehicle_id = 0;
    VehicleType vtype = VehicleType::AEU;
    CcgId home_ccg = 0;
    VehicleEvent event = VehicleEvent::Start;
    std::int64_t time = 0;
    double easting_m = 0.0;
    double northing_m = 0.0;
};

inline constexpr const char* kIncidentsHeader =
    "incident_id,call_time,category,easting_m,northing_m,ccg_id,type_determined_time";
inline constexpr const char* kResponsesHeader =
    "incident_id,vehicle_id,dispatch_time,dispatch_easting_m,dispatch_northing_m,arrival_time,"
    "observed_travel_time_s";
inline constexpr const char* kVehiclesHeader = "vehicle_id,vtype,home_ccg,event,time,easting_m,northing_m";

// Cross-referenced, quantized records plus the derived domain objects.
struct Dataset {
    std::vector<IncidentRecord> incident_records;
    std::vector<ResponseRecord> response_records;
    std::vector<VehicleRecord> vehicle_records;

    std::vector<Incident> incidents;  // sorted by id
    // First-dispatched response per incident (earliest dispatch, then lowest vehicle id).
    std::map<IncidentId, ResponseRecord> first_response;
    std::vector<Vehicle> vehicles;  // sorted by id, idle windows built from the records

    const Incident* find_incident(IncidentId id) const;
};

// Builds a Dataset from in-memory records; coordinates are quantized and every
// cross-reference and ordering rule is checked (ValidationError otherwise).
Dataset build_dataset(std::vector<IncidentRecord> incidents, std::vector<ResponseRecord> responses,
                      std::vector<VehicleRecord> vehicles);

Dataset ingest(const std::filesystem::path& incidents_csv, const std::filesystem::path& responses_csv,
               const std::filesystem::path& vehicles_csv);
// incidents.csv, responses.csv and vehicles.csv inside `dir`.
Dataset ingest_dir(const std::filesystem::path& dir);

void write_records(const Dataset& ds, const std::filesystem::path& dir);

std::string serialize_incidents(const std::vector<IncidentRecord>& rows);
std::string serialize_responses(const std::vector<ResponseRecord>& rows);
std::string serialize_vehicles(const std::vector<VehicleRecord>& rows);

// Calendar month (UTC) of a timestamp.
std::chrono::year_month month_of(Seconds t);

struct ExperimentCondition {
    std::string name;
    std::chrono::year_month first_month{std::chrono::year{2016}, std::chrono::January};
    int month_count = 1;
    std::vector<CcgId> ccgs;  // empty means every CCG
    std::size_t sample_size = 100;
    bool category_a_only = true;
    std::uint64_t seed = 0;

    void validate() const;
    bool matches(const Incident& inc) const;
};

inline constexpr const char* kConditionNames[] = {"1M-1C", "12M-1C", "1M-nC", "12M-nC"};

// One of the four standard conditions. The month range starts at the month of
// the earliest incident; the single-CCG conditions use the lowest CCG id.
ExperimentCondition standard_condition(const std::string& name, const Dataset& ds, std::uint64_t seed,
                                       std::size_t sample_size = 100);

// Uniform sample without replacement of matching incidents, returned in
// ascending id order. Throws ShortfallError if too few incidents match.
std::vector<Incident> sample_condition(const Dataset& ds, const ExperimentCondition& cond);

}  // namespace dispatchsim
