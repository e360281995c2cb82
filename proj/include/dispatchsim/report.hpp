#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dispatchsim/dispatch.hpp"

namespace dispatchsim {

// The per-incident numbers a report needs; what the decision log stores.
struct PairSummary {
    IncidentId incident = 0;
    VehicleId hist_vehicle = 0;
    VehicleId auct_vehicle = 0;
    Seconds hist_travel_s = 0.0;
    Seconds auct_travel_s = 0.0;
    Seconds hist_response_s = 0.0;
    Seconds auct_response_s = 0.0;
    Seconds hist_clock_start_s = 0.0;
    Seconds auct_clock_start_s = 0.0;
    bool choice_differs = false;
};

PairSummary summarize(const IncidentPair& p);

struct Exclusion {
    IncidentId incident = 0;
    std::string reason;
};

struct ComparisonReport {
    std::string condition;
    std::string profile;
    std::size_t n = 0;
    double mean_hist_s = 0.0;
    double mean_auct_s = 0.0;
    double t_statistic = 0.0;  // Welch, HIST minus AUCT
    double p_value = 1.0;
    double welch_df = 0.0;
    double pct_choice_differs = 0.0;
    std::size_t excluded_count = 0;
    double mean_hist_response_s = 0.0;
    double mean_auct_response_s = 0.0;
    // Paired test on the same incidents; absent when the differences have no spread.
    std::optional<double> paired_t_statistic;
    std::optional<double> paired_p_value;

    friend bool operator==(const ComparisonReport&, const ComparisonReport&) = default;
};

// Aggregates travel-time means, the two-tailed Welch test and the choice
// difference. Throws ShortfallError with fewer than two pairs.
ComparisonReport build_report(const std::string& condition, const std::string& profile,
                              std::span<const PairSummary> pairs, std::size_t excluded_count);

extern const char* const kReportHeader;
std::string serialize_reports(std::span<const ComparisonReport> reports);
std::vector<ComparisonReport> parse_reports(const std::string& text, const std::string& source = "report.csv");

inline constexpr const char* kDecisionLogHeader =
    "incident_id,policy,vehicle_id,travel_time_s,response_time_s,clock_start_s,choice_differs";
// Two rows per incident, HIST then AUCT.
std::string serialize_decision_log(std::span<const PairSummary> pairs);
std::vector<PairSummary> read_decision_log(const std::filesystem::path& path);

inline constexpr const char* kExclusionsHeader = "incident_id,reason";
std::string serialize_exclusions(std::span<const Exclusion> exclusions);
std::vector<Exclusion> read_exclusions(const std::filesystem::path& path);

// One travel time per line for each policy: <dir>/hist_travel_times.csv and
// <dir>/auct_travel_times.csv. Returns the paths written.
std::vector<std::filesystem::path> export_distributions(std::span<const PairSummary> pairs,
                                                        const std::filesystem::path& dir);

}  // namespace dispatchsim
