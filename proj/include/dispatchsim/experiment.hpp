#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "dispatchsim/data.hpp"
#include "dispatchsim/dispatch.hpp"
#include "dispatchsim/report.hpp"

namespace dispatchsim {

std::optional<HistoricalResponse> historical_response(const Dataset& ds, IncidentId id);

Mission make_mission(std::shared_ptr<const RoadGraph> graph, const Dataset& ds);

struct RunOptions {
    VehicleClass vclass = VehicleClass::Emergency;
    BidPolicy policy = BidPolicy::travel_time();
    double area_km2 = kDefaultNeighbourhoodKm2;
    // Drop incidents whose historical vehicle was not among the auction candidates.
    bool exclude_hist_outside = true;
    unsigned threads = 1;
};

struct ConditionRun {
    ExperimentCondition condition;
    std::vector<IncidentPair> pairs;       // sample order
    std::vector<Exclusion> exclusions;     // sample order
    std::string round_log;                 // JSON lines, one auction round per line
    double deliberation_time_s = 0.0;      // summed over all auctions

    std::vector<PairSummary> summaries() const;
};

// Samples the condition and evaluates every incident independently.
ConditionRun run_condition(const Mission& mission, const Dataset& ds, const ExperimentCondition& cond,
                           const RunOptions& options = {});

struct BenchmarkResult {
    std::size_t n = 0;
    std::size_t skipped = 0;
    std::vector<IncidentId> incidents;
    std::vector<double> observed_s;
    std::vector<double> emergency_s;
    std::vector<double> civilian_s;
    double mean_observed_s = 0.0;
    double mean_emergency_s = 0.0;
    double mean_civilian_s = 0.0;
    double w1_emergency = 0.0;  // vs observed
    double w1_civilian = 0.0;   // vs observed
};

// Re-routes a uniform sample of historical Category A first responses under
// both vehicle classes and compares each with the observed travel times.
// Throws ShortfallError if fewer than `sample` responses are available.
BenchmarkResult run_benchmark(const Dataset& ds, const RoadGraph& graph, std::size_t sample, std::uint64_t seed);

}  // namespace dispatchsim
