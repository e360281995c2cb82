#pragma once

#include <optional>
#include <vector>

#include "dispatchsim/auction.hpp"
#include "dispatchsim/fleet.hpp"
#include "dispatchsim/roadnet.hpp"

namespace dispatchsim {

enum class Policy { HIST, AUCT };
const char* to_string(Policy p);

struct DispatchDecision {
    IncidentId incident = 0;
    Policy policy = Policy::HIST;
    VehicleId vehicle = 0;
    GridPoint origin;
    Route route;
    Seconds simulated_travel_time = 0.0;  // == route.total_travel_time
    Seconds clock_start = 0.0;
    Seconds response_time = 0.0;  // arrival - clock_start
};

// Red1 calls start the clock when answered; everything else at the earliest of
// dispatch, type determination and call + 240 s.
Seconds clock_start_time(const Incident& inc);

inline constexpr Seconds kClockStartFallbackS = 240.0;

// The recorded first response to an incident.
struct HistoricalResponse {
    VehicleId vehicle = 0;
    Seconds dispatch_time = 0.0;
    GridPoint dispatch_point;
};

// Re-routes the historically dispatched vehicle from where and when it was
// dispatched. Throws SkipIncidentError ("missing_response" / "hist_unreachable").
DispatchDecision replay_historical(const Incident& inc, const std::optional<HistoricalResponse>& response,
                                   const RoadGraph& graph, VehicleClass vclass = VehicleClass::Emergency);

struct DispatchOptions {
    double area_km2 = kDefaultNeighbourhoodKm2;
    VehicleClass vclass = VehicleClass::Emergency;
};

struct AuctionDispatch {
    DispatchDecision decision;
    std::vector<Candidate> candidates;
    AuctionOutcome outcome;
};

// Factors a dispatch bidder can supply, by policy factor name.
inline constexpr const char* kFactorTravelTime = "estimated_travel_time_s";
inline constexpr const char* kFactorRouteLength = "route_length_m";

// Announces the incident to idle vehicles in its neighbourhood and awards it
// to the lowest bid. Candidates route from their interpolated positions at the
// call time. Throws SkipIncidentError ("no_candidates") when nobody can bid and
// ValidationError for multi-vehicle incidents or unsupported factors.
AuctionDispatch auction_dispatch(const Mission& mission, const Incident& inc, const BidPolicy& policy,
                                 const DispatchOptions& options = {});

struct IncidentPair {
    DispatchDecision hist;
    DispatchDecision auct;
    bool choice_differs = false;
    bool hist_in_neighbourhood = false;
};

IncidentPair evaluate_incident_pair(const Mission& mission, const Incident& inc,
                                    const std::optional<HistoricalResponse>& response, const BidPolicy& policy,
                                    const DispatchOptions& options = {});

}  // namespace dispatchsim
