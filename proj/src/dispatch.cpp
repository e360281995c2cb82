#include "dispatchsim/dispatch.hpp"

#include <algorithm>
#include <map>

#include "dispatchsim/error.hpp"

namespace dispatchsim {

const char* to_string(Policy p) { return p == Policy::HIST ? "HIST" : "AUCT"; }

Seconds clock_start_time(const Incident& inc) {
    if (inc.category == Category::A_red1) return inc.call_time;
    Seconds start = inc.call_time + kClockStartFallbackS;
    if (inc.dispatch_time) start = std::min(start, *inc.dispatch_time);
    if (inc.type_determined_time) start = std::min(start, *inc.type_determined_time);
    return start;
}

namespace {

DispatchDecision make_decision(const Incident& inc, Policy policy, VehicleId vehicle, const GridPoint& origin,
                               Route route) {
    DispatchDecision d;
    d.incident = inc.id;
    d.policy = policy;
    d.vehicle = vehicle;
    d.origin = origin;
    d.simulated_travel_time = route.total_travel_time;
    d.clock_start = clock_start_time(inc);
    d.response_time = route.arrival_time() - d.clock_start;
    d.route = std::move(route);
    return d;
}

}  // namespace

DispatchDecision replay_historical(const Incident& inc, const std::optional<HistoricalResponse>& response,
                                   const RoadGraph& graph, VehicleClass vclass) {
    if (!response) {
        throw SkipIncidentError("missing_response", "incident " + std::to_string(inc.id) + " has no response record");
    }
    try {
        Route route = graph.plan_route(graph.snap(response->dispatch_point), graph.snap(inc.position),
                                       response->dispatch_time, vclass);
        return make_decision(inc, Policy::HIST, response->vehicle, response->dispatch_point, std::move(route));
    } catch (const NoRouteError& e) {
        throw SkipIncidentError("hist_unreachable", e.what());
    }
}

AuctionDispatch auction_dispatch(const Mission& mission, const Incident& inc, const BidPolicy& policy,
                                 const DispatchOptions& options) {
    if (inc.required_responses != 1) {
        throw ValidationError("incident " + std::to_string(inc.id) +
                              ": multi-vehicle responses are not supported (required_responses = " +
                              std::to_string(inc.required_responses) + ")");
    }
    policy.validate();
    for (const auto& name : policy.factor_names) {
        if (name != kFactorTravelTime && name != kFactorRouteLength) {
            throw ValidationError("unsupported bid factor '" + name + "'");
        }
    }

    const RoadGraph& graph = *mission.graph;
    AuctionDispatch out;
    out.candidates = idle_vehicles_near(mission, inc, options.area_km2);
    if (out.candidates.empty()) {
        throw SkipIncidentError("no_candidates",
                                "incident " + std::to_string(inc.id) + ": no idle vehicle in the neighbourhood");
    }

    const NodeId target = graph.snap(inc.position);
    std::map<VehicleId, Route> routes;
    std::vector<Bidder> bidders;
    for (const auto& c : out.candidates) {
        bidders.push_back({c.vehicle, [&, c](const Incident& task, std::span<const IncidentId>) {
                               Route r = graph.plan_route(graph.snap(c.position), target, task.call_time,
                                                          options.vclass);
                               std::vector<double> factors;
                               for (const auto& name : policy.factor_names) {
                                   factors.push_back(name == kFactorTravelTime ? r.total_travel_time
                                                                               : r.total_length);
                               }
                               routes[c.vehicle] = std::move(r);
                               return factors;
                           }});
    }

    const Incident task[] = {inc};
    out.outcome = run_ssi_auction(task, bidders, policy);
    auto won = out.outcome.awards.find(inc.id);
    if (won == out.outcome.awards.end()) {
        throw SkipIncidentError("no_candidates",
                                "incident " + std::to_string(inc.id) + ": no candidate submitted a valid bid");
    }
    const VehicleId winner = won->second;
    const auto cand = std::find_if(out.candidates.begin(), out.candidates.end(),
                                   [&](const Candidate& c) { return c.vehicle == winner; });
    out.decision = make_decision(inc, Policy::AUCT, winner, cand->position, std::move(routes.at(winner)));
    return out;
}

IncidentPair evaluate_incident_pair(const Mission& mission, const Incident& inc,
                                    const std::optional<HistoricalResponse>& response, const BidPolicy& policy,
                                    const DispatchOptions& options) {
    IncidentPair p;
    p.hist = replay_historical(inc, response, *mission.graph, options.vclass);
    AuctionDispatch a = auction_dispatch(mission, inc, policy, options);
    p.auct = std::move(a.decision);
    p.choice_differs = p.hist.vehicle != p.auct.vehicle;
    p.hist_in_neighbourhood = std::any_of(a.candidates.begin(), a.candidates.end(),
                                          [&](const Candidate& c) { return c.vehicle == p.hist.vehicle; });
    return p;
}

}  // namespace dispatchsim
