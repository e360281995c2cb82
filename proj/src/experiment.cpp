#include "dispatchsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <random>
#include <thread>
#include <variant>

#include "dispatchsim/error.hpp"
#include "dispatchsim/stats.hpp"

namespace dispatchsim {

std::optional<HistoricalResponse> historical_response(const Dataset& ds, IncidentId id) {
    auto it = ds.first_response.find(id);
    if (it == ds.first_response.end()) return std::nullopt;
    const auto& r = it->second;
    return HistoricalResponse{r.vehicle_id, static_cast<Seconds>(r.dispatch_time),
                              {r.dispatch_easting_m, r.dispatch_northing_m}};
}

Mission make_mission(std::shared_ptr<const RoadGraph> graph, const Dataset& ds) {
    return make_mission(std::move(graph), ds.incidents, ds.vehicles);
}

std::vector<PairSummary> ConditionRun::summaries() const {
    std::vector<PairSummary> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(summarize(p));
    return out;
}

namespace {

struct Evaluated {
    std::variant<IncidentPair, Exclusion> result;
    std::string round_log;
    double deliberation = 0.0;
};

Evaluated evaluate(const Mission& mission, const Dataset& ds, const Incident& inc, const RunOptions& options) {
    Evaluated ev;
    const DispatchOptions dopt{options.area_km2, options.vclass};
    try {
        IncidentPair pair;
        pair.hist = replay_historical(inc, historical_response(ds, inc.id), *mission.graph, options.vclass);
        AuctionDispatch a = auction_dispatch(mission, inc, options.policy, dopt);
        ev.round_log = round_log_jsonl(a.outcome);
        ev.deliberation = a.outcome.deliberation_time;
        pair.auct = std::move(a.decision);
        pair.choice_differs = pair.hist.vehicle != pair.auct.vehicle;
        pair.hist_in_neighbourhood = std::any_of(a.candidates.begin(), a.candidates.end(),
                                                 [&](const Candidate& c) { return c.vehicle == pair.hist.vehicle; });
        if (!pair.hist_in_neighbourhood && options.exclude_hist_outside) {
            ev.result = Exclusion{inc.id, "hist_outside_neighbourhood"};
        } else {
            ev.result = std::move(pair);
        }
    } catch (const SkipIncidentError& e) {
        ev.result = Exclusion{inc.id, e.reason()};
    }
    return ev;
}

}  // namespace

ConditionRun run_condition(const Mission& mission, const Dataset& ds, const ExperimentCondition& cond,
                           const RunOptions& options) {
    ConditionRun run;
    run.condition = cond;
    const std::vector<Incident> sample = sample_condition(ds, cond);

    std::vector<Evaluated> results(sample.size());
    const unsigned workers = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(sample.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < sample.size(); ++i) results[i] = evaluate(mission, ds, sample[i], options);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < workers; ++w) {
                pool.emplace_back([&] {
                    for (std::size_t i = next++; i < sample.size(); i = next++) {
                        try {
                            results[i] = evaluate(mission, ds, sample[i], options);
                        } catch (...) {
                            std::lock_guard lock(failure_mutex);
                            if (!failure) failure = std::current_exception();
                        }
                    }
                });
            }
        }
        if (failure) std::rethrow_exception(failure);
    }

    for (auto& ev : results) {
        if (auto* p = std::get_if<IncidentPair>(&ev.result)) {
            run.pairs.push_back(std::move(*p));
        } else {
            run.exclusions.push_back(std::get<Exclusion>(ev.result));
        }
        run.round_log += ev.round_log;
        run.deliberation_time_s += ev.deliberation;
    }
    return run;
}

BenchmarkResult run_benchmark(const Dataset& ds, const RoadGraph& graph, std::size_t sample, std::uint64_t seed) {
    if (sample < 1) throw ValidationError("benchmark sample size must be >= 1");
    std::vector<IncidentId> pool;
    for (const auto& inc : ds.incidents) {
        if (is_category_a(inc.category) && ds.first_response.contains(inc.id)) pool.push_back(inc.id);
    }
    if (pool.size() < sample) {
        throw ShortfallError("benchmark: " + std::to_string(pool.size()) + " Category A responses available, " +
                             std::to_string(sample) + " requested");
    }
    std::vector<IncidentId> chosen;
    std::mt19937_64 rng(seed);
    std::sample(pool.begin(), pool.end(), std::back_inserter(chosen), sample, rng);

    BenchmarkResult b;
    for (IncidentId id : chosen) {
        const Incident& inc = *ds.find_incident(id);
        const auto& r = ds.first_response.at(id);
        const GridPoint from{r.dispatch_easting_m, r.dispatch_northing_m};
        const auto depart = static_cast<Seconds>(r.dispatch_time);
        try {
            const double e = graph.estimate_travel_time(from, inc.position, depart, VehicleClass::Emergency);
            const double c = graph.estimate_travel_time(from, inc.position, depart, VehicleClass::Civilian);
            b.incidents.push_back(id);
            b.observed_s.push_back(r.observed_travel_time_s);
            b.emergency_s.push_back(e);
            b.civilian_s.push_back(c);
        } catch (const NoRouteError&) {
            ++b.skipped;
        }
    }
    b.n = b.incidents.size();
    if (b.n == 0) throw ShortfallError("benchmark: no routable journeys in the sample");
    b.mean_observed_s = mean(b.observed_s);
    b.mean_emergency_s = mean(b.emergency_s);
    b.mean_civilian_s = mean(b.civilian_s);
    b.w1_emergency = wasserstein_1d(b.observed_s, b.emergency_s);
    b.w1_civilian = wasserstein_1d(b.observed_s, b.civilian_s);
    return b;
}

}  // namespace dispatchsim
