#include "dispatchsim/data.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "dispatchsim/csv.hpp"
#include "dispatchsim/error.hpp"

namespace dispatchsim {

GridPoint quantize_location(const GridPoint& raw) {
    if (!std::isfinite(raw.easting) || !std::isfinite(raw.northing)) {
        throw ValidationError("cannot quantize a non-finite coordinate");
    }
    auto q = [](double v) { return std::floor(v / kQuantumM + 0.5) * kQuantumM; };
    return {q(raw.easting), q(raw.northing)};
}

namespace {

GridPoint quantized_checked(double e, double n, const std::string& what) {
    const GridPoint q = quantize_location({e, n});
    if (q.easting < 0.0 || q.northing < 0.0) throw ValidationError(what + ": negative grid coordinate");
    return q;
}

std::string opt(const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : std::string(); }

}  // namespace

const Incident* Dataset::find_incident(IncidentId id) const {
    auto it = std::lower_bound(incidents.begin(), incidents.end(), id,
                               [](const Incident& i, IncidentId x) { return i.id < x; });
    return it != incidents.end() && it->id == id ? &*it : nullptr;
}

Dataset build_dataset(std::vector<IncidentRecord> incidents, std::vector<ResponseRecord> responses,
                      std::vector<VehicleRecord> vehicles) {
    Dataset ds;

    for (auto& r : incidents) {
        const GridPoint q = quantized_checked(r.easting_m, r.northing_m, "incident " + std::to_string(r.incident_id));
        r.easting_m = q.easting;
        r.northing_m = q.northing;
        Incident inc;
        inc.id = r.incident_id;
        inc.call_time = static_cast<Seconds>(r.call_time);
        inc.position = q;
        inc.category = r.category;
        inc.ccg = r.ccg_id;
        if (r.type_determined_time) inc.type_determined_time = static_cast<Seconds>(*r.type_determined_time);
        ds.incidents.push_back(inc);
    }
    std::sort(ds.incidents.begin(), ds.incidents.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < ds.incidents.size(); ++i) {
        if (ds.incidents[i].id == ds.incidents[i - 1].id) {
            throw ValidationError("duplicate incident_id " + std::to_string(ds.incidents[i].id));
        }
    }

    // Per-vehicle identity and raw timeline events.
    struct Event {
        std::int64_t time;
        int order;  // START/COMPLETE sort before DISPATCH at equal times
        VehicleEvent kind;
        bool dispatch;
        GridPoint point;
    };
    std::map<VehicleId, Vehicle> fleet;
    std::map<VehicleId, std::vector<Event>> events;
    for (auto& r : vehicles) {
        const GridPoint q = quantized_checked(r.easting_m, r.northing_m, "vehicle " + std::to_string(r.vehicle_id));
        r.easting_m = q.easting;
        r.northing_m = q.northing;
        auto [it, fresh] = fleet.try_emplace(r.vehicle_id);
        if (fresh) {
            it->second.id = r.vehicle_id;
            it->second.vtype = r.vtype;
            it->second.home_ccg = r.home_ccg;
        } else if (it->second.vtype != r.vtype || it->second.home_ccg != r.home_ccg) {
            throw ValidationError("vehicle " + std::to_string(r.vehicle_id) + ": inconsistent vtype/home_ccg");
        }
        events[r.vehicle_id].push_back({r.time, 0, r.event, false, q});
    }

    for (auto& r : responses) {
        const Incident* inc = ds.find_incident(r.incident_id);
        if (!inc) {
            throw ValidationError("response references unknown incident_id " + std::to_string(r.incident_id));
        }
        if (!fleet.contains(r.vehicle_id)) {
            throw ValidationError("response for incident " + std::to_string(r.incident_id) +
                                  " references unknown vehicle_id " + std::to_string(r.vehicle_id));
        }
        if (r.arrival_time < r.dispatch_time) {
            throw ValidationError("response for incident " + std::to_string(r.incident_id) +
                                  ": arrival precedes dispatch");
        }
        if (static_cast<Seconds>(r.dispatch_time) < inc->call_time) {
            throw ValidationError("response for incident " + std::to_string(r.incident_id) +
                                  ": dispatch precedes call");
        }
        if (!std::isfinite(r.observed_travel_time_s) || r.observed_travel_time_s < 0.0) {
            throw ValidationError("response for incident " + std::to_string(r.incident_id) +
                                  ": observed travel time must be finite and non-negative");
        }
        const GridPoint q = quantized_checked(r.dispatch_easting_m, r.dispatch_northing_m,
                                              "response for incident " + std::to_string(r.incident_id));
        r.dispatch_easting_m = q.easting;
        r.dispatch_northing_m = q.northing;
        events[r.vehicle_id].push_back({r.dispatch_time, 1, VehicleEvent::Complete, true, q});

        auto [it, fresh] = ds.first_response.try_emplace(r.incident_id, r);
        if (!fresh && std::tie(r.dispatch_time, r.vehicle_id) < std::tie(it->second.dispatch_time, it->second.vehicle_id)) {
            it->second = r;
        }
    }

    for (auto& inc : ds.incidents) {
        auto it = ds.first_response.find(inc.id);
        if (it != ds.first_response.end()) inc.dispatch_time = static_cast<Seconds>(it->second.dispatch_time);
        validate(inc);
    }

    for (auto& [id, evs] : events) {
        std::stable_sort(evs.begin(), evs.end(),
                         [](const Event& a, const Event& b) { return std::tie(a.time, a.order) < std::tie(b.time, b.order); });
        Vehicle& v = fleet[id];
        const std::string who = "vehicle " + std::to_string(id);
        if (evs.front().dispatch || evs.front().kind != VehicleEvent::Start) {
            throw ValidationError(who + ": timeline must begin with a START record");
        }
        std::optional<TimedPoint> idle_since;
        bool started = false;
        for (const auto& e : evs) {
            if (e.dispatch) {
                if (!idle_since) throw ValidationError(who + ": dispatched at " + std::to_string(e.time) + " while busy");
                if (!(idle_since->time < static_cast<Seconds>(e.time))) {
                    throw ValidationError(who + ": dispatch at " + std::to_string(e.time) +
                                          " does not follow its previous completion");
                }
                v.idle_windows.push_back({*idle_since, TimedPoint{static_cast<Seconds>(e.time), e.point}});
                idle_since.reset();
            } else if (e.kind == VehicleEvent::Start) {
                if (started) throw ValidationError(who + ": more than one START record");
                started = true;
                idle_since = TimedPoint{static_cast<Seconds>(e.time), e.point};
            } else {
                if (idle_since) throw ValidationError(who + ": COMPLETE at " + std::to_string(e.time) + " while idle");
                idle_since = TimedPoint{static_cast<Seconds>(e.time), e.point};
            }
        }
        if (idle_since) v.idle_windows.push_back({*idle_since, std::nullopt});
        ds.vehicles.push_back(std::move(v));
    }

    ds.incident_records = std::move(incidents);
    ds.response_records = std::move(responses);
    ds.vehicle_records = std::move(vehicles);
    return ds;
}

Dataset ingest(const std::filesystem::path& incidents_csv, const std::filesystem::path& responses_csv,
               const std::filesystem::path& vehicles_csv) {
    std::vector<IncidentRecord> incidents;
    csv::read_file(incidents_csv, kIncidentsHeader, [&](const csv::Row& row) {
        IncidentRecord r;
        r.incident_id = row.integer(0);
        r.call_time = row.integer(1);
        auto cat = parse_category(row.raw(2));
        if (!cat) row.fail("category: unknown value '" + std::string(row.raw(2)) + "'");
        r.category = *cat;
        r.easting_m = row.real(3);
        r.northing_m = row.real(4);
        r.ccg_id = row.integer(5);
        r.type_determined_time = row.optional_integer(6);
        incidents.push_back(r);
    });

    std::vector<ResponseRecord> responses;
    csv::read_file(responses_csv, kResponsesHeader, [&](const csv::Row& row) {
        responses.push_back({row.integer(0), row.integer(1), row.integer(2), row.real(3), row.real(4),
                             row.integer(5), row.real(6)});
    });

    std::vector<VehicleRecord> vehicles;
    csv::read_file(vehicles_csv, kVehiclesHeader, [&](const csv::Row& row) {
        VehicleRecord r;
        r.vehicle_id = row.integer(0);
        auto vt = parse_vehicle_type(row.raw(1));
        if (!vt) row.fail("vtype: expected AEU or FRU");
        r.vtype = *vt;
        r.home_ccg = row.integer(2);
        if (row.raw(3) == "START") {
            r.event = VehicleEvent::Start;
        } else if (row.raw(3) == "COMPLETE") {
            r.event = VehicleEvent::Complete;
        } else {
            row.fail("event: expected START or COMPLETE");
        }
        r.time = row.integer(4);
        r.easting_m = row.real(5);
        r.northing_m = row.real(6);
        vehicles.push_back(r);
    });

    return build_dataset(std::move(incidents), std::move(responses), std::move(vehicles));
}

Dataset ingest_dir(const std::filesystem::path& dir) {
    return ingest(dir / "incidents.csv", dir / "responses.csv", dir / "vehicles.csv");
}

std::string serialize_incidents(const std::vector<IncidentRecord>& rows) {
    std::ostringstream out;
    out << kIncidentsHeader << '\n';
    for (const auto& r : rows) {
        out << r.incident_id << ',' << r.call_time << ',' << to_string(r.category) << ','
            << csv::format_real(r.easting_m) << ',' << csv::format_real(r.northing_m) << ',' << r.ccg_id << ','
            << opt(r.type_determined_time) << '\n';
    }
    return out.str();
}

std::string serialize_responses(const std::vector<ResponseRecord>& rows) {
    std::ostringstream out;
    out << kResponsesHeader << '\n';
    for (const auto& r : rows) {
        out << r.incident_id << ',' << r.vehicle_id << ',' << r.dispatch_time << ','
            << csv::format_real(r.dispatch_easting_m) << ',' << csv::format_real(r.dispatch_northing_m) << ','
            << r.arrival_time << ',' << csv::format_real(r.observed_travel_time_s) << '\n';
    }
    return out.str();
}

std::string serialize_vehicles(const std::vector<VehicleRecord>& rows) {
    std::ostringstream out;
    out << kVehiclesHeader << '\n';
    for (const auto& r : rows) {
        out << r.vehicle_id << ',' << to_string(r.vtype) << ',' << r.home_ccg << ','
            << (r.event == VehicleEvent::Start ? "START" : "COMPLETE") << ',' << r.time << ','
            << csv::format_real(r.easting_m) << ',' << csv::format_real(r.northing_m) << '\n';
    }
    return out.str();
}

void write_records(const Dataset& ds, const std::filesystem::path& dir) {
    csv::write_text(dir / "incidents.csv", serialize_incidents(ds.incident_records));
    csv::write_text(dir / "responses.csv", serialize_responses(ds.response_records));
    csv::write_text(dir / "vehicles.csv", serialize_vehicles(ds.vehicle_records));
}

std::chrono::year_month month_of(Seconds t) {
    using namespace std::chrono;
    const auto day = static_cast<std::int64_t>(std::floor(t / 86400.0));
    const year_month_day ymd{sys_days{days{day}}};
    return ymd.year() / ymd.month();
}

void ExperimentCondition::validate() const {
    if (month_count < 1) throw ValidationError("condition " + name + ": month range is empty");
    if (sample_size < 1) throw ValidationError("condition " + name + ": sample_size must be >= 1");
}

bool ExperimentCondition::matches(const Incident& inc) const {
    if (category_a_only && !is_category_a(inc.category)) return false;
    const auto m = month_of(inc.call_time);
    if (m < first_month || m >= first_month + std::chrono::months{month_count}) return false;
    return ccgs.empty() || std::find(ccgs.begin(), ccgs.end(), inc.ccg) != ccgs.end();
}

ExperimentCondition standard_condition(const std::string& name, const Dataset& ds, std::uint64_t seed,
                                       std::size_t sample_size) {
    if (std::find(std::begin(kConditionNames), std::end(kConditionNames), name) == std::end(kConditionNames)) {
        throw ValidationError("unknown condition '" + name + "'");
    }
    if (ds.incidents.empty()) throw ShortfallError("dataset has no incidents");

    ExperimentCondition c;
    c.name = name;
    c.seed = seed;
    c.sample_size = sample_size;
    Seconds earliest = ds.incidents.front().call_time;
    CcgId lowest = ds.incidents.front().ccg;
    for (const auto& inc : ds.incidents) {
        earliest = std::min(earliest, inc.call_time);
        lowest = std::min(lowest, inc.ccg);
    }
    c.first_month = month_of(earliest);
    c.month_count = name.starts_with("12M") ? 12 : 1;
    if (name.ends_with("-1C")) c.ccgs = {lowest};
    return c;
}

std::vector<Incident> sample_condition(const Dataset& ds, const ExperimentCondition& cond) {
    cond.validate();
    std::vector<Incident> pool;
    for (const auto& inc : ds.incidents) {
        if (cond.matches(inc)) pool.push_back(inc);
    }
    if (pool.size() < cond.sample_size) {
        throw ShortfallError("condition " + cond.name + ": " + std::to_string(pool.size()) +
                             " matching incidents, " + std::to_string(cond.sample_size) + " required");
    }
    std::vector<Incident> out;
    out.reserve(cond.sample_size);
    std::mt19937_64 rng(cond.seed);
    std::sample(pool.begin(), pool.end(), std::back_inserter(out), cond.sample_size, rng);
    return out;
}

}  // namespace dispatchsim
