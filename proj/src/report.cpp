#include "dispatchsim/report.hpp"

#include <map>
#include <sstream>

#include "dispatchsim/csv.hpp"
#include "dispatchsim/error.hpp"
#include "dispatchsim/stats.hpp"

namespace dispatchsim {

const char* const kReportHeader =
    "condition,profile,n,mean_hist_s,mean_auct_s,t_statistic,p_value,welch_df,pct_choice_differs,"
    "excluded_count,mean_hist_response_s,mean_auct_response_s,paired_t_statistic_ext,paired_p_value_ext";

PairSummary summarize(const IncidentPair& p) {
    return {p.hist.incident,
            p.hist.vehicle,
            p.auct.vehicle,
            p.hist.simulated_travel_time,
            p.auct.simulated_travel_time,
            p.hist.response_time,
            p.auct.response_time,
            p.hist.clock_start,
            p.auct.clock_start,
            p.choice_differs};
}

ComparisonReport build_report(const std::string& condition, const std::string& profile,
                              std::span<const PairSummary> pairs, std::size_t excluded_count) {
    if (pairs.size() < 2) {
        throw ShortfallError("report for " + condition + " needs at least two paired incidents, have " +
                             std::to_string(pairs.size()));
    }
    std::vector<double> hist, auct, hist_rt, auct_rt;
    std::size_t differs = 0;
    for (const auto& p : pairs) {
        hist.push_back(p.hist_travel_s);
        auct.push_back(p.auct_travel_s);
        hist_rt.push_back(p.hist_response_s);
        auct_rt.push_back(p.auct_response_s);
        differs += p.choice_differs ? 1 : 0;
    }

    ComparisonReport r;
    r.condition = condition;
    r.profile = profile;
    r.n = pairs.size();
    r.mean_hist_s = mean(hist);
    r.mean_auct_s = mean(auct);
    const TTestResult welch = welch_t_test(hist, auct);
    r.t_statistic = welch.t;
    r.p_value = welch.p;
    r.welch_df = welch.df;
    r.pct_choice_differs = 100.0 * static_cast<double>(differs) / static_cast<double>(pairs.size());
    r.excluded_count = excluded_count;
    r.mean_hist_response_s = mean(hist_rt);
    r.mean_auct_response_s = mean(auct_rt);
    try {
        const TTestResult paired = paired_t_test(hist, auct);
        r.paired_t_statistic = paired.t;
        r.paired_p_value = paired.p;
    } catch (const DegenerateInputError&) {
    }
    return r;
}

std::string serialize_reports(std::span<const ComparisonReport> reports) {
    auto opt = [](const std::optional<double>& v) { return v ? csv::format_real(*v) : std::string(); };
    std::ostringstream out;
    out << kReportHeader << '\n';
    for (const auto& r : reports) {
        out << r.condition << ',' << r.profile << ',' << r.n << ',' << csv::format_real(r.mean_hist_s) << ','
            << csv::format_real(r.mean_auct_s) << ',' << csv::format_real(r.t_statistic) << ','
            << csv::format_real(r.p_value) << ',' << csv::format_real(r.welch_df) << ','
            << csv::format_real(r.pct_choice_differs) << ',' << r.excluded_count << ','
            << csv::format_real(r.mean_hist_response_s) << ',' << csv::format_real(r.mean_auct_response_s) << ','
            << opt(r.paired_t_statistic) << ',' << opt(r.paired_p_value) << '\n';
    }
    return out.str();
}

std::vector<ComparisonReport> parse_reports(const std::string& text, const std::string& source) {
    std::vector<ComparisonReport> out;
    csv::read_content(text, source, kReportHeader, [&](const csv::Row& row) {
        ComparisonReport r;
        r.condition = row.text(0);
        r.profile = row.text(1);
        r.n = static_cast<std::size_t>(row.integer(2));
        r.mean_hist_s = row.real(3);
        r.mean_auct_s = row.real(4);
        r.t_statistic = row.real(5);
        r.p_value = row.real(6);
        r.welch_df = row.real(7);
        r.pct_choice_differs = row.real(8);
        r.excluded_count = static_cast<std::size_t>(row.integer(9));
        r.mean_hist_response_s = row.real(10);
        r.mean_auct_response_s = row.real(11);
        if (!row.raw(12).empty()) r.paired_t_statistic = row.real(12);
        if (!row.raw(13).empty()) r.paired_p_value = row.real(13);
        out.push_back(std::move(r));
    });
    return out;
}

std::string serialize_decision_log(std::span<const PairSummary> pairs) {
    std::ostringstream out;
    out << kDecisionLogHeader << '\n';
    for (const auto& p : pairs) {
        const char* differs = p.choice_differs ? "1" : "0";
        out << p.incident << ",HIST," << p.hist_vehicle << ',' << csv::format_real(p.hist_travel_s) << ','
            << csv::format_real(p.hist_response_s) << ',' << csv::format_real(p.hist_clock_start_s) << ','
            << differs << '\n';
        out << p.incident << ",AUCT," << p.auct_vehicle << ',' << csv::format_real(p.auct_travel_s) << ','
            << csv::format_real(p.auct_response_s) << ',' << csv::format_real(p.auct_clock_start_s) << ','
            << differs << '\n';
    }
    return out.str();
}

std::vector<PairSummary> read_decision_log(const std::filesystem::path& path) {
    std::vector<PairSummary> out;
    std::map<IncidentId, std::size_t> index;
    std::map<IncidentId, int> seen_mask;
    csv::read_file(path, kDecisionLogHeader, [&](const csv::Row& row) {
        const IncidentId id = row.integer(0);
        const auto policy = row.raw(1);
        int bit = 0;
        if (policy == "HIST") {
            bit = 1;
        } else if (policy == "AUCT") {
            bit = 2;
        } else {
            row.fail("policy: expected HIST or AUCT");
        }
        if (seen_mask[id] & bit) row.fail("duplicate " + std::string(policy) + " row for incident " + std::to_string(id));
        seen_mask[id] |= bit;

        auto [it, fresh] = index.try_emplace(id, out.size());
        if (fresh) {
            out.emplace_back();
            out.back().incident = id;
        }
        PairSummary& p = out[it->second];
        const auto differs = row.raw(6);
        if (differs != "0" && differs != "1") row.fail("choice_differs: expected 0 or 1");
        if (bit == 1) {
            p.hist_vehicle = row.integer(2);
            p.hist_travel_s = row.real(3);
            p.hist_response_s = row.real(4);
            p.hist_clock_start_s = row.real(5);
        } else {
            p.auct_vehicle = row.integer(2);
            p.auct_travel_s = row.real(3);
            p.auct_response_s = row.real(4);
            p.auct_clock_start_s = row.real(5);
        }
        p.choice_differs = differs == "1";
    });
    for (const auto& p : out) {
        if (seen_mask[p.incident] != 3) {
            throw ValidationError("decision log: incident " + std::to_string(p.incident) +
                                  " lacks a HIST or AUCT row");
        }
        if (p.choice_differs != (p.hist_vehicle != p.auct_vehicle)) {
            throw ValidationError("decision log: incident " + std::to_string(p.incident) +
                                  " choice_differs disagrees with the vehicle ids");
        }
    }
    return out;
}

std::string serialize_exclusions(std::span<const Exclusion> exclusions) {
    std::ostringstream out;
    out << kExclusionsHeader << '\n';
    for (const auto& e : exclusions) out << e.incident << ',' << e.reason << '\n';
    return out.str();
}

std::vector<Exclusion> read_exclusions(const std::filesystem::path& path) {
    std::vector<Exclusion> out;
    csv::read_file(path, kExclusionsHeader, [&](const csv::Row& row) { out.push_back({row.integer(0), row.text(1)}); });
    return out;
}

std::vector<std::filesystem::path> export_distributions(std::span<const PairSummary> pairs,
                                                        const std::filesystem::path& dir) {
    std::ostringstream hist, auct;
    hist << "incident_id,travel_time_s\n";
    auct << "incident_id,travel_time_s\n";
    for (const auto& p : pairs) {
        hist << p.incident << ',' << csv::format_real(p.hist_travel_s) << '\n';
        auct << p.incident << ',' << csv::format_real(p.auct_travel_s) << '\n';
    }
    std::vector<std::filesystem::path> paths{dir / "hist_travel_times.csv", dir / "auct_travel_times.csv"};
    csv::write_text(paths[0], hist.str());
    csv::write_text(paths[1], auct.str());
    return paths;
}

}  // namespace dispatchsim
