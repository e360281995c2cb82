#include <doctest.h>

#include <fstream>
#include <random>

#include "dispatchsim/csv.hpp"
#include "dispatchsim/error.hpp"
#include "dispatchsim/experiment.hpp"
#include "dispatchsim/report.hpp"
#include "fixtures.hpp"

using namespace dispatchsim;
using namespace dispatchsim::testing;

namespace {

std::vector<PairSummary> random_pairs(std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> t(30.0, 900.0);
    std::uniform_int_distribution<int> v(100, 160);
    std::vector<PairSummary> out;
    for (std::size_t i = 0; i < n; ++i) {
        PairSummary p;
        p.incident = static_cast<IncidentId>(i * 7 + 1);
        p.hist_vehicle = v(rng);
        p.auct_vehicle = i % 3 == 0 ? p.hist_vehicle : v(rng);
        p.choice_differs = p.hist_vehicle != p.auct_vehicle;
        p.hist_travel_s = t(rng);
        p.auct_travel_s = p.choice_differs ? std::min(p.hist_travel_s, t(rng)) : p.hist_travel_s;
        p.hist_clock_start_s = 1.45e9 + i;
        p.auct_clock_start_s = p.hist_clock_start_s;
        p.hist_response_s = p.hist_travel_s + 12.5;
        p.auct_response_s = p.auct_travel_s + 3.25;
        out.push_back(p);
    }
    return out;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

}  // namespace

TEST_CASE("build_report aggregates") {
    const auto pairs = random_pairs(1, 50);
    const auto r = build_report("1M-1C", "emergency", pairs, 4);
    double hist = 0.0, auct = 0.0;
    std::size_t differs = 0;
    for (const auto& p : pairs) {
        hist += p.hist_travel_s;
        auct += p.auct_travel_s;
        differs += p.choice_differs;
    }
    CHECK(r.n == 50);
    CHECK(r.excluded_count == 4);
    CHECK(r.mean_hist_s == doctest::Approx(hist / 50));
    CHECK(r.mean_auct_s == doctest::Approx(auct / 50));
    CHECK(r.pct_choice_differs == doctest::Approx(100.0 * differs / 50));
    CHECK(r.t_statistic > 0.0);
    CHECK(r.p_value >= 0.0);
    CHECK(r.p_value <= 1.0);
    CHECK(r.paired_t_statistic.has_value());
    CHECK(r.mean_hist_response_s == doctest::Approx(hist / 50 + 12.5));

    CHECK_THROWS_AS(build_report("x", "y", std::span(pairs).first(1), 0), ShortfallError);
}

TEST_CASE("identical policies give t = 0 and no choice differences") {
    auto pairs = random_pairs(2, 20);
    for (auto& p : pairs) {
        p.auct_vehicle = p.hist_vehicle;
        p.auct_travel_s = p.hist_travel_s;
        p.auct_response_s = p.hist_response_s;
        p.choice_differs = false;
    }
    const auto r = build_report("12M-nC", "civilian", pairs, 0);
    CHECK(r.mean_hist_s == r.mean_auct_s);
    CHECK(r.t_statistic == 0.0);
    CHECK(r.p_value == 1.0);
    CHECK(r.pct_choice_differs == 0.0);
    CHECK_FALSE(r.paired_t_statistic.has_value());
}

TEST_CASE("report CSV round-trips") {
    std::vector<ComparisonReport> reports{build_report("1M-1C", "emergency", random_pairs(3, 30), 2),
                                          build_report("12M-nC", "civilian", random_pairs(4, 12), 0)};
    reports[1].paired_t_statistic.reset();
    reports[1].paired_p_value.reset();
    const std::string text = serialize_reports(reports);
    CHECK(text.starts_with(std::string(kReportHeader) + "\n"));
    CHECK(parse_reports(text) == reports);
    CHECK(serialize_reports(parse_reports(text)) == text);
    CHECK_THROWS_AS(parse_reports("condition,profile\nx,y\n"), ParseError);
}

TEST_CASE("decision log round-trips and is checked") {
    const auto dir = scratch_dir("decisions");
    const auto pairs = random_pairs(5, 25);
    write_file(dir / "d.csv", serialize_decision_log(pairs));
    const auto back = read_decision_log(dir / "d.csv");
    REQUIRE(back.size() == pairs.size());
    CHECK(serialize_decision_log(back) == serialize_decision_log(pairs));
    CHECK(build_report("c", "p", back, 0) == build_report("c", "p", pairs, 0));

    const std::string h = std::string(kDecisionLogHeader) + "\n";
    SUBCASE("missing AUCT row") {
        write_file(dir / "bad.csv", h + "1,HIST,100,50,60,1000,0\n");
        CHECK_THROWS_AS(read_decision_log(dir / "bad.csv"), Error);
    }
    SUBCASE("choice flag disagrees with the vehicles") {
        write_file(dir / "bad.csv", h + "1,HIST,100,50,60,1000,0\n1,AUCT,101,40,50,1000,0\n");
        CHECK_THROWS_AS(read_decision_log(dir / "bad.csv"), Error);
    }
    SUBCASE("unknown policy") {
        write_file(dir / "bad.csv", h + "1,RAND,100,50,60,1000,0\n");
        CHECK_THROWS_AS(read_decision_log(dir / "bad.csv"), Error);
    }
}

TEST_CASE("exclusions and distribution exports") {
    const auto dir = scratch_dir("exports");
    const std::vector<Exclusion> ex{{4, "no_candidates"}, {9, "hist_outside_neighbourhood"}};
    write_file(dir / "e.csv", serialize_exclusions(ex));
    const auto back = read_exclusions(dir / "e.csv");
    REQUIRE(back.size() == 2);
    CHECK(back[1].incident == 9);
    CHECK(back[1].reason == "hist_outside_neighbourhood");

    const auto pairs = random_pairs(6, 10);
    const auto paths = export_distributions(pairs, dir);
    REQUIRE(paths.size() == 2);
    std::size_t rows = 0;
    csv::read_file(paths[0], "incident_id,travel_time_s", [&](const csv::Row& row) {
        CHECK(row.integer(0) == pairs[rows].incident);
        CHECK(row.real(1) == pairs[rows].hist_travel_s);
        ++rows;
    });
    CHECK(rows == pairs.size());
}

TEST_CASE("condition runs on synthetic data") {
    auto graph = std::make_shared<const RoadGraph>(load_graph(synthetic_dir()));
    const Dataset ds = ingest_dir(synthetic_dir());
    const Mission mission = make_mission(graph, ds);
    const auto cond = standard_condition("1M-nC", ds, 11, 60);

    const auto serial = run_condition(mission, ds, cond, {});
    CHECK(serial.pairs.size() + serial.exclusions.size() == 60);
    for (const auto& p : serial.pairs) {
        CHECK(p.hist_in_neighbourhood);
        CHECK(p.auct.simulated_travel_time <= p.hist.simulated_travel_time + 1e-9);
    }
    for (const auto& e : serial.exclusions) CHECK_FALSE(e.reason.empty());
    const auto summaries = serial.summaries();
    const auto report = build_report(cond.name, "emergency", summaries, serial.exclusions.size());
    CHECK(report.n + report.excluded_count == 60);
    CHECK(report.mean_auct_s <= report.mean_hist_s);

    RunOptions threaded;
    threaded.threads = 4;
    const auto parallel = run_condition(mission, ds, cond, threaded);
    CHECK(serialize_decision_log(parallel.summaries()) == serialize_decision_log(summaries));
    CHECK(parallel.round_log == serial.round_log);

    RunOptions keep;
    keep.exclude_hist_outside = false;
    const auto kept = run_condition(mission, ds, cond, keep);
    CHECK(kept.pairs.size() >= serial.pairs.size());
}

TEST_CASE("benchmark on synthetic data") {
    const auto graph = load_graph(synthetic_dir());
    const Dataset ds = ingest_dir(synthetic_dir());
    const auto b = run_benchmark(ds, graph, 300, 1);
    CHECK(b.n + b.skipped == 300);
    CHECK(b.w1_emergency < b.w1_civilian);
    CHECK(b.mean_emergency_s < b.mean_civilian_s);
    CHECK_THROWS_AS(run_benchmark(ds, graph, 10'000'000, 1), ShortfallError);
}
