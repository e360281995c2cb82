#include "dispatchsim/cli.hpp"

#include <filesystem>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "dispatchsim/csv.hpp"
#include "dispatchsim/error.hpp"
#include "dispatchsim/experiment.hpp"
#include "dispatchsim/generator.hpp"

namespace dispatchsim {

namespace fs = std::filesystem;

namespace {

void print_report(std::ostream& out, const ComparisonReport& r) {
    out << std::fixed << std::setprecision(2);
    out << r.condition << " [" << r.profile << "] n=" << r.n << " excluded=" << r.excluded_count << '\n'
        << "  HIST mean travel " << r.mean_hist_s << " s, AUCT mean travel " << r.mean_auct_s << " s\n"
        << "  Welch t = " << r.t_statistic << " (df " << r.welch_df << "), p = " << std::scientific
        << std::setprecision(3) << r.p_value << std::fixed << std::setprecision(2) << '\n'
        << "  auction chose a different vehicle in " << r.pct_choice_differs << "% of incidents\n";
    out.unsetf(std::ios::floatfield);
}

int cmd_generate(const fs::path& config_path, std::uint64_t seed, const fs::path& out_dir, std::ostream& out) {
    const GeneratorConfig cfg = config_path.empty() ? GeneratorConfig{} : load_generator_config(config_path);
    const SyntheticData data = generate_synthetic(cfg, seed);
    write_synthetic(data, out_dir);
    out << "wrote " << data.incidents.size() << " incidents, " << data.responses.size() << " responses, "
        << data.graph.nodes().size() << " nodes to " << out_dir.string() << '\n';
    return kExitOk;
}

VehicleClass parse_profile(const std::string& s) {
    if (s == "emergency") return VehicleClass::Emergency;
    if (s == "civilian") return VehicleClass::Civilian;
    throw ValidationError("unknown profile '" + s + "'");
}

struct SimulateArgs {
    fs::path data;
    std::string condition;
    std::uint64_t seed = 0;
    std::string profile = "emergency";
    fs::path out;
    std::size_t sample_size = 100;
    double area_km2 = kDefaultNeighbourhoodKm2;
    unsigned threads = 1;
    bool keep_outside = false;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    RunOptions options;
    options.vclass = parse_profile(a.profile);
    options.area_km2 = a.area_km2;
    options.threads = a.threads;
    options.exclude_hist_outside = !a.keep_outside;

    auto graph = std::make_shared<const RoadGraph>(load_graph(a.data));
    const Dataset ds = ingest_dir(a.data);
    const Mission mission = make_mission(graph, ds);
    const ExperimentCondition cond = standard_condition(a.condition, ds, a.seed, a.sample_size);
    const ConditionRun run = run_condition(mission, ds, cond, options);

    const std::vector<PairSummary> pairs = run.summaries();
    const ComparisonReport report = build_report(cond.name, a.profile, pairs, run.exclusions.size());

    fs::create_directories(a.out);
    csv::write_text(a.out / "decisions.csv", serialize_decision_log(pairs));
    csv::write_text(a.out / "exclusions.csv", serialize_exclusions(run.exclusions));
    csv::write_text(a.out / "report.csv", serialize_reports(std::span(&report, 1)));
    csv::write_text(a.out / "rounds.jsonl", run.round_log);
    export_distributions(pairs, a.out);

    print_report(out, report);
    out << "  deliberation time " << run.deliberation_time_s << " s over " << pairs.size() << " auctions\n";
    return kExitOk;
}

int cmd_benchmark(const fs::path& data, std::size_t sample, std::uint64_t seed, const fs::path& out_dir,
                  std::ostream& out) {
    const RoadGraph graph = load_graph(data);
    const Dataset ds = ingest_dir(data);
    const BenchmarkResult b = run_benchmark(ds, graph, sample, seed);

    std::ostringstream summary;
    summary << "n,skipped,mean_observed_s,mean_emergency_s,mean_civilian_s,wasserstein_emergency,"
               "wasserstein_civilian\n"
            << b.n << ',' << b.skipped << ',' << csv::format_real(b.mean_observed_s) << ','
            << csv::format_real(b.mean_emergency_s) << ',' << csv::format_real(b.mean_civilian_s) << ','
            << csv::format_real(b.w1_emergency) << ',' << csv::format_real(b.w1_civilian) << '\n';
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        csv::write_text(out_dir / "benchmark.csv", summary.str());
        std::ostringstream journeys;
        journeys << "incident_id,observed_s,emergency_s,civilian_s\n";
        for (std::size_t i = 0; i < b.n; ++i) {
            journeys << b.incidents[i] << ',' << csv::format_real(b.observed_s[i]) << ','
                     << csv::format_real(b.emergency_s[i]) << ',' << csv::format_real(b.civilian_s[i]) << '\n';
        }
        csv::write_text(out_dir / "benchmark_journeys.csv", journeys.str());
    }
    out << summary.str();
    return kExitOk;
}

int cmd_stats(const fs::path& decisions, const fs::path& exclusions, const std::string& condition,
              const std::string& profile, std::ostream& out) {
    const std::vector<PairSummary> pairs = read_decision_log(decisions);
    const std::size_t excluded = exclusions.empty() ? 0 : read_exclusions(exclusions).size();
    const ComparisonReport r = build_report(condition, profile, pairs, excluded);
    out << serialize_reports(std::span(&r, 1));
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Auction-based emergency dispatch simulator"};
    app.require_subcommand(1);

    fs::path gen_config, gen_out;
    std::uint64_t gen_seed = 0;
    auto* gen = app.add_subcommand("generate", "Write a seeded synthetic dataset");
    gen->add_option("--config", gen_config, "Generator config (key = value); defaults apply when omitted");
    gen->add_option("--seed", gen_seed, "RNG seed")->required();
    gen->add_option("--out", gen_out, "Output directory")->required();

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Compare historical and auction dispatch for one condition");
    simulate->add_option("--data", sim.data, "Dataset directory")->required();
    simulate->add_option("--condition", sim.condition, "Experimental condition")
        ->required()
        ->check(CLI::IsMember({"1M-1C", "12M-1C", "1M-nC", "12M-nC"}));
    simulate->add_option("--seed", sim.seed, "Sampling seed")->required();
    simulate->add_option("--profile", sim.profile, "Routing profile class")
        ->check(CLI::IsMember({"emergency", "civilian"}));
    simulate->add_option("--out", sim.out, "Output directory")->required();
    simulate->add_option("--sample-size", sim.sample_size, "Incidents sampled per condition");
    simulate->add_option("--area-km2", sim.area_km2, "Candidate neighbourhood area");
    simulate->add_option("--threads", sim.threads, "Worker threads");
    simulate->add_flag("--keep-outside", sim.keep_outside,
                       "Keep incidents whose historical vehicle is outside the neighbourhood");

    fs::path bench_data, bench_out;
    std::size_t bench_sample = 2000;
    std::uint64_t bench_seed = 0;
    auto* bench = app.add_subcommand("benchmark", "Observed vs routed travel times for both profile classes");
    bench->add_option("--data", bench_data, "Dataset directory")->required();
    bench->add_option("--sample", bench_sample, "Journeys to sample");
    bench->add_option("--seed", bench_seed, "Sampling seed")->required();
    bench->add_option("--out", bench_out, "Optional output directory");

    fs::path stats_decisions, stats_exclusions;
    std::string stats_condition = "from-log", stats_profile = "unknown";
    auto* stats = app.add_subcommand("stats", "Recompute a comparison report from a decision log");
    stats->add_option("--decisions", stats_decisions, "Decision log CSV")->required();
    stats->add_option("--exclusions", stats_exclusions, "Optional exclusions CSV");
    stats->add_option("--condition", stats_condition, "Condition label for the report");
    stats->add_option("--profile", stats_profile, "Profile label for the report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitValidation;
    }

    try {
        if (*gen) return cmd_generate(gen_config, gen_seed, gen_out, out);
        if (*simulate) return cmd_simulate(sim, out);
        if (*bench) return cmd_benchmark(bench_data, bench_sample, bench_seed, bench_out, out);
        if (*stats) return cmd_stats(stats_decisions, stats_exclusions, stats_condition, stats_profile, out);
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ShortfallError& e) {
        err << "shortfall: " << e.what() << '\n';
        return kExitShortfall;
    } catch (const DegenerateInputError& e) {
        err << "degenerate statistics: " << e.what() << '\n';
        return kExitShortfall;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}

}  // namespace dispatchsim
