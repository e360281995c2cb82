#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "dispatchsim/auction.hpp"

using namespace dispatchsim;

namespace {

Incident task(IncidentId id, double x = 0.0) { return {id, 0.0, {x, 0.0}, Category::A_red1, 1}; }

Bidder constant_bidder(VehicleId id, double value) {
    return {id, [value](const Incident&, std::span<const IncidentId>) { return std::vector<double>{value}; }};
}

}  // namespace

TEST_CASE("compute_bid") {
    CHECK(compute_bid(BidPolicy::travel_time(), std::vector<double>{272.0}) == 272.0);
    const BidPolicy zeros{{"a", "b", "c"}, {0.0, 0.0, 0.0}};
    CHECK(compute_bid(zeros, std::vector<double>{5.0, -3.0, 1e9}) == 0.0);
    const BidPolicy two{{"a", "b"}, {2.0, 0.5}};
    CHECK(compute_bid(two, std::vector<double>{100.0, 10.0}) == 205.0);
    CHECK_THROWS_AS(compute_bid(two, std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(compute_bid(two, std::vector<double>{1.0, std::nan("")}), InvalidBidError);
    CHECK_THROWS_AS(compute_bid(two, std::vector<double>{std::numeric_limits<double>::infinity(), 1.0}),
                    InvalidBidError);
    CHECK_THROWS_AS((BidPolicy{{"a"}, {1.0, 2.0}}.validate()), ValidationError);
    CHECK_THROWS_AS((BidPolicy{{}, {}}.validate()), ValidationError);
}

TEST_CASE("single task awards the lowest bid") {
    const std::vector<Incident> tasks{task(1)};
    const std::vector<Bidder> bidders{constant_bidder(1, 369.0), constant_bidder(2, 272.0), constant_bidder(3, 500.0)};
    const auto out = run_ssi_auction(tasks, bidders, BidPolicy::travel_time());
    CHECK(out.awards.at(1) == 2);
    REQUIRE(out.award_order.size() == 1);
    CHECK(out.award_order[0].value == 272.0);
    REQUIRE(out.round_log.size() == 1);
    CHECK(out.round_log[0].bids.size() == 3);
    CHECK(out.unallocated.empty());
    CHECK(out.deliberation_time >= 0.0);
}

TEST_CASE("single bidder wins regardless of value") {
    const std::vector<Incident> tasks{task(4)};
    const std::vector<Bidder> bidders{constant_bidder(9, 1e7)};
    CHECK(run_ssi_auction(tasks, bidders, BidPolicy::travel_time()).awards.at(4) == 9);
}

TEST_CASE("ties resolve by vehicle id, then task id") {
    const std::vector<Incident> tasks{task(8), task(3)};
    const std::vector<Bidder> bidders{constant_bidder(20, 50.0), constant_bidder(10, 50.0)};
    const auto out = run_ssi_auction(tasks, bidders, BidPolicy::travel_time());
    REQUIRE(out.award_order.size() == 2);
    CHECK(out.award_order[0].bidder == 10);
    CHECK(out.award_order[0].task == 3);
    // Constant bidders ignore commitments, so vehicle 10 also wins the second round.
    CHECK(out.award_order[1].bidder == 10);
    CHECK(out.award_order[1].task == 8);
}

TEST_CASE("zero bidders leave the task unallocated after one round") {
    const std::vector<Incident> tasks{task(1)};
    const auto out = run_ssi_auction(tasks, std::span<const Bidder>{}, BidPolicy::travel_time());
    REQUIRE(out.round_log.size() == 1);
    CHECK(out.round_log[0].bids.empty());
    CHECK_FALSE(out.round_log[0].award.has_value());
    REQUIRE(out.unallocated.size() == 1);
    CHECK(out.unallocated[0].task == 1);
    CHECK(out.unallocated[0].reason == "no bidders");
    CHECK(out.awards.empty());
}

TEST_CASE("failing and invalid bidders are logged and never win") {
    const std::vector<Incident> tasks{task(1)};
    std::vector<Bidder> bidders{
        {1, [](const Incident&, std::span<const IncidentId>) -> std::vector<double> {
             throw std::runtime_error("route service timed out");
         }},
        constant_bidder(2, -5.0),
        constant_bidder(3, std::nan("")),
        {4, [](const Incident&, std::span<const IncidentId>) { return std::vector<double>{1.0, 2.0}; }},
        constant_bidder(5, 900.0),
    };
    const auto out = run_ssi_auction(tasks, bidders, BidPolicy::travel_time());
    CHECK(out.awards.at(1) == 5);
    const auto& bids = out.round_log.at(0).bids;
    REQUIRE(bids.size() == 5);
    CHECK(bids[0].status == BidStatus::Failed);
    CHECK(bids[0].note == "route service timed out");
    CHECK(bids[1].status == BidStatus::Rejected);
    CHECK(bids[2].status == BidStatus::Rejected);
    CHECK(bids[3].status == BidStatus::Rejected);
    CHECK(bids[4].status == BidStatus::Valid);

    SUBCASE("only failures") {
        const auto none = run_ssi_auction(tasks, std::span(bidders).first(3), BidPolicy::travel_time());
        CHECK(none.awards.empty());
        REQUIRE(none.unallocated.size() == 1);
        CHECK(none.unallocated[0].reason == "no valid bids");
    }
}

TEST_CASE("a task nobody can bid on is dropped while others continue") {
    const std::vector<Incident> tasks{task(1), task(2), task(3)};
    const std::vector<Bidder> bidders{
        {7, [](const Incident& t, std::span<const IncidentId>) -> std::vector<double> {
             if (t.id == 2) throw std::runtime_error("cannot reach");
             return {static_cast<double>(t.id)};
         }}};
    const auto out = run_ssi_auction(tasks, bidders, BidPolicy::travel_time());
    CHECK(out.awards.size() == 2);
    CHECK(out.awards.count(2) == 0);
    REQUIRE(out.unallocated.size() == 1);
    CHECK(out.unallocated[0].task == 2);
    // Rounds executed = awards + terminal no-bid rounds.
    CHECK(out.round_log.size() == 2);
}

TEST_CASE("positive weight scaling leaves the award unchanged") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> value(10.0, 1000.0);
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    const std::vector<Incident> tasks{task(1)};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Bidder> bidders;
        for (int b = 0; b < 8; ++b) {
            const double f1 = value(rng), f2 = value(rng);
            bidders.push_back({b + 1, [=](const Incident&, std::span<const IncidentId>) {
                                   return std::vector<double>{f1, f2};
                               }});
        }
        const BidPolicy p{{"x", "y"}, {0.7, 0.3}};
        const double c = scale(rng);
        const BidPolicy scaled{{"x", "y"}, {0.7 * c, 0.3 * c}};
        CHECK(run_ssi_auction(tasks, bidders, p).awards == run_ssi_auction(tasks, bidders, scaled).awards);
    }
}

TEST_CASE("commitment-aware auction matches a sequential greedy oracle") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> coord(0.0, 10000.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Incident> tasks;
        std::map<IncidentId, double> where;
        for (IncidentId t = 1; t <= 3; ++t) {
            tasks.push_back(task(t * 10, coord(rng)));
            where[t * 10] = tasks.back().position.easting;
        }
        std::map<VehicleId, double> home;
        std::vector<Bidder> bidders;
        for (VehicleId v = 1; v <= 4; ++v) {
            home[v] = coord(rng);
            // Bid = distance from the end of the current commitments to the task.
            bidders.push_back({v, [&, v](const Incident& t, std::span<const IncidentId> mine) {
                                   const double from = mine.empty() ? home[v] : where[mine.back()];
                                   return std::vector<double>{std::fabs(from - t.position.easting)};
                               }});
        }
        const auto out = run_ssi_auction(tasks, bidders, BidPolicy::travel_time());

        // Oracle: recompute every bid each round, award the global minimum.
        std::map<VehicleId, double> at = home;
        std::set<IncidentId> open{10, 20, 30};
        std::vector<std::pair<IncidentId, VehicleId>> expected;
        while (!open.empty()) {
            double best = std::numeric_limits<double>::infinity();
            VehicleId bv = 0;
            IncidentId bt = 0;
            for (const auto& [v, x] : at) {
                for (IncidentId t : open) {
                    const double cost = std::fabs(x - where[t]);
                    if (cost < best || (cost == best && (v < bv || (v == bv && t < bt)))) {
                        best = cost;
                        bv = v;
                        bt = t;
                    }
                }
            }
            expected.emplace_back(bt, bv);
            at[bv] = where[bt];
            open.erase(bt);
        }
        REQUIRE(out.award_order.size() == expected.size());
        for (std::size_t i = 0; i < expected.size(); ++i) {
            CHECK(out.award_order[i].task == expected[i].first);
            CHECK(out.award_order[i].bidder == expected[i].second);
        }
        CHECK(out.round_log.size() == 3);
        std::set<IncidentId> awarded;
        for (const auto& a : out.award_order) CHECK(awarded.insert(a.task).second);
    }
}

TEST_CASE("auctioneer protocol steps") {
    const std::vector<Incident> tasks{task(1), task(2)};
    const std::vector<Bidder> bidders{constant_bidder(1, 5.0), constant_bidder(2, 6.0), constant_bidder(3, 7.0)};
    Auctioneer a(tasks, bidders, BidPolicy::travel_time());
    a.announce();
    a.collect();
    CHECK(a.award());
    CHECK_FALSE(a.finished());
    a.announce();
    a.collect();
    CHECK(a.award());
    CHECK(a.finished());
    const auto out = a.take_outcome();
    REQUIRE(out.round_log.size() == 2);
    CHECK(out.round_log[0].announced == std::vector<IncidentId>{1, 2});
    CHECK(out.round_log[0].bids.size() == 6);
    CHECK(out.round_log[1].announced == std::vector<IncidentId>{2});
    CHECK(out.round_log[1].bids.size() == 3);
}

TEST_CASE("outcomes are deterministic and the round log is JSON lines") {
    const std::vector<Incident> tasks{task(1), task(2)};
    const std::vector<Bidder> bidders{constant_bidder(1, 5.0), constant_bidder(2, 5.0),
                                      {3, [](const Incident&, std::span<const IncidentId>) -> std::vector<double> {
                                           throw std::runtime_error("down");
                                       }}};
    const auto a = run_ssi_auction(tasks, bidders, BidPolicy::travel_time());
    const auto b = run_ssi_auction(tasks, bidders, BidPolicy::travel_time());
    CHECK(round_log_jsonl(a) == round_log_jsonl(b));
    CHECK(a.awards == b.awards);

    std::istringstream lines(round_log_jsonl(a));
    std::string line;
    int n = 0;
    while (std::getline(lines, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j["round"] == n);
        CHECK(j["bids"].size() == 3 * (2 - n));
        CHECK(j["bids"].back()["status"] == "failed");
        CHECK(j["award"]["bidder"] == 1);
        ++n;
    }
    CHECK(n == 2);
}
