#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dispatchsim/error.hpp"
#include "dispatchsim/fleet.hpp"

namespace dispatchsim {

// Weighted-factor bidding rule: bid = sum_i weights[i] * factors[i].
struct BidPolicy {
    std::vector<std::string> factor_names;
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
    void validate() const;

    // Single factor: estimated travel time in seconds, weight 1.
    static BidPolicy travel_time();
};

class InvalidBidError : public Error {
public:
    using Error::Error;
};

// Throws std::invalid_argument on a length mismatch and InvalidBidError on
// non-finite input.
double compute_bid(const BidPolicy& policy, std::span<const double> factors);

struct Bid {
    VehicleId bidder = 0;
    IncidentId task = 0;
    std::vector<double> factors;
    double value = 0.0;
};

// Returns the bid factors for `task`. `commitments` lists the tasks this bidder
// has already won in the current auction, in award order. Throwing marks the
// bid as failed for the round.
using FactorProvider =
    std::function<std::vector<double>(const Incident& task, std::span<const IncidentId> commitments)>;

struct Bidder {
    VehicleId id = 0;
    FactorProvider factors;
};

enum class BidStatus { Valid, Rejected, Failed };
const char* to_string(BidStatus s);

struct BidRecord {
    VehicleId bidder = 0;
    IncidentId task = 0;
    BidStatus status = BidStatus::Valid;
    std::vector<double> factors;
    std::optional<double> value;
    std::string note;
};

struct Award {
    IncidentId task = 0;
    VehicleId bidder = 0;
    double value = 0.0;
};

struct Unallocated {
    IncidentId task = 0;
    std::string reason;
};

struct RoundRecord {
    std::size_t round = 0;
    std::vector<IncidentId> announced;
    std::vector<BidRecord> bids;
    std::optional<Award> award;
    std::vector<Unallocated> unallocated;
};

struct AuctionOutcome {
    std::map<IncidentId, VehicleId> awards;
    std::vector<Award> award_order;
    std::vector<Unallocated> unallocated;
    std::vector<RoundRecord> round_log;
    double deliberation_time = 0.0;  // wall-clock seconds
};

// Auctioneer for one sequential single-item auction. Each round announces
// every open task, collects one bid per (bidder, task) and awards the single
// lowest valid bid. Ties go to the lower vehicle id, then the lower task id.
class Auctioneer {
public:
    Auctioneer(std::span<const Incident> tasks, std::span<const Bidder> bidders, BidPolicy policy);

    bool finished() const { return open_.empty(); }

    // Starts a new round record listing the open tasks.
    void announce();
    // Asks every bidder for a bid on every announced task.
    void collect();
    // Resolves the current round. Returns false when no valid bid exists,
    // in which case every open task becomes unallocated.
    bool award();

    AuctionOutcome take_outcome() { return std::move(outcome_); }

private:
    std::vector<Incident> tasks_;
    std::span<const Bidder> bidders_;
    BidPolicy policy_;
    std::vector<std::size_t> open_;  // indices into tasks_
    std::map<VehicleId, std::vector<IncidentId>> commitments_;
    AuctionOutcome outcome_;
};

AuctionOutcome run_ssi_auction(std::span<const Incident> tasks, std::span<const Bidder> bidders,
                               const BidPolicy& policy);

// One JSON object per round, newline-terminated.
std::string round_log_jsonl(const AuctionOutcome& outcome);

}  // namespace dispatchsim
