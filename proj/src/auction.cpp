#include "dispatchsim/auction.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

namespace dispatchsim {

void BidPolicy::validate() const {
    if (factor_names.size() != weights.size()) {
        throw ValidationError("bid policy: factor names and weights differ in length");
    }
    if (weights.empty()) throw ValidationError("bid policy: at least one factor required");
    for (double w : weights) {
        if (!std::isfinite(w)) throw ValidationError("bid policy: weights must be finite");
    }
}

BidPolicy BidPolicy::travel_time() { return {{"estimated_travel_time_s"}, {1.0}}; }

double compute_bid(const BidPolicy& policy, std::span<const double> factors) {
    if (factors.size() != policy.size()) {
        throw std::invalid_argument("bid has " + std::to_string(factors.size()) + " factors, policy expects " +
                                    std::to_string(policy.size()));
    }
    double value = 0.0;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (!std::isfinite(factors[i])) {
            throw InvalidBidError("factor '" + policy.factor_names[i] + "' is not finite");
        }
        value += policy.weights[i] * factors[i];
    }
    if (!std::isfinite(value)) throw InvalidBidError("bid value is not finite");
    return value;
}

const char* to_string(BidStatus s) {
    switch (s) {
        case BidStatus::Valid: return "valid";
        case BidStatus::Rejected: return "rejected";
        case BidStatus::Failed: return "failed";
    }
    return "?";
}

Auctioneer::Auctioneer(std::span<const Incident> tasks, std::span<const Bidder> bidders, BidPolicy policy)
    : tasks_(tasks.begin(), tasks.end()), bidders_(bidders), policy_(std::move(policy)) {
    policy_.validate();
    for (std::size_t i = 0; i < tasks_.size(); ++i) open_.push_back(i);
}

void Auctioneer::announce() {
    RoundRecord r;
    r.round = outcome_.round_log.size();
    for (std::size_t i : open_) r.announced.push_back(tasks_[i].id);
    outcome_.round_log.push_back(std::move(r));
}

void Auctioneer::collect() {
    RoundRecord& r = outcome_.round_log.back();
    for (const Bidder& b : bidders_) {
        const auto& mine = commitments_[b.id];
        for (std::size_t i : open_) {
            BidRecord rec;
            rec.bidder = b.id;
            rec.task = tasks_[i].id;
            try {
                rec.factors = b.factors(tasks_[i], mine);
            } catch (const std::exception& e) {
                rec.status = BidStatus::Failed;
                rec.note = e.what();
                r.bids.push_back(std::move(rec));
                continue;
            }
            try {
                const double v = compute_bid(policy_, rec.factors);
                if (v < 0.0) {
                    rec.status = BidStatus::Rejected;
                    rec.note = "negative bid";
                } else {
                    rec.value = v;
                }
            } catch (const std::exception& e) {
                rec.status = BidStatus::Rejected;
                rec.note = e.what();
            }
            r.bids.push_back(std::move(rec));
        }
    }
}

bool Auctioneer::award() {
    RoundRecord& r = outcome_.round_log.back();

    const BidRecord* best = nullptr;
    for (const auto& b : r.bids) {
        if (b.status != BidStatus::Valid) continue;
        if (!best || std::tie(*b.value, b.bidder, b.task) < std::tie(*best->value, best->bidder, best->task)) {
            best = &b;
        }
    }

    auto drop = [&](std::size_t idx, std::string reason) {
        r.unallocated.push_back({tasks_[idx].id, reason});
        outcome_.unallocated.push_back({tasks_[idx].id, std::move(reason)});
    };

    if (!best) {
        for (std::size_t i : open_) drop(i, r.bids.empty() ? "no bidders" : "no valid bids");
        open_.clear();
        return false;
    }

    const Award a{best->task, best->bidder, *best->value};
    r.award = a;
    outcome_.awards[a.task] = a.bidder;
    outcome_.award_order.push_back(a);
    commitments_[a.bidder].push_back(a.task);

    std::vector<std::size_t> still_open;
    for (std::size_t i : open_) {
        if (tasks_[i].id == a.task) continue;
        const bool has_bid = std::any_of(r.bids.begin(), r.bids.end(), [&](const BidRecord& b) {
            return b.task == tasks_[i].id && b.status == BidStatus::Valid;
        });
        if (has_bid) {
            still_open.push_back(i);
        } else {
            drop(i, "no valid bids");
        }
    }
    open_ = std::move(still_open);
    return true;
}

AuctionOutcome run_ssi_auction(std::span<const Incident> tasks, std::span<const Bidder> bidders,
                               const BidPolicy& policy) {
    const auto start = std::chrono::steady_clock::now();
    Auctioneer auctioneer(tasks, bidders, policy);
    while (!auctioneer.finished()) {
        auctioneer.announce();
        auctioneer.collect();
        if (!auctioneer.award()) break;
    }
    AuctionOutcome out = auctioneer.take_outcome();
    out.deliberation_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

std::string round_log_jsonl(const AuctionOutcome& outcome) {
    std::string out;
    for (const auto& r : outcome.round_log) {
        nlohmann::json j;
        j["round"] = r.round;
        j["announced"] = r.announced;
        auto bids = nlohmann::json::array();
        for (const auto& b : r.bids) {
            nlohmann::json jb{{"bidder", b.bidder}, {"task", b.task}, {"status", to_string(b.status)},
                              {"factors", b.factors}};
            if (b.value) jb["value"] = *b.value;
            if (!b.note.empty()) jb["note"] = b.note;
            bids.push_back(std::move(jb));
        }
        j["bids"] = std::move(bids);
        if (r.award) {
            j["award"] = {{"task", r.award->task}, {"bidder", r.award->bidder}, {"value", r.award->value}};
        } else {
            j["award"] = nullptr;
        }
        auto un = nlohmann::json::array();
        for (const auto& u : r.unallocated) un.push_back({{"task", u.task}, {"reason", u.reason}});
        j["unallocated"] = std::move(un);
        out += j.dump();
        out += '\n';
    }
    return out;
}

}  // namespace dispatchsim
