#pragma once

// Roster of part classifiers: reliability bookkeeping, the lifecycle
// candidate -> reliable -> gold, and the per-size budget that removes newly
// reliable parts too similar to older ones. Gold parts are permanent.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stp/channels.hpp"
#include "stp/errors.hpp"

namespace stp {

enum class PartState { Candidate, Reliable, Gold };
enum class SizeClass { Small, Medium, FullBox };

inline const char* to_string(PartState s) {
    switch (s) {
        case PartState::Candidate: return "candidate";
        case PartState::Reliable: return "reliable";
        case PartState::Gold: return "gold";
    }
    return "?";
}

inline const char* to_string(SizeClass s) {
    switch (s) {
        case SizeClass::Small: return "small";
        case SizeClass::Medium: return "medium";
        case SizeClass::FullBox: return "fullbox";
    }
    return "?";
}

struct Part {
    int id = -1;
    SizeClass size_class = SizeClass::Small;
    PatchGeometry geom;
    int offset_x = 0;  // patch center relative to object center
    int offset_y = 0;
    Eigen::VectorXd classifier;                    // calibrated: own-response == 1
    std::array<double, kChannels> channel_sums{};  // per-channel weight sums, for centering
    PartState state = PartState::Candidate;
    int agree_count = 0;
    int seen_count = 0;
    int birth_frame = 0;
    int reliable_reviews = 0;  // full review windows survived while reliable

    double reliability() const {
        return seen_count > 0 ? static_cast<double>(agree_count) / seen_count : 0.0;
    }
};

inline std::array<double, kChannels> classifier_channel_sums(const Eigen::VectorXd& c,
                                                             const PatchGeometry& g) {
    std::array<double, kChannels> sums{};
    const int block = g.samples_per_channel();
    for (int ch = 0; ch < kChannels; ++ch) {
        double s = 0.0;
        const double* p = c.data() + static_cast<size_t>(ch) * block;
        for (int i = 0; i < block; ++i) s += p[i];
        sums[ch] = s;
    }
    return sums;
}

inline void record_agreement(Part& part, bool agreed) {
    part.seen_count += 1;
    if (agreed) part.agree_count += 1;
}

struct ReviewOutcome {
    std::vector<int> promoted_to_reliable;
    std::vector<int> promoted_to_gold;
    std::vector<int> removed;
};

struct BudgetOutcome {
    std::vector<int> removed;
    std::vector<std::string> warnings;
};

class PartRoster {
public:
    std::vector<Part>& parts() { return parts_; }
    const std::vector<Part>& parts() const { return parts_; }

    int add(Part part) {
        part.id = next_id_++;
        parts_.push_back(std::move(part));
        return parts_.back().id;
    }

    size_t size() const { return parts_.size(); }
    bool empty() const { return parts_.empty(); }

    int count(PartState s) const {
        int n = 0;
        for (const auto& p : parts_)
            if (p.state == s) ++n;
        return n;
    }

    int count_voting(SizeClass sc) const {
        int n = 0;
        for (const auto& p : parts_)
            if (p.size_class == sc && p.state != PartState::Candidate) ++n;
        return n;
    }

    // Promotes parts with reliability above p_plus one step (candidate ->
    // reliable, reliable -> gold after two survived reviews), removes parts at
    // or below p_minus except gold, and resets all counters so the next window
    // starts clean. Parts in between are left untouched.
    ReviewOutcome review_lifecycle(double p_plus, double p_minus) {
        ReviewOutcome outcome;
        std::vector<Part> kept;
        kept.reserve(parts_.size());
        for (Part& p : parts_) {
            const bool evaluated = p.seen_count > 0;
            const double f = p.reliability();
            if (evaluated && p.state != PartState::Gold && f <= p_minus) {
                outcome.removed.push_back(p.id);
                continue;
            }
            if (p.state == PartState::Reliable) p.reliable_reviews += 1;
            if (evaluated && f > p_plus) {
                if (p.state == PartState::Candidate) {
                    p.state = PartState::Reliable;
                    p.reliable_reviews = 0;
                    outcome.promoted_to_reliable.push_back(p.id);
                } else if (p.state == PartState::Reliable && p.reliable_reviews >= 2) {
                    p.state = PartState::Gold;
                    outcome.promoted_to_gold.push_back(p.id);
                }
            }
            p.agree_count = 0;
            p.seen_count = 0;
            kept.push_back(std::move(p));
        }
        parts_ = std::move(kept);
        return outcome;
    }

    void promote_to_reliable(int id) {
        for (Part& p : parts_) {
            if (p.id == id && p.state == PartState::Candidate) {
                p.state = PartState::Reliable;
                p.reliable_reviews = 0;
            }
        }
    }

    // Caps reliable+gold membership per size class at n_max by repeatedly
    // removing the reliable part with the highest cosine similarity to any
    // older member, newest first on ties. Gold members never leave; if gold
    // alone exceeds the cap, the cap is relaxed for that class.
    BudgetOutcome enforce_budget(int n_max) {
        BudgetOutcome outcome;
        for (SizeClass sc : {SizeClass::Small, SizeClass::Medium, SizeClass::FullBox}) {
            int gold = 0;
            for (const auto& p : parts_)
                if (p.size_class == sc && p.state == PartState::Gold) ++gold;
            int cap = n_max;
            if (gold > n_max) {
                cap = gold;
                outcome.warnings.push_back(std::string("budget cap relaxed to gold count for class ") +
                                           to_string(sc));
            }
            while (count_voting(sc) > cap) {
                int target = pick_budget_removal(sc);
                if (target < 0) break;
                outcome.removed.push_back(parts_[target].id);
                parts_.erase(parts_.begin() + target);
            }
        }
        return outcome;
    }

    // Debug dump: one record per part with id, state, offset, size and the
    // current reliability statistics.
    std::string dump_json() const {
        std::ostringstream os;
        os << "[";
        for (size_t i = 0; i < parts_.size(); ++i) {
            const Part& p = parts_[i];
            if (i) os << ",";
            os << "\n  {\"id\": " << p.id << ", \"state\": \"" << to_string(p.state)
               << "\", \"size\": \"" << to_string(p.size_class) << "\", \"offset\": ["
               << p.offset_x << ", " << p.offset_y << "], \"agree\": " << p.agree_count
               << ", \"seen\": " << p.seen_count << ", \"reliability\": " << p.reliability()
               << ", \"birth_frame\": " << p.birth_frame << "}";
        }
        os << "\n]\n";
        return os.str();
    }

    uint64_t hash() const {
        uint64_t h = 1469598103934665603ull;  // FNV
        auto mix = [&h](uint64_t v) {
            h ^= v;
            h *= 1099511628211ull;
        };
        for (const auto& p : parts_) {
            mix(static_cast<uint64_t>(p.id));
            mix(static_cast<uint64_t>(p.state));
            mix(static_cast<uint64_t>(p.size_class));
            mix(static_cast<uint64_t>(static_cast<int64_t>(p.offset_x) + (1ll << 32)));
            mix(static_cast<uint64_t>(static_cast<int64_t>(p.offset_y) + (1ll << 32)));
            mix(static_cast<uint64_t>(p.agree_count));
            mix(static_cast<uint64_t>(p.seen_count));
            mix(static_cast<uint64_t>(p.reliable_reviews));
            double csum = p.classifier.sum();
            uint64_t bits;
            static_assert(sizeof(bits) == sizeof(csum));
            std::memcpy(&bits, &csum, sizeof(bits));
            mix(bits);
        }
        return h;
    }

private:
    bool older(const Part& a, const Part& b) const {
        if (a.birth_frame != b.birth_frame) return a.birth_frame < b.birth_frame;
        return a.id < b.id;
    }

    int pick_budget_removal(SizeClass sc) {
        // candidates for removal: reliable members of the class
        int best = -1;
        double best_sim = 0.0;
        for (size_t i = 0; i < parts_.size(); ++i) {
            const Part& p = parts_[i];
            if (p.size_class != sc || p.state != PartState::Reliable) continue;
            double max_sim = kNegInf;
            for (size_t j = 0; j < parts_.size(); ++j) {
                if (i == j) continue;
                const Part& q = parts_[j];
                if (q.size_class != sc || q.state == PartState::Candidate) continue;
                if (!older(q, p)) continue;
                max_sim = std::max(max_sim, cosine(p.classifier, q.classifier));
            }
            if (best < 0 || max_sim > best_sim ||
                (max_sim == best_sim && older(parts_[best], p))) {
                best = static_cast<int>(i);
                best_sim = max_sim;
            }
        }
        return best;
    }

    static double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        const double na = a.norm();
        const double nb = b.norm();
        if (na == 0.0 || nb == 0.0) return 0.0;
        return a.dot(b) / (na * nb);
    }

    std::vector<Part> parts_;
    int next_id_ = 0;
};

}  // namespace stp
