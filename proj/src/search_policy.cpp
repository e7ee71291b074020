#include "reacquire/search_policy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "reacquire/rng.hpp"

namespace reacquire::search {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Builds a policy one stage at a time. `score` ranks the friends that still
// have queries; the smallest score wins and ties go to the lowest id.
template <class Score>
Policy build_stagewise(const SearchInstance& instance, Score score) {
    Policy policy;
    policy.sequence.reserve(static_cast<std::size_t>(instance.total_queries()));
    auto state = SearchState::initial(instance);
    for (std::int64_t t = 0; t < instance.total_queries(); ++t) {
        std::size_t best = instance.size();
        double best_score = kInf;
        for (std::size_t i = 0; i < instance.size(); ++i) {
            if (state.exhausted(instance, i)) {
                continue;
            }
            const double s = score(state, i);
            if (best == instance.size() || s < best_score ||
                (s == best_score && instance.id_rank(i) < instance.id_rank(best))) {
                best = i;
                best_score = s;
            }
        }
        policy.sequence.push_back(best);
        state.record_query(instance, best);
    }
    return policy;
}

PolicyReport report(const SearchInstance& instance, std::string name, Policy policy) {
    PolicyReport r;
    r.name = std::move(name);
    r.expected_cost = expected_cost(instance, policy);
    r.policy = std::move(policy);
    return r;
}

double follower_count(const SearchInstance& instance, std::size_t i) {
    return static_cast<double>(instance.friend_at(i).follower_count);
}

}  // namespace

Policy policy_from_ids(const SearchInstance& instance, const std::vector<std::string>& ids) {
    Policy p;
    p.sequence.reserve(ids.size());
    for (const auto& id : ids) {
        p.sequence.push_back(instance.index_of(id));
    }
    return p;
}

std::vector<std::string> policy_ids(const SearchInstance& instance, const Policy& policy) {
    std::vector<std::string> ids;
    ids.reserve(policy.sequence.size());
    for (auto i : policy.sequence) {
        ids.push_back(instance.friend_at(i).id);
    }
    return ids;
}

void GroundTruth::validate(const SearchInstance& instance) const {
    if (!exists && !reconnected.empty()) {
        throw std::invalid_argument("ground truth reconnects friends of an account that does not exist");
    }
    for (auto i : reconnected) {
        if (i >= instance.size()) {
            throw std::invalid_argument("ground truth names a friend outside the instance");
        }
    }
}

bool is_valid(const SearchInstance& instance, const Policy& policy) {
    if (static_cast<std::int64_t>(policy.sequence.size()) != instance.total_queries()) {
        return false;
    }
    std::vector<std::int64_t> counts(instance.size(), 0);
    for (auto i : policy.sequence) {
        if (i >= instance.size()) {
            return false;
        }
        ++counts[i];
    }
    for (std::size_t i = 0; i < instance.size(); ++i) {
        if (counts[i] != instance.query_count(i)) {
            return false;
        }
    }
    return true;
}

double expected_cost(const SearchInstance& instance, const Policy& policy) {
    if (!is_valid(instance, policy)) {
        throw std::domain_error("expected_cost: policy is not valid for this instance");
    }
    std::vector<std::int64_t> x(instance.size(), 0);
    double survive = 1.0;
    double sum = 0.0;
    for (auto i : policy.sequence) {
        const auto& f = instance.friend_at(i);
        survive *= page_failure_given_A(f.follower_count, instance.page_size(), f.phi, x[i]);
        survive = std::max(survive, 0.0);
        sum += survive;
        ++x[i];
    }
    const double rho0 = instance.rho0();
    return rho0 * sum + static_cast<double>(instance.total_queries()) * (1.0 - rho0);
}

bool final_page_joins_block(const SearchInstance& instance, std::size_t i) {
    const auto& f = instance.friend_at(i);
    if (f.phi == 0.0) {
        return true;
    }
    const double n = static_cast<double>(instance.query_count(i));
    const double big_n = follower_count(instance, i);
    const double page = static_cast<double>(instance.page_size());
    const double lhs = big_n / (page * f.phi) - 0.5 * n;
    const double rhs = big_n * (1.0 - f.phi) / (f.phi * (big_n - n * page + page));
    return lhs >= rhs;
}

double gamma(const SearchInstance& instance, const SearchState& state, std::size_t i) {
    const auto& f = instance.friend_at(i);
    const auto n = instance.query_count(i);
    const auto x = state.queries_done.at(i);
    if (x >= n || f.phi == 0.0) {
        return kInf;
    }
    const double phi = f.phi;
    if (n == 1) {
        return (1.0 - phi) / phi;
    }
    const double nd = static_cast<double>(n);
    const double big_n = follower_count(instance, i);
    const double page = static_cast<double>(instance.page_size());
    if (final_page_joins_block(instance, i)) {
        return nd / phi - page / (2.0 * big_n) * nd * (nd - 1.0) - 1.0;
    }
    if (x <= n - 2) {
        return big_n / (page * phi) - 0.5 * nd;
    }
    return big_n * (1.0 - phi) / (phi * (big_n - nd * page + page));
}

PolicyReport optimal_policy(const SearchInstance& instance) {
    auto policy = build_stagewise(instance, [&](const SearchState& s, std::size_t i) {
        return gamma(instance, s, i);
    });
    auto r = report(instance, "optimal", policy);
    auto state = SearchState::initial(instance);
    r.gamma_trace.reserve(policy.sequence.size());
    for (auto i : policy.sequence) {
        r.gamma_trace.push_back(gamma(instance, state, i));
        state.record_query(instance, i);
    }
    return r;
}

PolicyReport greedy_policy(const SearchInstance& instance) {
    auto policy = build_stagewise(instance, [&](const SearchState& s, std::size_t i) {
        return -success_probability_given_A(instance, s, i);
    });
    return report(instance, "greedy", std::move(policy));
}

PolicyReport min_n_policy(const SearchInstance& instance) {
    auto policy = build_stagewise(instance, [&](const SearchState& s, std::size_t i) {
        const auto remaining = instance.friend_at(i).follower_count - s.queries_done[i] * instance.page_size();
        return static_cast<double>(remaining);
    });
    return report(instance, "min_n", std::move(policy));
}

PolicyReport max_p_policy(const SearchInstance& instance) {
    auto policy = build_stagewise(instance, [&](const SearchState& s, std::size_t i) {
        return -conditional_reconnection(instance, s, i);
    });
    return report(instance, "max_p", std::move(policy));
}

PolicyReport random_policy(const SearchInstance& instance, std::uint64_t seed) {
    std::vector<std::size_t> by_id(instance.size());
    for (std::size_t i = 0; i < instance.size(); ++i) {
        by_id[instance.id_rank(i)] = i;
    }
    SplitMix64 rng(SplitMix64::mix(seed));
    Policy policy;
    auto state = SearchState::initial(instance);
    std::vector<std::size_t> open;
    for (std::int64_t t = 0; t < instance.total_queries(); ++t) {
        open.clear();
        for (auto i : by_id) {
            if (!state.exhausted(instance, i)) {
                open.push_back(i);
            }
        }
        const auto pick = open[rng.below(open.size())];
        policy.sequence.push_back(pick);
        state.record_query(instance, pick);
    }
    return report(instance, "random", std::move(policy));
}

PolicyReport brute_force_optimal(const SearchInstance& instance, std::int64_t max_queries) {
    if (instance.total_queries() > max_queries) {
        throw std::length_error("brute force refused: " + std::to_string(instance.total_queries()) +
                                " queries exceed the cap of " + std::to_string(max_queries));
    }
    std::vector<std::size_t> seq;
    for (std::size_t i = 0; i < instance.size(); ++i) {
        seq.insert(seq.end(), static_cast<std::size_t>(instance.query_count(i)), i);
    }
    Policy best{seq};
    double best_cost = kInf;
    do {
        Policy candidate{seq};
        const double c = expected_cost(instance, candidate);
        if (c < best_cost) {
            best_cost = c;
            best = std::move(candidate);
        }
    } while (std::next_permutation(seq.begin(), seq.end()));
    PolicyReport r;
    r.name = "brute_force";
    r.policy = std::move(best);
    r.expected_cost = best_cost;
    return r;
}

double actual_cost(const SearchInstance& instance, const Policy& policy, const GroundTruth& truth) {
    if (!is_valid(instance, policy)) {
        throw std::domain_error("actual_cost: policy is not valid for this instance");
    }
    truth.validate(instance);
    const auto total = static_cast<double>(instance.total_queries());
    if (!truth.exists || truth.reconnected.empty()) {
        return total;
    }
    // P(C > t) = prod over reconnected friends of the unexamined fraction after stage t.
    auto state = SearchState::initial(instance);
    std::vector<double> unseen(instance.size(), 1.0);
    double miss = 1.0;
    double sum = 0.0;
    for (auto i : policy.sequence) {
        state.record_query(instance, i);
        if (truth.reconnected.contains(i)) {
            unseen[i] = 1.0 - queried_fraction(instance, state, i);
            miss = 1.0;
            for (auto r : truth.reconnected) {
                miss *= unseen[r];
            }
        }
        sum += miss;
    }
    return sum;
}

std::vector<std::string> block_violations(const SearchInstance& instance, const Policy& policy) {
    std::vector<std::vector<std::size_t>> positions(instance.size());
    for (std::size_t t = 0; t < policy.sequence.size(); ++t) {
        positions.at(policy.sequence[t]).push_back(t);
    }
    std::vector<std::string> bad;
    for (std::size_t i = 0; i < instance.size(); ++i) {
        const auto& p = positions[i];
        if (p.size() < 2) {
            continue;
        }
        const std::size_t must_join = final_page_joins_block(instance, i) ? p.size() : p.size() - 1;
        bool ok = true;
        for (std::size_t k = 1; k < must_join; ++k) {
            ok = ok && p[k] == p[k - 1] + 1;
        }
        if (!ok) {
            bad.push_back(instance.friend_at(i).id);
        }
    }
    return bad;
}

PolicyReport make_policy(const SearchInstance& instance, std::string_view name, std::uint64_t seed) {
    if (name == "optimal") return optimal_policy(instance);
    if (name == "greedy") return greedy_policy(instance);
    if (name == "min_n") return min_n_policy(instance);
    if (name == "max_p") return max_p_policy(instance);
    if (name == "random") return random_policy(instance, seed);
    throw std::invalid_argument("unknown policy '" + std::string(name) + "'");
}

}  // namespace reacquire::search
