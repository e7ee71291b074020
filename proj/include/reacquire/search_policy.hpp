#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "reacquire/search_model.hpp"

namespace reacquire::search {

/// Ordered friend queries u_0..u_{N-1}, as friend positions in the instance.
struct Policy {
    std::vector<std::size_t> sequence;

    friend bool operator==(const Policy&, const Policy&) = default;
};

Policy policy_from_ids(const SearchInstance& instance, const std::vector<std::string>& ids);
std::vector<std::string> policy_ids(const SearchInstance& instance, const Policy& policy);

/// The realized outcome for one target: whom they actually refollowed.
struct GroundTruth {
    std::set<std::size_t> reconnected;
    bool exists = true;

    /// Throws std::invalid_argument if reconnected is non-empty while exists is false
    /// or names a friend outside the instance.
    void validate(const SearchInstance& instance) const;
};

struct PolicyReport {
    std::string name;
    Policy policy;
    double expected_cost = 0.0;
    /// gamma(x(t), u_t) per stage; filled by optimal_policy only.
    std::vector<double> gamma_trace;
};

/// Each friend appears exactly ceil(N_i/N_M) times.
bool is_valid(const SearchInstance& instance, const Policy& policy);

/// Expected number of unsuccessful queries:
///   rho0 * sum_t prod_{k<=t} q(k) + N (1 - rho0)
/// where q(k) is the stage-k failure probability given that the account exists.
/// rho_bar is ignored (the analytic cost assumes exhaustive search).
double expected_cost(const SearchInstance& instance, const Policy& policy);

/// True when friend i's final page is cheap enough that all of i's queries
/// belong in one block; equality counts as true.
bool final_page_joins_block(const SearchInstance& instance, std::size_t i);

/// Stage index whose stagewise minimization gives an optimal policy.
/// +infinity once friend i is exhausted; also +infinity when phi_i = 0.
double gamma(const SearchInstance& instance, const SearchState& state, std::size_t i);

PolicyReport optimal_policy(const SearchInstance& instance);
PolicyReport greedy_policy(const SearchInstance& instance);
PolicyReport min_n_policy(const SearchInstance& instance);
PolicyReport max_p_policy(const SearchInstance& instance);
PolicyReport random_policy(const SearchInstance& instance, std::uint64_t seed);

inline constexpr std::int64_t kDefaultBruteForceCap = 10;

/// Exhaustive minimum over all distinct valid orderings. Refuses instances with
/// more than `max_queries` total queries (std::length_error).
PolicyReport brute_force_optimal(const SearchInstance& instance,
                                 std::int64_t max_queries = kDefaultBruteForceCap);

/// Expected unsuccessful queries given the target's actual reconnections, with
/// the target placed uniformly and independently among each reconnected
/// friend's followers.
double actual_cost(const SearchInstance& instance, const Policy& policy, const GroundTruth& truth);

/// Block-structure checks. Returns the ids of friends whose queries violate
/// (1) contiguity of the first ceil-1 queries or (2) full contiguity when
/// final_page_joins_block holds.
std::vector<std::string> block_violations(const SearchInstance& instance, const Policy& policy);

/// Policy names accepted by make_policy: optimal, greedy, min_n, max_p, random.
PolicyReport make_policy(const SearchInstance& instance, std::string_view name, std::uint64_t seed = 0);

}  // namespace reacquire::search
