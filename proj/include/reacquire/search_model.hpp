#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace reacquire::search {

/// A former friend of the target: one urn in the search.
struct FriendSpec {
    std::string id;
    std::int64_t follower_count = 0;  // N_i
    double phi = 0.0;                 // reconnection probability
};

/**
 * The former-friend urn system for one suspended user.
 *
 * Friends keep the order they were given in; every per-friend operation in
 * this namespace takes the friend's position in that order. `id_rank` gives
 * the position of each friend in ascending-id order, which is what every
 * policy constructor uses to break ties.
 *
 * Ids are compared as strings, except that two all-digit ids compare
 * numerically (account ids are usually decimal integers).
 */
class SearchInstance {
public:
    SearchInstance(std::vector<FriendSpec> friends, std::int64_t page_size, double rho0,
                   double rho_bar = 0.0);

    const std::vector<FriendSpec>& friends() const noexcept { return friends_; }
    const FriendSpec& friend_at(std::size_t i) const;
    std::size_t size() const noexcept { return friends_.size(); }
    std::int64_t page_size() const noexcept { return page_size_; }
    double rho0() const noexcept { return rho0_; }
    double rho_bar() const noexcept { return rho_bar_; }

    /// ceil(N_i / N_M): number of queries that exhaust friend i.
    std::int64_t query_count(std::size_t i) const;
    /// N = sum of query_count over all friends.
    std::int64_t total_queries() const noexcept { return total_queries_; }

    /// Position of the friend with this id; throws std::domain_error if unknown.
    std::size_t index_of(std::string_view id) const;
    std::size_t id_rank(std::size_t i) const { return id_rank_.at(i); }

    SearchInstance with_rho(double rho0, double rho_bar) const;

private:
    std::vector<FriendSpec> friends_;
    std::int64_t page_size_;
    double rho0_;
    double rho_bar_;
    std::vector<std::int64_t> query_counts_;
    std::vector<std::size_t> id_rank_;
    std::unordered_map<std::string, std::size_t> index_;
    std::int64_t total_queries_ = 0;
};

/// Ascending-id ordering used for every tie break.
bool id_less(std::string_view a, std::string_view b);

enum class Termination { Found, BelowThreshold, Exhausted };

std::string_view to_string(Termination t);

/// Queries executed so far on each friend (x(t)), plus the terminal marker.
struct SearchState {
    std::vector<std::int64_t> queries_done;
    std::int64_t stage = 0;
    std::optional<Termination> terminated;

    static SearchState initial(const SearchInstance& instance);

    bool exhausted(const SearchInstance& instance, std::size_t i) const;
    /// Advance after an unsuccessful query of friend i.
    void record_query(const SearchInstance& instance, std::size_t i);
};

/// psi_i: fraction of friend i's followers already examined.
double queried_fraction(const SearchInstance& instance, const SearchState& state, std::size_t i);

/// prod_i (1 - psi_i phi_i), clamped at 0.
double miss_product(const SearchInstance& instance, const SearchState& state);

/// rho(t): posterior probability that a new account exists.
double existence_probability(const SearchInstance& instance, const SearchState& state);

/// Posterior probability of reconnection with i given the account exists and
/// has not been found yet.
double conditional_reconnection(const SearchInstance& instance, const SearchState& state,
                                std::size_t i);

/// P(query of i from this state finds the target | account exists).
double success_probability_given_A(const SearchInstance& instance, const SearchState& state,
                                   std::size_t i);

/// P(query of i from this state misses | account exists).
double failure_probability_given_A(const SearchInstance& instance, const SearchState& state,
                                   std::size_t i);

/// P(query of i from this state finds the target), existence unconditioned.
double unconditional_success_probability(const SearchInstance& instance, const SearchState& state,
                                         std::size_t i);

// Id-addressed conveniences; unknown ids throw std::domain_error.
double queried_fraction(const SearchInstance& instance, const SearchState& state,
                        std::string_view id);
double conditional_reconnection(const SearchInstance& instance, const SearchState& state,
                                std::string_view id);

/// Per-page success / failure probabilities given A from a bare query count,
/// shared by the state-based functions above and the policy code.
double page_success_given_A(std::int64_t followers, std::int64_t page_size, double phi,
                            std::int64_t queries_done);
double page_failure_given_A(std::int64_t followers, std::int64_t page_size, double phi,
                            std::int64_t queries_done);

}  // namespace reacquire::search
