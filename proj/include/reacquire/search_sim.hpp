#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "reacquire/search_model.hpp"
#include "reacquire/search_policy.hpp"

namespace reacquire::search {

/// Monte Carlo summary of running one policy many times.
struct SimReport {
    std::int64_t runs = 0;
    double mean_unsuccessful_queries = 0.0;
    double std_error = 0.0;
    /// Indexed by Termination: Found, BelowThreshold, Exhausted.
    std::array<std::int64_t, 3> termination_counts{};
    std::uint64_t seed = 0;
    std::string rng;
    /// Exact integer sums behind the mean and standard error.
    std::uint64_t cost_sum = 0;
    std::uint64_t cost_sq_sum = 0;

    std::int64_t count(Termination t) const { return termination_counts[static_cast<std::size_t>(t)]; }
    friend bool operator==(const SimReport&, const SimReport&) = default;
};

struct SimOptions {
    /// 0 = std::thread::hardware_concurrency(). Results do not depend on it.
    unsigned threads = 0;
};

/// Runs the full generative model: existence ~ Bernoulli(rho0), each
/// reconnection ~ Bernoulli(phi_i), target position uniform within each
/// reconnected friend's followers. A run stops when the target is found, when
/// rho(t) < rho_bar before a query, or when the policy is exhausted. Run r
/// draws from SplitMix64::stream(seed, r).
SimReport simulate(const SearchInstance& instance, const Policy& policy, std::int64_t runs,
                   std::uint64_t seed, SimOptions options = {});

/// As simulate, with existence and reconnections fixed by `truth`; only the
/// target's page within each reconnected friend is random.
SimReport simulate_given_truth(const SearchInstance& instance, const Policy& policy,
                               const GroundTruth& truth, std::int64_t runs, std::uint64_t seed,
                               SimOptions options = {});

/// Pools runs from several reports (e.g. one per random policy). Seed is taken
/// from the first part.
SimReport merge_reports(std::span<const SimReport> parts);

/// rho(t) for t = 0..N-1 along the policy's no-find trajectory, updated one
/// friend factor per stage (the simulator's termination check).
std::vector<double> existence_trajectory(const SearchInstance& instance, const Policy& policy);

}  // namespace reacquire::search
