#include "reacquire/search_sim.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <thread>

#include "reacquire/rng.hpp"

namespace reacquire::search {

namespace {

void fill_moments(SimReport& rep) {
    if (rep.runs <= 0) {
        return;
    }
    const double n = static_cast<double>(rep.runs);
    rep.mean_unsuccessful_queries = static_cast<double>(rep.cost_sum) / n;
    rep.std_error = 0.0;
    if (rep.runs > 1) {
        // Sample variance from exact integer moments: (S2 - S1^2/n) / (n - 1).
        const long double s1 = rep.cost_sum;
        const long double s2 = rep.cost_sq_sum;
        const long double var = std::max<long double>(0.0L, (s2 - s1 * s1 / n) / (n - 1.0));
        rep.std_error = static_cast<double>(std::sqrt(var / n));
    }
}

struct RunOutcome {
    std::int64_t cost;
    Termination reason;
};

struct Partial {
    std::uint64_t sum = 0;
    std::uint64_t sq_sum = 0;
    std::array<std::int64_t, 3> counts{};
};

// The policy's deterministic no-find trajectory: for each stage, which friend
// and which page of that friend is queried.
struct Trajectory {
    std::vector<std::size_t> friend_at;
    std::vector<std::int64_t> page_at;
    std::int64_t stop_stage;  // first stage with rho(t) < rho_bar, or N
};

Trajectory trace(const SearchInstance& instance, const Policy& policy) {
    Trajectory tr;
    const auto total = instance.total_queries();
    tr.friend_at = policy.sequence;
    tr.page_at.reserve(policy.sequence.size());
    std::vector<std::int64_t> x(instance.size(), 0);
    for (auto i : policy.sequence) {
        tr.page_at.push_back(x[i]++);
    }
    tr.stop_stage = total;
    const auto rho = existence_trajectory(instance, policy);
    for (std::int64_t t = 0; t < total; ++t) {
        if (rho[static_cast<std::size_t>(t)] < instance.rho_bar()) {
            tr.stop_stage = t;
            break;
        }
    }
    return tr;
}

RunOutcome walk(const Trajectory& tr, const std::vector<std::optional<std::int64_t>>& target_page,
                std::int64_t total) {
    for (std::int64_t t = 0; t < total; ++t) {
        if (t == tr.stop_stage) {
            return {t, Termination::BelowThreshold};
        }
        const auto i = tr.friend_at[static_cast<std::size_t>(t)];
        const auto& page = target_page[i];
        if (page && *page == tr.page_at[static_cast<std::size_t>(t)]) {
            return {t, Termination::Found};
        }
    }
    return {total, Termination::Exhausted};
}

std::int64_t draw_page(const SearchInstance& instance, std::size_t i, SplitMix64& rng) {
    const auto followers = static_cast<std::uint64_t>(instance.friend_at(i).follower_count);
    const auto position = rng.below(followers);
    return static_cast<std::int64_t>(position / static_cast<std::uint64_t>(instance.page_size()));
}

// Runs [0, runs) split into contiguous chunks. Each run owns its RNG stream and
// the reduction is over exact integers, so the thread count never changes the result.
template <class RunFn>
SimReport run_all(std::int64_t runs, std::uint64_t seed, SimOptions options, RunFn run_one) {
    if (runs < 1) {
        throw std::invalid_argument("simulation needs at least one run");
    }
    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::int64_t>(threads, runs));
    std::vector<Partial> partials(threads);
    auto work = [&](unsigned w) {
        const auto begin = runs * w / threads;
        const auto end = runs * (w + 1) / threads;
        Partial& p = partials[w];
        for (auto r = begin; r < end; ++r) {
            auto rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(r));
            const auto out = run_one(rng);
            const auto c = static_cast<std::uint64_t>(out.cost);
            p.sum += c;
            p.sq_sum += c * c;
            ++p.counts[static_cast<std::size_t>(out.reason)];
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back(work, w);
        }
    }

    SimReport rep;
    rep.runs = runs;
    rep.seed = seed;
    rep.rng = std::string(SplitMix64::algorithm);
    for (const auto& p : partials) {
        rep.cost_sum += p.sum;
        rep.cost_sq_sum += p.sq_sum;
        for (std::size_t k = 0; k < 3; ++k) {
            rep.termination_counts[k] += p.counts[k];
        }
    }
    fill_moments(rep);
    return rep;
}

void require_valid(const SearchInstance& instance, const Policy& policy) {
    if (!is_valid(instance, policy)) {
        throw std::domain_error("simulate: policy is not valid for this instance");
    }
}

}  // namespace

std::vector<double> existence_trajectory(const SearchInstance& instance, const Policy& policy) {
    require_valid(instance, policy);
    std::vector<double> factor(instance.size(), 1.0);
    std::vector<std::int64_t> x(instance.size(), 0);
    std::vector<double> out;
    out.reserve(policy.sequence.size());
    const double rho0 = instance.rho0();
    for (auto i : policy.sequence) {
        double prod = 1.0;
        for (double f : factor) {
            prod *= f;
        }
        prod = std::max(prod, 0.0);
        out.push_back(rho0 == 0.0 || prod == 0.0 ? 0.0 : rho0 * prod / (1.0 - rho0 + rho0 * prod));
        ++x[i];
        const auto& f = instance.friend_at(i);
        const double psi = x[i] >= instance.query_count(i)
                               ? 1.0
                               : static_cast<double>(x[i]) * static_cast<double>(instance.page_size()) /
                                     static_cast<double>(f.follower_count);
        factor[i] = 1.0 - psi * f.phi;
    }
    return out;
}

SimReport simulate(const SearchInstance& instance, const Policy& policy, std::int64_t runs,
                   std::uint64_t seed, SimOptions options) {
    require_valid(instance, policy);
    const auto tr = trace(instance, policy);
    const auto total = instance.total_queries();
    return run_all(runs, seed, options, [&](SplitMix64& rng) {
        std::vector<std::optional<std::int64_t>> page(instance.size());
        if (rng.bernoulli(instance.rho0())) {
            for (std::size_t i = 0; i < instance.size(); ++i) {
                if (rng.bernoulli(instance.friend_at(i).phi)) {
                    page[i] = draw_page(instance, i, rng);
                }
            }
        }
        return walk(tr, page, total);
    });
}

SimReport simulate_given_truth(const SearchInstance& instance, const Policy& policy,
                               const GroundTruth& truth, std::int64_t runs, std::uint64_t seed,
                               SimOptions options) {
    require_valid(instance, policy);
    truth.validate(instance);
    const auto tr = trace(instance, policy);
    const auto total = instance.total_queries();
    return run_all(runs, seed, options, [&](SplitMix64& rng) {
        std::vector<std::optional<std::int64_t>> page(instance.size());
        if (truth.exists) {
            for (auto i : truth.reconnected) {
                page[i] = draw_page(instance, i, rng);
            }
        }
        return walk(tr, page, total);
    });
}

SimReport merge_reports(std::span<const SimReport> parts) {
    SimReport rep;
    rep.rng = std::string(SplitMix64::algorithm);
    if (!parts.empty()) {
        rep.seed = parts.front().seed;
    }
    for (const auto& p : parts) {
        rep.runs += p.runs;
        rep.cost_sum += p.cost_sum;
        rep.cost_sq_sum += p.cost_sq_sum;
        for (std::size_t k = 0; k < 3; ++k) {
            rep.termination_counts[k] += p.termination_counts[k];
        }
    }
    fill_moments(rep);
    return rep;
}

}  // namespace reacquire::search
