#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "helpers.hpp"
#include "reacquire/search_policy.hpp"
#include "reacquire/search_sim.hpp"

using namespace reacquire::search;
using doctest::Approx;
using testing::SplitMix64;

namespace {

SearchInstance singles(std::vector<double> phis, double rho0 = 1.0) {
    std::vector<FriendSpec> f;
    const char* names[] = {"a", "b", "c", "d", "e"};
    for (std::size_t k = 0; k < phis.size(); ++k) {
        f.push_back({names[k], 1, phis[k]});
    }
    return SearchInstance(f, 1, rho0);
}

Policy by_ids(const SearchInstance& inst, std::vector<std::string> ids) { return policy_from_ids(inst, ids); }

/// Expected cost straight from the definition: sum over t of the
/// probability that the first t+1 queries all fail.
double cost_by_definition(const SearchInstance& inst, const Policy& p) {
    auto s = SearchState::initial(inst);
    double survive = 1.0;
    double total = 0.0;
    for (auto i : p.sequence) {
        survive *= failure_probability_given_A(inst, s, i);
        s.record_query(inst, i);
        total += survive;
    }
    const double n = static_cast<double>(inst.total_queries());
    return inst.rho0() * total + n * (1.0 - inst.rho0());
}

}  // namespace

TEST_SUITE("search_policy") {

TEST_CASE("validity") {
    const auto one = SearchInstance({{"i", 10, 0.5}}, 10, 1.0);
    CHECK(is_valid(one, Policy{{0}}));
    CHECK_FALSE(is_valid(one, Policy{{0, 0}}));
    CHECK_FALSE(is_valid(one, Policy{{}}));
    CHECK_FALSE(is_valid(one, Policy{{1}}));
    const auto two = SearchInstance({{"i", 20, 0.5}, {"j", 20, 0.5}}, 10, 1.0);
    std::vector<std::size_t> seq{0, 0, 1, 1};
    do {
        CHECK(is_valid(two, Policy{seq}));
    } while (std::next_permutation(seq.begin(), seq.end()));
    CHECK_FALSE(is_valid(two, Policy{{0, 0, 0, 1}}));
}

TEST_CASE("expected cost examples") {
    CHECK(expected_cost(singles({1.0}), Policy{{0}}) == 0.0);
    const auto two = singles({0.9, 0.1});
    CHECK(expected_cost(two, by_ids(two, {"a", "b"})) == Approx(0.19).epsilon(1e-12));
    CHECK(expected_cost(two, by_ids(two, {"b", "a"})) == Approx(0.99).epsilon(1e-12));
    const auto none = SearchInstance({{"a", 25, 0.4}, {"b", 7, 0.9}}, 10, 0.0);
    CHECK(expected_cost(none, optimal_policy(none).policy) == 4.0);
    CHECK_THROWS_AS(expected_cost(two, Policy{{0, 0}}), std::domain_error);
}

TEST_CASE("expected cost matches its definition") {
    SplitMix64 rng(5);
    for (int k = 0; k < 100; ++k) {
        auto inst = testing::small_instance(rng, 8).with_rho(testing::uniform(rng, 0, 1), 0.0);
        const auto p = random_policy(inst, rng.next()).policy;
        CHECK(expected_cost(inst, p) == Approx(cost_by_definition(inst, p)).epsilon(1e-12));
    }
}

TEST_CASE("gamma examples") {
    const auto single = SearchInstance({{"a", 3000, 0.9}}, 5000, 1.0);
    CHECK(gamma(single, SearchState::initial(single), 0) == Approx(1.0 / 9.0).epsilon(1e-14));

    const auto joined = SearchInstance({{"a", 10000, 0.5}}, 5000, 1.0);
    CHECK(final_page_joins_block(joined, 0));
    auto s = SearchState::initial(joined);
    CHECK(gamma(joined, s, 0) == Approx(2.5).epsilon(1e-14));
    s.record_query(joined, 0);
    CHECK(gamma(joined, s, 0) == Approx(2.5).epsilon(1e-14));
    s.record_query(joined, 0);
    CHECK(gamma(joined, s, 0) == std::numeric_limits<double>::infinity());

    const auto split = SearchInstance({{"a", 6000, 0.9}}, 5000, 1.0);
    CHECK_FALSE(final_page_joins_block(split, 0));
    auto t = SearchState::initial(split);
    CHECK(gamma(split, t, 0) == Approx(1.0 / 3.0).epsilon(1e-14));
    t.record_query(split, 0);
    CHECK(gamma(split, t, 0) == Approx(2.0 / 3.0).epsilon(1e-14));

    const auto zero = SearchInstance({{"a", 6000, 0.0}}, 5000, 1.0);
    CHECK(gamma(zero, SearchState::initial(zero), 0) == std::numeric_limits<double>::infinity());
}

TEST_CASE("optimal policy examples") {
    const auto two = singles({0.9, 0.1});
    const auto r = optimal_policy(two);
    CHECK(policy_ids(two, r.policy) == std::vector<std::string>{"a", "b"});
    CHECK(r.expected_cost == Approx(0.19).epsilon(1e-12));

    const auto three = singles({0.5, 0.3, 0.8});
    const auto r3 = optimal_policy(three);
    CHECK(policy_ids(three, r3.policy) == std::vector<std::string>{"c", "a", "b"});
    REQUIRE(r3.gamma_trace.size() == 3);
    CHECK(r3.gamma_trace[0] == Approx(0.25));
    CHECK(r3.gamma_trace[1] == Approx(1.0));
    CHECK(r3.gamma_trace[2] == Approx(7.0 / 3.0));
    CHECK(brute_force_optimal(three).expected_cost == Approx(r3.expected_cost).epsilon(1e-12));

    const auto only = SearchInstance({{"z", 12000, 0.4}}, 5000, 1.0);
    for (const char* name : {"optimal", "greedy", "min_n", "max_p", "random"}) {
        CHECK(make_policy(only, name, 3).policy == Policy{{0, 0, 0}});
    }
}

TEST_CASE("ties break by ascending id") {
    const auto inst = SearchInstance({{"b", 1, 0.5}, {"a", 1, 0.5}, {"10", 1, 0.5}, {"9", 1, 0.5}}, 1, 1.0);
    const std::vector<std::string> expect{"9", "10", "a", "b"};
    CHECK(policy_ids(inst, optimal_policy(inst).policy) == expect);
    CHECK(policy_ids(inst, greedy_policy(inst).policy) == expect);
    CHECK(policy_ids(inst, max_p_policy(inst).policy) == expect);
    CHECK(policy_ids(inst, min_n_policy(inst).policy) == expect);
}

TEST_CASE("baseline policies") {
    const auto two = singles({0.9, 0.1});
    CHECK(policy_ids(two, greedy_policy(two).policy) == std::vector<std::string>{"a", "b"});

    const auto many = singles({0.2, 0.7, 0.4, 0.9, 0.1});
    CHECK(greedy_policy(many).policy == max_p_policy(many).policy);
    CHECK(policy_ids(many, greedy_policy(many).policy) == std::vector<std::string>{"d", "b", "c", "a", "e"});

    const auto sizes = SearchInstance({{"big", 10000, 0.9}, {"small", 3000, 0.1}}, 5000, 1.0);
    CHECK(sizes.friend_at(min_n_policy(sizes).policy.sequence.front()).id == "small");

    SplitMix64 rng(21);
    for (int k = 0; k < 50; ++k) {
        const auto inst = testing::small_instance(rng, 9);
        for (const char* name : {"optimal", "greedy", "min_n", "max_p", "random"}) {
            CHECK(is_valid(inst, make_policy(inst, name, 7).policy));
        }
        CHECK(random_policy(inst, 99).policy == random_policy(inst, 99).policy);
        // Greedy always keeps each friend's full pages together.
        for (const auto& id : block_violations(inst, greedy_policy(inst).policy)) {
            const auto i = inst.index_of(id);
            const auto& p = greedy_policy(inst).policy.sequence;
            std::vector<std::size_t> at;
            for (std::size_t t = 0; t < p.size(); ++t) {
                if (p[t] == i) at.push_back(t);
            }
            for (std::size_t q = 1; q + 1 < at.size(); ++q) {
                CHECK(at[q] == at[q - 1] + 1);
            }
        }
    }
}

TEST_CASE("random policy is seed-determined and varies with seed") {
    const auto inst = singles({0.1, 0.2, 0.3, 0.4, 0.5});
    std::set<std::vector<std::size_t>> seen;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        seen.insert(random_policy(inst, seed).policy.sequence);
    }
    CHECK(seen.size() > 10);
}

TEST_CASE("brute force oracle") {
    CHECK_THROWS_AS(brute_force_optimal(SearchInstance({{"a", 11, 0.5}}, 1, 1.0)), std::length_error);
    SplitMix64 rng(1234);
    for (int k = 0; k < 150; ++k) {
        const auto inst = testing::small_instance(rng, 8);
        const auto opt = optimal_policy(inst);
        const auto bf = brute_force_optimal(inst);
        CHECK(opt.expected_cost == Approx(bf.expected_cost).epsilon(1e-9));
        CHECK(block_violations(inst, opt.policy).empty());
        for (std::size_t t = 1; t < opt.gamma_trace.size(); ++t) {
            CHECK(opt.gamma_trace[t - 1] <= opt.gamma_trace[t] + 1e-12);
        }
        // The minimizer does not depend on the prior.
        const auto scaled = inst.with_rho(0.3, 0.0);
        CHECK(expected_cost(scaled, opt.policy) ==
              Approx(brute_force_optimal(scaled).expected_cost).epsilon(1e-9));
    }
}

TEST_CASE("greedy can lose to optimal") {
    const auto fixed = SearchInstance({{"A", 1, 0.5}, {"B", 2, 0.9}}, 1, 1.0);
    CHECK(policy_ids(fixed, greedy_policy(fixed).policy) == std::vector<std::string>{"A", "B", "B"});
    CHECK(policy_ids(fixed, optimal_policy(fixed).policy) == std::vector<std::string>{"B", "B", "A"});
    CHECK(greedy_policy(fixed).expected_cost == Approx(0.825).epsilon(1e-12));
    CHECK(optimal_policy(fixed).expected_cost == Approx(0.7).epsilon(1e-12));

    SplitMix64 rng(77);
    bool found = false;
    for (int k = 0; k < 2000 && !found; ++k) {
        const auto inst = testing::small_instance(rng, 8);
        found = greedy_policy(inst).expected_cost > optimal_policy(inst).expected_cost + 1e-9;
    }
    CHECK(found);
}

TEST_CASE("actual cost") {
    const auto two = singles({0.9, 0.1});
    CHECK(actual_cost(two, by_ids(two, {"a", "b"}), GroundTruth{{0}, true}) == 0.0);
    CHECK(actual_cost(two, by_ids(two, {"a", "b"}), GroundTruth{{}, true}) == 2.0);
    CHECK(actual_cost(two, by_ids(two, {"a", "b"}), GroundTruth{{}, false}) == 2.0);
    CHECK_THROWS_AS(GroundTruth({{0}, false}).validate(two), std::invalid_argument);

    const auto paged = SearchInstance({{"a", 10000, 0.5}}, 5000, 1.0);
    CHECK(actual_cost(paged, Policy{{0, 0}}, GroundTruth{{0}, true}) == Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(actual_cost(paged, Policy{{0}}, GroundTruth{{0}, true}), std::domain_error);
}

TEST_CASE("actual cost agrees with Monte Carlo over target placement") {
    SplitMix64 rng(404);
    for (int k = 0; k < 8; ++k) {
        const auto inst = testing::small_instance(rng, 8);
        GroundTruth truth;
        for (std::size_t i = 0; i < inst.size(); ++i) {
            if (rng.bernoulli(0.5)) truth.reconnected.insert(i);
        }
        const auto p = random_policy(inst, rng.next()).policy;
        const auto sim = simulate_given_truth(inst, p, truth, 100000, 17 + static_cast<std::uint64_t>(k));
        const double exact = actual_cost(inst, p, truth);
        if (sim.std_error == 0.0) {
            CHECK(sim.mean_unsuccessful_queries == Approx(exact).epsilon(1e-12));
        } else {
            CHECK(std::abs(sim.mean_unsuccessful_queries - exact) <= 3.0 * sim.std_error);
        }
    }
}

TEST_CASE("block checks flag split blocks") {
    const auto inst = SearchInstance({{"a", 3000, 0.5}, {"b", 1000, 0.5}}, 1000, 1.0);
    // a needs 3 queries; interrupting its first two is a violation.
    CHECK(block_violations(inst, by_ids(inst, {"a", "b", "a", "a"})) == std::vector<std::string>{"a"});
    CHECK(block_violations(inst, by_ids(inst, {"a", "a", "a", "b"})).empty());
}

}  // TEST_SUITE
