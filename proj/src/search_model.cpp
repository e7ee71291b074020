#include "reacquire/search_model.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace reacquire::search {

namespace {

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string_view strip_leading_zeros(std::string_view s) {
    const auto pos = s.find_first_not_of('0');
    return pos == std::string_view::npos ? s.substr(s.size() - 1) : s.substr(pos);
}

void check_probability(double p, const std::string& what) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument(what + " must lie in [0,1]");
    }
}

void check_index(const SearchInstance& instance, std::size_t i) {
    if (i >= instance.size()) {
        throw std::domain_error("friend index " + std::to_string(i) + " out of range");
    }
}

void check_live(const SearchState& state) {
    if (state.terminated) {
        throw std::domain_error("search state is terminal");
    }
}

}  // namespace

bool id_less(std::string_view a, std::string_view b) {
    if (all_digits(a) && all_digits(b)) {
        const auto x = strip_leading_zeros(a);
        const auto y = strip_leading_zeros(b);
        if (x.size() != y.size()) {
            return x.size() < y.size();
        }
        if (x != y) {
            return x < y;
        }
    }
    return a < b;
}

SearchInstance::SearchInstance(std::vector<FriendSpec> friends, std::int64_t page_size, double rho0,
                               double rho_bar)
    : friends_(std::move(friends)), page_size_(page_size), rho0_(rho0), rho_bar_(rho_bar) {
    if (friends_.empty()) {
        throw std::invalid_argument("search instance needs at least one friend");
    }
    if (page_size_ < 1) {
        throw std::invalid_argument("page_size must be positive");
    }
    check_probability(rho0_, "rho0");
    if (!(rho_bar_ >= 0.0 && rho_bar_ < 1.0)) {
        throw std::invalid_argument("rho_bar must lie in [0,1)");
    }
    query_counts_.reserve(friends_.size());
    for (std::size_t i = 0; i < friends_.size(); ++i) {
        const auto& f = friends_[i];
        if (f.follower_count < 1) {
            throw std::invalid_argument("friend '" + f.id + "' has no followers to query");
        }
        check_probability(f.phi, "phi of friend '" + f.id + "'");
        if (!index_.emplace(f.id, i).second) {
            throw std::invalid_argument("duplicate friend id '" + f.id + "'");
        }
        const auto n = (f.follower_count + page_size_ - 1) / page_size_;
        query_counts_.push_back(n);
        total_queries_ += n;
    }

    std::vector<std::size_t> order(friends_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return id_less(friends_[a].id, friends_[b].id); });
    id_rank_.resize(friends_.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        id_rank_[order[r]] = r;
    }
}

const FriendSpec& SearchInstance::friend_at(std::size_t i) const {
    check_index(*this, i);
    return friends_[i];
}

std::int64_t SearchInstance::query_count(std::size_t i) const {
    check_index(*this, i);
    return query_counts_[i];
}

std::size_t SearchInstance::index_of(std::string_view id) const {
    const auto it = index_.find(std::string(id));
    if (it == index_.end()) {
        throw std::domain_error("unknown friend id '" + std::string(id) + "'");
    }
    return it->second;
}

SearchInstance SearchInstance::with_rho(double rho0, double rho_bar) const {
    return SearchInstance(friends_, page_size_, rho0, rho_bar);
}

std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::Found: return "Found";
        case Termination::BelowThreshold: return "BelowThreshold";
        case Termination::Exhausted: return "Exhausted";
    }
    return "?";
}

SearchState SearchState::initial(const SearchInstance& instance) {
    SearchState s;
    s.queries_done.assign(instance.size(), 0);
    return s;
}

bool SearchState::exhausted(const SearchInstance& instance, std::size_t i) const {
    return queries_done.at(i) >= instance.query_count(i);
}

void SearchState::record_query(const SearchInstance& instance, std::size_t i) {
    check_live(*this);
    check_index(instance, i);
    if (exhausted(instance, i)) {
        throw std::domain_error("friend '" + instance.friend_at(i).id + "' has no queries left");
    }
    ++queries_done[i];
    ++stage;
}

double queried_fraction(const SearchInstance& instance, const SearchState& state, std::size_t i) {
    check_live(state);
    check_index(instance, i);
    const auto x = state.queries_done.at(i);
    if (x >= instance.query_count(i)) {
        return 1.0;
    }
    return static_cast<double>(x) * static_cast<double>(instance.page_size()) /
           static_cast<double>(instance.friend_at(i).follower_count);
}

double miss_product(const SearchInstance& instance, const SearchState& state) {
    double prod = 1.0;
    for (std::size_t i = 0; i < instance.size(); ++i) {
        prod *= 1.0 - queried_fraction(instance, state, i) * instance.friend_at(i).phi;
    }
    return std::max(prod, 0.0);
}

double existence_probability(const SearchInstance& instance, const SearchState& state) {
    const double rho0 = instance.rho0();
    const double prod = miss_product(instance, state);
    if (rho0 == 0.0 || prod == 0.0) {
        return 0.0;
    }
    return rho0 * prod / (1.0 - rho0 + rho0 * prod);
}

double conditional_reconnection(const SearchInstance& instance, const SearchState& state,
                                std::size_t i) {
    const double psi = queried_fraction(instance, state, i);
    const double phi = instance.friend_at(i).phi;
    if (psi >= 1.0) {
        return 0.0;
    }
    return phi * (1.0 - psi) / (1.0 - psi * phi);
}

double page_success_given_A(std::int64_t followers, std::int64_t page_size, double phi,
                            std::int64_t queries_done) {
    const auto n = (followers + page_size - 1) / page_size;
    if (queries_done < 0 || queries_done >= n) {
        throw std::domain_error("no queries left for this friend");
    }
    const double big_n = static_cast<double>(followers);
    const double page = static_cast<double>(page_size);
    const double x = static_cast<double>(queries_done);
    const double denom = big_n - phi * x * page;
    if (queries_done <= n - 2) {
        return phi * page / denom;
    }
    return phi * (big_n - x * page) / denom;
}

double page_failure_given_A(std::int64_t followers, std::int64_t page_size, double phi,
                            std::int64_t queries_done) {
    const auto n = (followers + page_size - 1) / page_size;
    if (queries_done < 0 || queries_done >= n) {
        throw std::domain_error("no queries left for this friend");
    }
    const double big_n = static_cast<double>(followers);
    const double page = static_cast<double>(page_size);
    const double x = static_cast<double>(queries_done);
    const double denom = big_n - phi * x * page;
    if (queries_done <= n - 2) {
        return (big_n - phi * (x + 1.0) * page) / denom;
    }
    return (1.0 - phi) * big_n / denom;
}

double success_probability_given_A(const SearchInstance& instance, const SearchState& state,
                                   std::size_t i) {
    check_live(state);
    const auto& f = instance.friend_at(i);
    return page_success_given_A(f.follower_count, instance.page_size(), f.phi,
                                state.queries_done.at(i));
}

double failure_probability_given_A(const SearchInstance& instance, const SearchState& state,
                                   std::size_t i) {
    check_live(state);
    const auto& f = instance.friend_at(i);
    return page_failure_given_A(f.follower_count, instance.page_size(), f.phi,
                                state.queries_done.at(i));
}

double unconditional_success_probability(const SearchInstance& instance, const SearchState& state,
                                         std::size_t i) {
    return success_probability_given_A(instance, state, i) * existence_probability(instance, state);
}

double queried_fraction(const SearchInstance& instance, const SearchState& state,
                        std::string_view id) {
    return queried_fraction(instance, state, instance.index_of(id));
}

double conditional_reconnection(const SearchInstance& instance, const SearchState& state,
                                std::string_view id) {
    return conditional_reconnection(instance, state, instance.index_of(id));
}

}  // namespace reacquire::search
