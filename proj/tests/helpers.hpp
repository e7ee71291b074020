#pragma once

#include <cstdint>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "reacquire/cli.hpp"
#include "reacquire/rng.hpp"
#include "reacquire/search_model.hpp"

namespace testing {

using reacquire::SplitMix64;
using reacquire::search::FriendSpec;
using reacquire::search::SearchInstance;

inline double uniform(SplitMix64& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

/// 2-4 friends with at most 3 pages each and at most `max_total` queries.
inline SearchInstance small_instance(SplitMix64& rng, std::int64_t max_total = 8, double phi_lo = 0.05,
                                     double phi_hi = 0.95, std::int64_t page = 1000) {
    while (true) {
        const auto count = 2 + rng.below(3);
        std::vector<FriendSpec> friends;
        std::int64_t total = 0;
        for (std::uint64_t k = 0; k < count; ++k) {
            const auto followers = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(3 * page)));
            total += (followers + page - 1) / page;
            friends.push_back({"f" + std::to_string(k), followers, uniform(rng, phi_lo, phi_hi)});
        }
        if (total <= max_total) {
            return SearchInstance(std::move(friends), page, 1.0, 0.0);
        }
    }
}

/// Runs the CLI in-process.
struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

inline CliResult run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "reacquire");
    std::ostringstream out;
    std::ostringstream err;
    const int code = reacquire::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("reacquire-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string str(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

}  // namespace testing
