#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace reacquire::featurize {

/// Account metadata as observed at one point in time.
struct AccountSnapshot {
    std::string id;
    std::int64_t created_at = 0;  // seconds since the Unix epoch
    std::uint64_t friends_count = 0;
    std::uint64_t followers_count = 0;
    std::uint64_t tweet_count = 0;
    std::uint64_t favorites_count = 0;
    std::uint64_t retweet_count = 0;
    bool geo_enabled = false;
    bool protected_account = false;
    bool verified = false;
    std::string language;
    std::set<std::string> follows;
};

/// Per-seed follow indicators followed by seven account features.
std::vector<double> suspension_features(const AccountSnapshot& account, std::span<const std::string> seed_ids);
std::vector<std::string> suspension_feature_names(std::span<const std::string> seed_ids);

struct Interactions {
    std::uint64_t mentions = 0;
    std::uint64_t retweets = 0;
    std::uint64_t replies = 0;
};

/// One (suspended user, former friend) pair.
struct RefollowRow {
    AccountSnapshot user0;
    std::vector<AccountSnapshot> user0_friends;  // used only through order-free aggregates
    AccountSnapshot friend_account;
    bool friend_followed_user0 = false;
    Interactions interactions;
    std::optional<int> response;  // +1 refollowed, -1 not; training rows only
};

inline constexpr std::size_t kRefollowFeatureCount = 28;

/// log(1 + x) for every count feature; neighbor aggregates are taken over raw
/// counts and logged afterwards. Account age difference is in days.
std::vector<double> refollow_features(const RefollowRow& row);
const std::vector<std::string>& refollow_feature_names();

/// Mean, median and population standard deviation; all 0 for an empty sample.
struct Moments {
    double mean = 0.0;
    double median = 0.0;
    double stddev = 0.0;
};
Moments moments(std::span<const double> values);

/// Per-column standardization fitted on training rows.
struct ZScoreStats {
    std::vector<double> mean;
    std::vector<double> stddev;

    static ZScoreStats fit(const Eigen::MatrixXd& train);
    /// Columns with zero spread map to 0.
    Eigen::MatrixXd apply(const Eigen::MatrixXd& m) const;
};

/// Numeric matrix with a header of column names.
struct FeatureTable {
    std::vector<std::string> names;
    Eigen::MatrixXd values;
};

/// Comma-separated; header row first. Values use the shortest round-trip
/// decimal form so they read back bit-exactly.
void write_table(std::ostream& out, const FeatureTable& table);
FeatureTable read_table(std::istream& in);

}  // namespace reacquire::featurize
