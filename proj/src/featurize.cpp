#include "reacquire/featurize.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace reacquire::featurize {

namespace {

double log_count(double x) { return std::log1p(x); }

double b(bool v) { return v ? 1.0 : 0.0; }

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') {
        s.pop_back();
    }
    return s;
}

}  // namespace

std::vector<double> suspension_features(const AccountSnapshot& account, std::span<const std::string> seed_ids) {
    std::vector<double> x;
    x.reserve(seed_ids.size() + 7);
    for (const auto& s : seed_ids) {
        x.push_back(b(account.follows.contains(s)));
    }
    x.push_back(static_cast<double>(account.created_at));
    x.push_back(static_cast<double>(account.friends_count));
    x.push_back(static_cast<double>(account.followers_count));
    x.push_back(static_cast<double>(account.tweet_count));
    x.push_back(b(account.geo_enabled));
    x.push_back(b(account.protected_account));
    x.push_back(b(account.verified));
    return x;
}

std::vector<std::string> suspension_feature_names(std::span<const std::string> seed_ids) {
    std::vector<std::string> names;
    names.reserve(seed_ids.size() + 7);
    for (const auto& s : seed_ids) {
        names.push_back("follows:" + s);
    }
    for (const char* n : {"created_at", "friends_count", "followers_count", "tweet_count", "geo_enabled",
                          "protected", "verified"}) {
        names.emplace_back(n);
    }
    return names;
}

Moments moments(std::span<const double> values) {
    Moments m;
    if (values.empty()) {
        return m;
    }
    const auto n = static_cast<double>(values.size());
    for (double v : values) {
        m.mean += v;
    }
    m.mean /= n;
    double ss = 0.0;
    for (double v : values) {
        ss += (v - m.mean) * (v - m.mean);
    }
    m.stddev = std::sqrt(ss / n);
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const auto mid = sorted.size() / 2;
    m.median = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    return m;
}

std::vector<double> refollow_features(const RefollowRow& row) {
    const auto& u = row.user0;
    const auto& f = row.friend_account;
    std::vector<double> x;
    x.reserve(kRefollowFeatureCount);
    x.push_back(log_count(static_cast<double>(f.friends_count)));
    x.push_back(log_count(static_cast<double>(f.followers_count)));
    x.push_back(log_count(static_cast<double>(f.tweet_count)));
    x.push_back(static_cast<double>(f.created_at - u.created_at) / 86400.0);
    x.push_back(b(row.friend_followed_user0));
    x.push_back(log_count(static_cast<double>(row.interactions.mentions)));
    x.push_back(log_count(static_cast<double>(row.interactions.retweets)));
    x.push_back(log_count(static_cast<double>(row.interactions.replies)));
    x.push_back(log_count(static_cast<double>(u.friends_count)));
    x.push_back(log_count(static_cast<double>(u.followers_count)));
    x.push_back(log_count(static_cast<double>(u.tweet_count)));
    x.push_back(log_count(static_cast<double>(u.favorites_count)));
    x.push_back(log_count(static_cast<double>(u.retweet_count)));

    const auto aggregate = [&](auto field) {
        std::vector<double> v;
        v.reserve(row.user0_friends.size());
        for (const auto& a : row.user0_friends) {
            v.push_back(static_cast<double>(a.*field));
        }
        const auto m = moments(v);
        x.push_back(log_count(m.mean));
        x.push_back(log_count(m.median));
        x.push_back(log_count(m.stddev));
    };
    aggregate(&AccountSnapshot::friends_count);
    aggregate(&AccountSnapshot::followers_count);
    aggregate(&AccountSnapshot::tweet_count);
    aggregate(&AccountSnapshot::favorites_count);

    x.push_back(b(f.verified));
    double verified = 0.0;
    for (const auto& a : row.user0_friends) {
        verified += b(a.verified);
    }
    x.push_back(row.user0_friends.empty() ? 0.0 : verified / static_cast<double>(row.user0_friends.size()));
    x.push_back(b(f.language == u.language));
    return x;
}

const std::vector<std::string>& refollow_feature_names() {
    static const std::vector<std::string> names = {
        "friend_friends_log",        "friend_followers_log",       "friend_tweets_log",
        "account_age_diff_days",     "friend_followed_user0",      "mentions_log",
        "retweets_log",              "replies_log",                "user0_friends_log",
        "user0_followers_log",       "user0_tweets_log",           "user0_favorites_log",
        "user0_retweets_log",        "nbr_friends_mean_log",       "nbr_friends_median_log",
        "nbr_friends_std_log",       "nbr_followers_mean_log",     "nbr_followers_median_log",
        "nbr_followers_std_log",     "nbr_tweets_mean_log",        "nbr_tweets_median_log",
        "nbr_tweets_std_log",        "nbr_favorites_mean_log",     "nbr_favorites_median_log",
        "nbr_favorites_std_log",     "friend_verified",            "nbr_verified_fraction",
        "same_language",
    };
    return names;
}

ZScoreStats ZScoreStats::fit(const Eigen::MatrixXd& train) {
    ZScoreStats s;
    const auto cols = static_cast<std::size_t>(train.cols());
    s.mean.assign(cols, 0.0);
    s.stddev.assign(cols, 0.0);
    if (train.rows() == 0) {
        return s;
    }
    for (Eigen::Index c = 0; c < train.cols(); ++c) {
        const Eigen::VectorXd col = train.col(c);
        const auto m = moments(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())));
        s.mean[static_cast<std::size_t>(c)] = m.mean;
        s.stddev[static_cast<std::size_t>(c)] = m.stddev;
    }
    return s;
}

Eigen::MatrixXd ZScoreStats::apply(const Eigen::MatrixXd& m) const {
    if (static_cast<std::size_t>(m.cols()) != mean.size()) {
        throw std::invalid_argument("matrix has " + std::to_string(m.cols()) + " columns, stats have " +
                                    std::to_string(mean.size()));
    }
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const auto k = static_cast<std::size_t>(c);
        if (stddev[k] == 0.0) {
            out.col(c).setZero();
        } else {
            out.col(c) = (m.col(c).array() - mean[k]) / stddev[k];
        }
    }
    return out;
}

void write_table(std::ostream& out, const FeatureTable& table) {
    if (static_cast<std::size_t>(table.values.cols()) != table.names.size()) {
        throw std::invalid_argument("header and column counts differ");
    }
    for (std::size_t c = 0; c < table.names.size(); ++c) {
        if (table.names[c].find_first_of(",\n\r") != std::string::npos) {
            throw std::invalid_argument("column name contains a delimiter: " + table.names[c]);
        }
        out << (c ? "," : "") << table.names[c];
    }
    out << '\n';
    char buf[64];
    for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
        for (Eigen::Index c = 0; c < table.values.cols(); ++c) {
            const auto res = std::to_chars(buf, buf + sizeof buf, table.values(r, c));
            out << (c ? "," : "") << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
        }
        out << '\n';
    }
}

FeatureTable read_table(std::istream& in) {
    FeatureTable t;
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("line 1: missing header row");
    }
    t.names = split_line(strip_cr(line));
    std::vector<double> flat;
    std::size_t rows = 0;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const auto cells = split_line(line);
        if (cells.size() != t.names.size()) {
            throw std::runtime_error("line " + std::to_string(lineno) + ": expected " +
                                     std::to_string(t.names.size()) + " values, found " +
                                     std::to_string(cells.size()));
        }
        for (const auto& cell : cells) {
            double v = 0.0;
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
                throw std::runtime_error("line " + std::to_string(lineno) + ": not a number: '" + cell + "'");
            }
            flat.push_back(v);
        }
        ++rows;
    }
    t.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(t.names.size()));
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < t.names.size(); ++c) {
            t.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = flat[r * t.names.size() + c];
        }
    }
    return t;
}

}  // namespace reacquire::featurize
