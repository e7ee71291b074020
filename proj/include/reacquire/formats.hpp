#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "reacquire/featurize.hpp"
#include "reacquire/learn.hpp"
#include "reacquire/search_model.hpp"
#include "reacquire/search_policy.hpp"
#include "reacquire/search_sim.hpp"
#include "reacquire/similarity.hpp"

namespace reacquire::io {

using nlohmann::json;

/// Malformed input. `where` is a field path ("friends[2].phi") or "line N".
class FormatError : public std::runtime_error {
public:
    FormatError(std::string where, const std::string& what)
        : std::runtime_error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
json parse_json(const std::string& text, const std::string& origin);

// --- search -----------------------------------------------------------------

json to_json(const search::SearchInstance& instance);
search::SearchInstance instance_from_json(const json& j);

/// {"exists": bool, "reconnected": [friend ids]}
json to_json(const search::GroundTruth& truth, const search::SearchInstance& instance);
search::GroundTruth truth_from_json(const json& j, const search::SearchInstance& instance);

/// Infinite gamma values are written as the string "inf".
json to_json(const search::PolicyReport& report, const search::SearchInstance& instance);
search::PolicyReport policy_report_from_json(const json& j, const search::SearchInstance& instance);

json to_json(const search::SimReport& report);
search::SimReport sim_report_from_json(const json& j);

// --- models -----------------------------------------------------------------

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kSignConvention = "p=sigmoid(+score)";

/// A trained classifier plus everything needed to apply it.
struct StoredModel {
    std::string kind;  // suspension | match | refollow
    std::vector<std::string> feature_names;
    std::variant<learn::LinearModel, learn::KernelModel> model;
    std::optional<featurize::ZScoreStats> zscore;
    std::optional<double> threshold;

    /// Normalizes (if stats are present) and returns the probability.
    double predict(std::span<const double> raw) const;
};

json to_json(const StoredModel& model);
StoredModel model_from_json(const json& j);

/// A 4-feature linear match model; throws FormatError otherwise.
similarity::MatchModel to_match_model(const StoredModel& model);
StoredModel from_match_model(const similarity::MatchModel& model);

// --- profiles, edges, accounts --------------------------------------------------

/// One JSON object per line with user_id, screen_name, name and, for each of
/// profile_picture / banner_picture, either "<field>_hash": hex or
/// "<field>": path to a PGM file relative to `base_dir`. Blank lines are
/// skipped. Writing always uses the hash form.
std::vector<similarity::ProfileRecord> parse_profiles(const std::string& text,
                                                      const std::filesystem::path& base_dir);
std::vector<similarity::ProfileRecord> read_profiles(const std::filesystem::path& path);
std::string format_profiles(const std::vector<similarity::ProfileRecord>& profiles);

struct Edge {
    std::string follower;
    std::string followed;
    friend bool operator==(const Edge&, const Edge&) = default;
};

/// `follower_id,friend_id` rows; an optional header with exactly those names.
std::vector<Edge> parse_edges(const std::string& text);
std::string format_edges(const std::vector<Edge>& edges);

/// Account sidecar record: an AccountSnapshot plus an activity flag.
struct AccountRecord {
    featurize::AccountSnapshot snapshot;
    bool active = true;
};

/// One JSON object per line. `follows` is not stored; it comes from edges.
std::vector<AccountRecord> parse_accounts(const std::string& text);
std::string format_accounts(const std::vector<AccountRecord>& accounts);

/// `user0_id,friend_id,mentions,retweets,replies` rows with that header.
struct InteractionRecord {
    std::string user0;
    std::string friend_id;
    featurize::Interactions counts;
};
std::vector<InteractionRecord> parse_interactions(const std::string& text);

}  // namespace reacquire::io
