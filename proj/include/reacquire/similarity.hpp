#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reacquire/image.hpp"

namespace reacquire::similarity {

enum class RatioVariant {
    /// (|a|+|b| - d2) / (|a|+|b|), substitutions cost 2. Default.
    IndelWeighted,
    /// 1 - d / max(|a|,|b|), unit costs.
    Simple,
};

/// Decodes UTF-8 into Unicode scalar values. Bytes that do not form a valid
/// sequence map one-to-one onto U+DC80..U+DCFF so distinct inputs stay distinct.
std::u32string decode_utf8(std::string_view s);

/// Edit distance with unit insert/delete and the given substitution cost.
std::size_t edit_distance(std::u32string_view a, std::u32string_view b, std::size_t substitution_cost);

/// Case-sensitive Levenshtein similarity in [0,1]; ratio("", "") = 1.
double levenshtein_ratio(std::string_view a, std::string_view b,
                         RatioVariant variant = RatioVariant::IndelWeighted);
double levenshtein_ratio(std::u32string_view a, std::u32string_view b,
                         RatioVariant variant = RatioVariant::IndelWeighted);

/// 1 iff both pictures are present with equal fingerprints, or both are absent.
int image_match(const std::optional<ImageHash>& a, const std::optional<ImageHash>& b);
int image_match(const std::optional<GrayImage>& a, const std::optional<GrayImage>& b);

/// One account profile snapshot. Pictures are carried as their average-hash
/// fingerprints, which is all the comparison uses.
struct ProfileRecord {
    std::string user_id;
    std::string screen_name;
    std::string name;
    std::optional<ImageHash> profile_picture;
    std::optional<ImageHash> banner_picture;
};

/// Pairwise similarity vector (screen name, name, profile picture, banner).
struct ComparisonFeatures {
    double phi1 = 0.0;
    double phi2 = 0.0;
    double phi3 = 0.0;
    double phi4 = 0.0;

    std::array<double, 4> values() const { return {phi1, phi2, phi3, phi4}; }
    double norm() const;
    friend bool operator==(const ComparisonFeatures&, const ComparisonFeatures&) = default;
};

ComparisonFeatures compare_profiles(const ProfileRecord& a, const ProfileRecord& b,
                                    RatioVariant variant = RatioVariant::IndelWeighted);

/// Logistic same-user model over ComparisonFeatures.
struct MatchModel {
    double intercept = 0.0;
    std::array<double, 4> coefficients{};
    double threshold = 0.782;

    /// Coefficients fit on the labeled extremist-profile pairs: -8.05 + 2.94 phi1
    /// + 7.05 phi2 + 1.88 phi3 + 0 phi4, threshold 0.782.
    static MatchModel reference();
    void validate() const;
};

/// sigma(beta . phi + beta0): higher similarity gives higher probability.
double match_probability(const MatchModel& model, const ComparisonFeatures& phi);
/// 1 iff match_probability >= model.threshold.
int classify_pair(const MatchModel& model, const ComparisonFeatures& phi);

enum class Label { DifferentUsers = 0, SameUser = 1, Unlabeled = 2 };
enum class LabelSource { UserIdMatch, LowSimilarityRule, Manual, Model };

std::string_view to_string(Label l);
std::string_view to_string(LabelSource s);

struct PairLabel {
    Label label = Label::Unlabeled;
    std::optional<LabelSource> source;
    /// High-similarity pair from different accounts, to be reviewed by hand.
    bool manual_candidate = false;
};

inline constexpr double kLowSimilarityNorm = 0.1;
inline constexpr double kHighSimilarityNorm = 0.85;

/// Rule-based labels: shared user id -> same user; ||phi|| < 0.1 -> different
/// users; ||phi|| > 0.85 -> left unlabeled but flagged for manual review.
PairLabel auto_label(const ProfileRecord& a, const ProfileRecord& b, const ComparisonFeatures& phi);
PairLabel auto_label(const ProfileRecord& a, const ProfileRecord& b);

}  // namespace reacquire::similarity
