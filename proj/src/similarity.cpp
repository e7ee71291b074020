#include "reacquire/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace reacquire::similarity {

std::u32string decode_utf8(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    while (i < s.size()) {
        const unsigned char b0 = byte(i);
        std::size_t len = 0;
        char32_t cp = 0;
        char32_t min = 0;
        if (b0 < 0x80) {
            len = 1;
            cp = b0;
        } else if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            cp = b0 & 0x1F;
            min = 0x80;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            cp = b0 & 0x0F;
            min = 0x800;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            cp = b0 & 0x07;
            min = 0x10000;
        }
        bool ok = len > 0 && i + len <= s.size();
        for (std::size_t k = 1; ok && k < len; ++k) {
            ok = (byte(i + k) & 0xC0) == 0x80;
            cp = (cp << 6) | (byte(i + k) & 0x3F);
        }
        ok = ok && cp >= min && cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF);
        if (ok) {
            out.push_back(cp);
            i += len;
        } else {
            out.push_back(0xDC00 + b0);
            ++i;
        }
    }
    return out;
}

std::size_t edit_distance(std::u32string_view a, std::u32string_view b, std::size_t substitution_cost) {
    if (a.size() < b.size()) {
        std::swap(a, b);
    }
    // Two rows over the shorter string.
    std::vector<std::size_t> prev(b.size() + 1);
    std::vector<std::size_t> cur(b.size() + 1);
    std::iota(prev.begin(), prev.end(), std::size_t{0});
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const auto sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : substitution_cost);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double levenshtein_ratio(std::string_view a, std::string_view b, RatioVariant variant) {
    return levenshtein_ratio(decode_utf8(a), decode_utf8(b), variant);
}

double levenshtein_ratio(std::u32string_view x, std::u32string_view y, RatioVariant variant) {
    if (x.empty() && y.empty()) {
        return 1.0;
    }
    if (variant == RatioVariant::IndelWeighted) {
        const auto total = static_cast<double>(x.size() + y.size());
        return (total - static_cast<double>(edit_distance(x, y, 2))) / total;
    }
    const auto longest = static_cast<double>(std::max(x.size(), y.size()));
    return 1.0 - static_cast<double>(edit_distance(x, y, 1)) / longest;
}

int image_match(const std::optional<ImageHash>& a, const std::optional<ImageHash>& b) {
    if (a.has_value() != b.has_value()) {
        return 0;
    }
    return !a || *a == *b ? 1 : 0;
}

int image_match(const std::optional<GrayImage>& a, const std::optional<GrayImage>& b) {
    const auto hash = [](const std::optional<GrayImage>& img) -> std::optional<ImageHash> {
        if (!img) {
            return std::nullopt;
        }
        return average_hash(*img);
    };
    return image_match(hash(a), hash(b));
}

double ComparisonFeatures::norm() const {
    return std::sqrt(phi1 * phi1 + phi2 * phi2 + phi3 * phi3 + phi4 * phi4);
}

ComparisonFeatures compare_profiles(const ProfileRecord& a, const ProfileRecord& b, RatioVariant variant) {
    return ComparisonFeatures{
        levenshtein_ratio(a.screen_name, b.screen_name, variant),
        levenshtein_ratio(a.name, b.name, variant),
        static_cast<double>(image_match(a.profile_picture, b.profile_picture)),
        static_cast<double>(image_match(a.banner_picture, b.banner_picture)),
    };
}

MatchModel MatchModel::reference() {
    return MatchModel{-8.05, {2.94, 7.05, 1.88, 0.0}, 0.782};
}

void MatchModel::validate() const {
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw std::invalid_argument("match threshold must lie in (0,1)");
    }
}

double match_probability(const MatchModel& model, const ComparisonFeatures& phi) {
    const auto v = phi.values();
    double score = model.intercept;
    for (std::size_t k = 0; k < v.size(); ++k) {
        score += model.coefficients[k] * v[k];
    }
    return 1.0 / (1.0 + std::exp(-score));
}

int classify_pair(const MatchModel& model, const ComparisonFeatures& phi) {
    return match_probability(model, phi) >= model.threshold ? 1 : 0;
}

std::string_view to_string(Label l) {
    switch (l) {
        case Label::DifferentUsers: return "0";
        case Label::SameUser: return "1";
        case Label::Unlabeled: return "unlabeled";
    }
    return "?";
}

std::string_view to_string(LabelSource s) {
    switch (s) {
        case LabelSource::UserIdMatch: return "user_id_match";
        case LabelSource::LowSimilarityRule: return "low_similarity_rule";
        case LabelSource::Manual: return "manual";
        case LabelSource::Model: return "model";
    }
    return "?";
}

PairLabel auto_label(const ProfileRecord& a, const ProfileRecord& b, const ComparisonFeatures& phi) {
    PairLabel out;
    if (a.user_id == b.user_id) {
        out.label = Label::SameUser;
        out.source = LabelSource::UserIdMatch;
        return out;
    }
    const double n = phi.norm();
    if (n < kLowSimilarityNorm) {
        out.label = Label::DifferentUsers;
        out.source = LabelSource::LowSimilarityRule;
    } else if (n > kHighSimilarityNorm) {
        out.manual_candidate = true;
    }
    return out;
}

PairLabel auto_label(const ProfileRecord& a, const ProfileRecord& b) {
    return auto_label(a, b, compare_profiles(a, b));
}

}  // namespace reacquire::similarity
