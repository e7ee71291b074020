#include "reacquire/formats.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include <unistd.h>

namespace reacquire::io {

namespace fs = std::filesystem;

namespace {

std::string child(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

std::string item(const std::string& path, std::size_t k) {
    return path + "[" + std::to_string(k) + "]";
}

const json& require(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.is_object()) {
        throw FormatError(path, "expected an object");
    }
    const auto it = obj.find(key);
    if (it == obj.end()) {
        throw FormatError(child(path, key), "missing field");
    }
    return *it;
}

const json* optional_field(const json& obj, const std::string& key) {
    const auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) {
        throw FormatError(path, "expected a number");
    }
    return v.get<double>();
}

std::int64_t as_integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) {
        throw FormatError(path, "expected an integer");
    }
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
        throw FormatError(path, "integer out of range");
    }
    return v.get<std::int64_t>();
}

std::uint64_t as_count(const json& v, const std::string& path) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        throw FormatError(path, "expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
}

std::uint64_t as_u64(const json& v, const std::string& path) { return as_count(v, path); }

bool as_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) {
        throw FormatError(path, "expected true or false");
    }
    return v.get<bool>();
}

/// Ids may be given as strings or as nonnegative integers.
std::string as_id(const json& v, const std::string& path) {
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_number_integer()) {
        return v.dump();
    }
    throw FormatError(path, "expected an id string");
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) {
        throw FormatError(path, "expected a string");
    }
    return v.get<std::string>();
}

const json& as_array(const json& v, const std::string& path) {
    if (!v.is_array()) {
        throw FormatError(path, "expected an array");
    }
    return v;
}

std::vector<double> as_vector(const json& v, const std::string& path) {
    std::vector<double> out;
    for (std::size_t k = 0; k < as_array(v, path).size(); ++k) {
        out.push_back(as_number(v[k], item(path, k)));
    }
    return out;
}

std::vector<std::string> as_strings(const json& v, const std::string& path) {
    std::vector<std::string> out;
    for (std::size_t k = 0; k < as_array(v, path).size(); ++k) {
        out.push_back(as_string(v[k], item(path, k)));
    }
    return out;
}

json number_or_inf(double x) {
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    return x;
}

double read_number_or_inf(const json& v, const std::string& path) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw FormatError(path, "expected a number or \"inf\"");
    }
    return as_number(v, path);
}

/// Translates library validation failures into errors tagged with a path.
template <class F>
auto at_path(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const FormatError&) {
        throw;
    } catch (const std::exception& e) {
        throw FormatError(path, e.what());
    }
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string::npos) {
            return out;
        }
        start = pos + 1;
    }
}

std::string trim(std::string s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) {
        return {};
    }
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

/// Calls f(line_number, line) for every non-blank line.
template <class F>
void for_each_line(const std::string& text, F&& f) {
    std::istringstream in(text);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        line = trim(line);
        if (!line.empty()) {
            f(n, line);
        }
    }
}

std::string line_tag(std::size_t n) { return "line " + std::to_string(n); }

json parse_line_json(const std::string& line, std::size_t n) {
    try {
        return json::parse(line);
    } catch (const json::parse_error& e) {
        throw FormatError(line_tag(n), std::string("invalid JSON: ") + e.what());
    }
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(m(r, c));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& v, const std::string& path, std::size_t cols) {
    as_array(v, path);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < v.size(); ++r) {
        const auto row = as_vector(v[r], item(path, r));
        if (row.size() != cols) {
            throw FormatError(item(path, r), "expected " + std::to_string(cols) + " values");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
        }
    }
    return m;
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> from_eigen(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        throw std::runtime_error("error reading " + path.string());
    }
    return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("error writing " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

json parse_json(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(origin, std::string("invalid JSON: ") + e.what());
    }
}

// --- search -----------------------------------------------------------------

json to_json(const search::SearchInstance& instance) {
    json friends = json::array();
    for (const auto& f : instance.friends()) {
        friends.push_back({{"id", f.id}, {"followers", f.follower_count}, {"phi", f.phi}});
    }
    return {{"friends", friends},
            {"page_size", instance.page_size()},
            {"rho0", instance.rho0()},
            {"rho_bar", instance.rho_bar()}};
}

search::SearchInstance instance_from_json(const json& j) {
    const auto& arr = as_array(require(j, "", "friends"), "friends");
    std::vector<search::FriendSpec> friends;
    for (std::size_t k = 0; k < arr.size(); ++k) {
        const auto path = item("friends", k);
        search::FriendSpec f;
        f.id = as_id(require(arr[k], path, "id"), child(path, "id"));
        f.follower_count = as_integer(require(arr[k], path, "followers"), child(path, "followers"));
        if (f.follower_count < 1) {
            throw FormatError(child(path, "followers"), "must be at least 1");
        }
        f.phi = as_number(require(arr[k], path, "phi"), child(path, "phi"));
        if (!(f.phi >= 0.0 && f.phi <= 1.0)) {
            throw FormatError(child(path, "phi"), "must lie in [0,1]");
        }
        friends.push_back(std::move(f));
    }
    const auto page = as_integer(require(j, "", "page_size"), "page_size");
    if (page < 1) {
        throw FormatError("page_size", "must be at least 1");
    }
    const double rho0 = as_number(require(j, "", "rho0"), "rho0");
    if (!(rho0 >= 0.0 && rho0 <= 1.0)) {
        throw FormatError("rho0", "must lie in [0,1]");
    }
    double rho_bar = 0.0;
    if (const auto* v = optional_field(j, "rho_bar")) {
        rho_bar = as_number(*v, "rho_bar");
        if (!(rho_bar >= 0.0 && rho_bar < 1.0)) {
            throw FormatError("rho_bar", "must lie in [0,1)");
        }
    }
    return at_path("friends", [&] { return search::SearchInstance(std::move(friends), page, rho0, rho_bar); });
}

json to_json(const search::GroundTruth& truth, const search::SearchInstance& instance) {
    std::vector<std::string> ids;
    for (auto i : truth.reconnected) {
        ids.push_back(instance.friend_at(i).id);
    }
    std::sort(ids.begin(), ids.end(), [](const auto& a, const auto& b) { return search::id_less(a, b); });
    return {{"exists", truth.exists}, {"reconnected", ids}};
}

search::GroundTruth truth_from_json(const json& j, const search::SearchInstance& instance) {
    search::GroundTruth t;
    t.exists = as_bool(require(j, "", "exists"), "exists");
    const auto& arr = as_array(require(j, "", "reconnected"), "reconnected");
    for (std::size_t k = 0; k < arr.size(); ++k) {
        const auto path = item("reconnected", k);
        const auto id = as_id(arr[k], path);
        t.reconnected.insert(at_path(path, [&] { return instance.index_of(id); }));
    }
    at_path("reconnected", [&] { t.validate(instance); return 0; });
    return t;
}

json to_json(const search::PolicyReport& report, const search::SearchInstance& instance) {
    json gammas = json::array();
    for (double g : report.gamma_trace) {
        gammas.push_back(number_or_inf(g));
    }
    return {{"name", report.name},
            {"policy", search::policy_ids(instance, report.policy)},
            {"expected_cost", number_or_inf(report.expected_cost)},
            {"gamma_trace", gammas}};
}

search::PolicyReport policy_report_from_json(const json& j, const search::SearchInstance& instance) {
    search::PolicyReport r;
    r.name = as_string(require(j, "", "name"), "name");
    std::vector<std::string> ids;
    const auto& arr = as_array(require(j, "", "policy"), "policy");
    for (std::size_t k = 0; k < arr.size(); ++k) {
        ids.push_back(as_id(arr[k], item("policy", k)));
    }
    r.policy = at_path("policy", [&] { return search::policy_from_ids(instance, ids); });
    r.expected_cost = read_number_or_inf(require(j, "", "expected_cost"), "expected_cost");
    if (const auto* g = optional_field(j, "gamma_trace")) {
        for (std::size_t k = 0; k < as_array(*g, "gamma_trace").size(); ++k) {
            r.gamma_trace.push_back(read_number_or_inf((*g)[k], item("gamma_trace", k)));
        }
    }
    return r;
}

json to_json(const search::SimReport& r) {
    return {{"runs", r.runs},
            {"mean_unsuccessful_queries", r.mean_unsuccessful_queries},
            {"std_error", r.std_error},
            {"terminations",
             {{"found", r.count(search::Termination::Found)},
              {"below_threshold", r.count(search::Termination::BelowThreshold)},
              {"exhausted", r.count(search::Termination::Exhausted)}}},
            {"seed", r.seed},
            {"rng", r.rng},
            {"cost_sum", r.cost_sum},
            {"cost_sq_sum", r.cost_sq_sum}};
}

search::SimReport sim_report_from_json(const json& j) {
    search::SimReport r;
    r.runs = as_integer(require(j, "", "runs"), "runs");
    r.mean_unsuccessful_queries =
        as_number(require(j, "", "mean_unsuccessful_queries"), "mean_unsuccessful_queries");
    r.std_error = as_number(require(j, "", "std_error"), "std_error");
    const auto& t = require(j, "", "terminations");
    const char* names[] = {"found", "below_threshold", "exhausted"};
    for (std::size_t k = 0; k < 3; ++k) {
        r.termination_counts[k] = as_integer(require(t, "terminations", names[k]), child("terminations", names[k]));
    }
    r.seed = as_u64(require(j, "", "seed"), "seed");
    r.rng = as_string(require(j, "", "rng"), "rng");
    r.cost_sum = as_u64(require(j, "", "cost_sum"), "cost_sum");
    r.cost_sq_sum = as_u64(require(j, "", "cost_sq_sum"), "cost_sq_sum");
    return r;
}

// --- models -----------------------------------------------------------------

double StoredModel::predict(std::span<const double> raw) const {
    if (raw.size() != feature_names.size()) {
        throw std::invalid_argument("model expects " + std::to_string(feature_names.size()) + " features, got " +
                                    std::to_string(raw.size()));
    }
    Eigen::MatrixXd row = Eigen::Map<const Eigen::MatrixXd>(raw.data(), 1, static_cast<Eigen::Index>(raw.size()));
    if (zscore) {
        row = zscore->apply(row);
    }
    const std::span<const double> x(row.data(), raw.size());
    return std::visit([&](const auto& m) { return learn::predict(m, x); }, model);
}

json to_json(const StoredModel& m) {
    json j = {{"format", "reacquire-model"},
              {"version", kModelFormatVersion},
              {"kind", m.kind},
              {"sign_convention", kSignConvention},
              {"feature_names", m.feature_names}};
    if (const auto* lin = std::get_if<learn::LinearModel>(&m.model)) {
        j["family"] = "linear";
        j["lambda"] = lin->lambda;
        j["intercept"] = lin->intercept;
        j["coefficients"] = from_eigen(lin->coefficients);
    } else {
        const auto& k = std::get<learn::KernelModel>(m.model);
        j["family"] = "quadratic_kernel";
        j["lambda"] = k.lambda;
        j["alphas"] = from_eigen(k.alphas);
        j["support_points"] = matrix_to_json(k.support_points);
    }
    if (m.zscore) {
        j["zscore"] = {{"mean", m.zscore->mean}, {"stddev", m.zscore->stddev}};
    }
    if (m.threshold) {
        j["threshold"] = *m.threshold;
    }
    return j;
}

StoredModel model_from_json(const json& j) {
    if (as_string(require(j, "", "format"), "format") != "reacquire-model") {
        throw FormatError("format", "not a model file");
    }
    if (as_integer(require(j, "", "version"), "version") != kModelFormatVersion) {
        throw FormatError("version", "unsupported model version");
    }
    if (as_string(require(j, "", "sign_convention"), "sign_convention") != kSignConvention) {
        throw FormatError("sign_convention", std::string("expected \"") + kSignConvention + "\"");
    }
    StoredModel m;
    m.kind = as_string(require(j, "", "kind"), "kind");
    m.feature_names = as_strings(require(j, "", "feature_names"), "feature_names");
    const auto dims = m.feature_names.size();
    const auto family = as_string(require(j, "", "family"), "family");
    const double lambda = as_number(require(j, "", "lambda"), "lambda");
    if (family == "linear") {
        learn::LinearModel lin;
        lin.lambda = lambda;
        lin.intercept = as_number(require(j, "", "intercept"), "intercept");
        const auto coef = as_vector(require(j, "", "coefficients"), "coefficients");
        if (coef.size() != dims) {
            throw FormatError("coefficients", "expected " + std::to_string(dims) + " values");
        }
        lin.coefficients = to_eigen(coef);
        m.model = std::move(lin);
    } else if (family == "quadratic_kernel") {
        learn::KernelModel k;
        k.lambda = lambda;
        k.alphas = to_eigen(as_vector(require(j, "", "alphas"), "alphas"));
        k.support_points = matrix_from_json(require(j, "", "support_points"), "support_points", dims);
        if (k.support_points.rows() != k.alphas.size()) {
            throw FormatError("alphas", "count differs from support_points");
        }
        m.model = std::move(k);
    } else {
        throw FormatError("family", "expected \"linear\" or \"quadratic_kernel\"");
    }
    if (const auto* z = optional_field(j, "zscore")) {
        featurize::ZScoreStats s;
        s.mean = as_vector(require(*z, "zscore", "mean"), "zscore.mean");
        s.stddev = as_vector(require(*z, "zscore", "stddev"), "zscore.stddev");
        if (s.mean.size() != dims || s.stddev.size() != dims) {
            throw FormatError("zscore", "expected " + std::to_string(dims) + " values per statistic");
        }
        m.zscore = std::move(s);
    }
    if (const auto* t = optional_field(j, "threshold")) {
        m.threshold = as_number(*t, "threshold");
    }
    return m;
}

similarity::MatchModel to_match_model(const StoredModel& m) {
    const auto* lin = std::get_if<learn::LinearModel>(&m.model);
    if (!lin || lin->coefficients.size() != 4) {
        throw FormatError("family", "a match model must be linear over 4 features");
    }
    if (m.zscore) {
        throw FormatError("zscore", "match models take raw similarity features");
    }
    similarity::MatchModel out;
    out.intercept = lin->intercept;
    for (int k = 0; k < 4; ++k) {
        out.coefficients[static_cast<std::size_t>(k)] = lin->coefficients[k];
    }
    if (m.threshold) {
        out.threshold = *m.threshold;
    }
    at_path("threshold", [&] { out.validate(); return 0; });
    return out;
}

StoredModel from_match_model(const similarity::MatchModel& model) {
    StoredModel m;
    m.kind = "match";
    m.feature_names = {"screen_name_ratio", "name_ratio", "profile_picture_match", "banner_match"};
    learn::LinearModel lin;
    lin.intercept = model.intercept;
    lin.coefficients = Eigen::Map<const Eigen::VectorXd>(model.coefficients.data(), 4);
    m.model = std::move(lin);
    m.threshold = model.threshold;
    return m;
}

// --- profiles, edges, accounts --------------------------------------------------

std::vector<similarity::ProfileRecord> parse_profiles(const std::string& text, const fs::path& base_dir) {
    std::vector<similarity::ProfileRecord> out;
    for_each_line(text, [&](std::size_t n, const std::string& line) {
        const auto tag = line_tag(n);
        const json j = parse_line_json(line, n);
        similarity::ProfileRecord p;
        p.user_id = as_id(require(j, tag, "user_id"), tag + ": user_id");
        p.screen_name = as_string(require(j, tag, "screen_name"), tag + ": screen_name");
        p.name = as_string(require(j, tag, "name"), tag + ": name");
        const auto picture = [&](const std::string& field) -> std::optional<similarity::ImageHash> {
            const auto* h = optional_field(j, field + "_hash");
            const auto* f = optional_field(j, field);
            if (h && f) {
                throw FormatError(tag + ": " + field, "give either a path or a hash, not both");
            }
            if (h) {
                const auto hex = as_string(*h, tag + ": " + field + "_hash");
                return at_path(tag + ": " + field + "_hash", [&] { return similarity::ImageHash::from_hex(hex); });
            }
            if (f) {
                const fs::path rel = as_string(*f, tag + ": " + field);
                const auto full = rel.is_absolute() ? rel : base_dir / rel;
                return at_path(tag + ": " + field,
                               [&] { return similarity::average_hash(similarity::read_pgm(full)); });
            }
            return std::nullopt;
        };
        p.profile_picture = picture("profile_picture");
        p.banner_picture = picture("banner_picture");
        out.push_back(std::move(p));
    });
    return out;
}

std::vector<similarity::ProfileRecord> read_profiles(const fs::path& path) {
    return parse_profiles(read_file(path), path.parent_path());
}

std::string format_profiles(const std::vector<similarity::ProfileRecord>& profiles) {
    std::string out;
    for (const auto& p : profiles) {
        json j = {{"user_id", p.user_id}, {"screen_name", p.screen_name}, {"name", p.name}};
        j["profile_picture_hash"] = p.profile_picture ? json(p.profile_picture->hex()) : json(nullptr);
        j["banner_picture_hash"] = p.banner_picture ? json(p.banner_picture->hex()) : json(nullptr);
        out += j.dump() + "\n";
    }
    return out;
}

std::vector<Edge> parse_edges(const std::string& text) {
    std::vector<Edge> out;
    bool first = true;
    for_each_line(text, [&](std::size_t n, const std::string& line) {
        const auto cells = split(line, ',');
        if (cells.size() != 2) {
            throw FormatError(line_tag(n), "expected follower_id,friend_id");
        }
        const auto a = trim(cells[0]);
        const auto b = trim(cells[1]);
        if (first && a == "follower_id" && b == "friend_id") {
            first = false;
            return;
        }
        first = false;
        if (a.empty() || b.empty()) {
            throw FormatError(line_tag(n), "empty id");
        }
        out.push_back({a, b});
    });
    return out;
}

std::string format_edges(const std::vector<Edge>& edges) {
    std::string out = "follower_id,friend_id\n";
    for (const auto& e : edges) {
        out += e.follower + "," + e.followed + "\n";
    }
    return out;
}

std::vector<AccountRecord> parse_accounts(const std::string& text) {
    std::vector<AccountRecord> out;
    for_each_line(text, [&](std::size_t n, const std::string& line) {
        const auto tag = line_tag(n);
        const json j = parse_line_json(line, n);
        AccountRecord r;
        auto& s = r.snapshot;
        s.id = as_id(require(j, tag, "id"), tag + ": id");
        const auto count = [&](const char* key, std::uint64_t& dst) {
            if (const auto* v = optional_field(j, key)) dst = as_count(*v, tag + ": " + key);
        };
        const auto flag = [&](const char* key, bool& dst) {
            if (const auto* v = optional_field(j, key)) dst = as_bool(*v, tag + ": " + key);
        };
        if (const auto* v = optional_field(j, "created_at")) s.created_at = as_integer(*v, tag + ": created_at");
        count("friends_count", s.friends_count);
        count("followers_count", s.followers_count);
        count("tweet_count", s.tweet_count);
        count("favorites_count", s.favorites_count);
        count("retweet_count", s.retweet_count);
        flag("geo_enabled", s.geo_enabled);
        flag("protected", s.protected_account);
        flag("verified", s.verified);
        flag("active", r.active);
        if (const auto* v = optional_field(j, "language")) s.language = as_string(*v, tag + ": language");
        out.push_back(std::move(r));
    });
    return out;
}

std::string format_accounts(const std::vector<AccountRecord>& accounts) {
    std::string out;
    for (const auto& r : accounts) {
        const auto& s = r.snapshot;
        const json j = {{"id", s.id},
                        {"created_at", s.created_at},
                        {"friends_count", s.friends_count},
                        {"followers_count", s.followers_count},
                        {"tweet_count", s.tweet_count},
                        {"favorites_count", s.favorites_count},
                        {"retweet_count", s.retweet_count},
                        {"geo_enabled", s.geo_enabled},
                        {"protected", s.protected_account},
                        {"verified", s.verified},
                        {"language", s.language},
                        {"active", r.active}};
        out += j.dump() + "\n";
    }
    return out;
}

std::vector<InteractionRecord> parse_interactions(const std::string& text) {
    std::vector<InteractionRecord> out;
    bool first = true;
    for_each_line(text, [&](std::size_t n, const std::string& line) {
        const auto cells = split(line, ',');
        if (first) {
            first = false;
            if (cells.size() == 5 && trim(cells[0]) == "user0_id") {
                return;
            }
        }
        if (cells.size() != 5) {
            throw FormatError(line_tag(n), "expected user0_id,friend_id,mentions,retweets,replies");
        }
        InteractionRecord r{trim(cells[0]), trim(cells[1]), {}};
        std::uint64_t* dst[] = {&r.counts.mentions, &r.counts.retweets, &r.counts.replies};
        for (std::size_t k = 0; k < 3; ++k) {
            const auto cell = trim(cells[k + 2]);
            std::size_t used = 0;
            try {
                if (cell.empty() || cell[0] == '-') throw std::invalid_argument("");
                *dst[k] = std::stoull(cell, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != cell.size() || cell.empty()) {
                throw FormatError(line_tag(n), "not a nonnegative integer: '" + cell + "'");
            }
        }
        out.push_back(std::move(r));
    });
    return out;
}

}  // namespace reacquire::io
