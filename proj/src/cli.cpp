#include "reacquire/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "reacquire/cluster_graph.hpp"
#include "reacquire/featurize.hpp"
#include "reacquire/formats.hpp"
#include "reacquire/learn.hpp"
#include "reacquire/rng.hpp"
#include "reacquire/search_policy.hpp"
#include "reacquire/search_sim.hpp"

namespace reacquire::cli {

namespace {

namespace fs = std::filesystem;
using io::json;

/// The command understood its input but declines to act on it.
class Refusal : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::uint64_t seed = 0;
    std::string workspace = ".";
    std::string format = "table";

    bool delimited() const { return format == "delimited"; }

    fs::path resolve(const std::string& p) const {
        const fs::path q(p);
        return q.is_absolute() ? q : fs::path(workspace) / q;
    }
};

std::string shortest(double x) {
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

std::string fixed(double x, int digits = 4) {
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

/// Fixed-width text or comma-separated rows.
class Table {
public:
    explicit Table(std::vector<std::string> headers) : headers_(std::move(headers)) {}

    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
    bool empty() const { return rows_.empty(); }

    void print(std::ostream& out, bool delimited) const {
        if (delimited) {
            print_row(out, headers_);
            for (const auto& r : rows_) {
                print_row(out, r);
            }
            return;
        }
        std::vector<std::size_t> width(headers_.size());
        for (std::size_t c = 0; c < headers_.size(); ++c) {
            width[c] = headers_[c].size();
            for (const auto& r : rows_) {
                width[c] = std::max(width[c], r[c].size());
            }
        }
        const auto line = [&](const std::vector<std::string>& r) {
            std::string s;
            for (std::size_t c = 0; c < r.size(); ++c) {
                const auto pad = std::string(width[c] - r[c].size(), ' ');
                s += c == 0 ? r[c] + pad : "  " + pad + r[c];
            }
            while (!s.empty() && s.back() == ' ') {
                s.pop_back();
            }
            out << s << '\n';
        };
        line(headers_);
        std::size_t total = 0;
        for (auto w : width) {
            total += w;
        }
        out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
        for (const auto& r : rows_) {
            line(r);
        }
    }

private:
    static void print_row(std::ostream& out, const std::vector<std::string>& r) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            out << (c ? "," : "") << csv_cell(r[c]);
        }
        out << '\n';
    }

    static std::string csv_cell(const std::string& s) {
        if (s.find_first_of(",\"\n\r") == std::string::npos) {
            return s;
        }
        std::string q = "\"";
        for (char ch : s) {
            q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        }
        return q + "\"";
    }

    std::vector<std::string> headers_;
    std::vector<std::vector<std::string>> rows_;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(' ');
        const auto e = item.find_last_not_of(' ');
        if (b != std::string::npos) {
            out.push_back(item.substr(b, e - b + 1));
        }
    }
    return out;
}

std::vector<double> number_list(const std::string& s, const std::string& flag) {
    std::vector<double> out;
    for (const auto& item : split_list(s)) {
        double v = 0.0;
        const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
        if (res.ec != std::errc{} || res.ptr != item.data() + item.size()) {
            throw std::invalid_argument(flag + ": not a number: '" + item + "'");
        }
        out.push_back(v);
    }
    return out;
}

json load_json(const fs::path& path) { return io::parse_json(io::read_file(path), path.string()); }

void write_json(const fs::path& path, const json& j) { io::write_file_atomic(path, j.dump(2) + "\n"); }

/// Fisher-Yates driven by the command seed.
template <class T>
void seeded_shuffle(std::vector<T>& v, std::uint64_t seed) {
    SplitMix64 rng(SplitMix64::mix(seed));
    for (std::size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[rng.below(i)]);
    }
}

// --- match / sweep ----------------------------------------------------------

struct MatchArgs {
    std::string profiles;
    std::string model;
    std::optional<double> threshold;
    bool blocking = false;
    unsigned threads = 0;
    std::string report;
};

similarity::MatchModel load_match_model(const Globals& g, const MatchArgs& a) {
    auto model = a.model.empty() ? similarity::MatchModel::reference()
                                 : io::to_match_model(io::model_from_json(load_json(g.resolve(a.model))));
    if (a.threshold) {
        model.threshold = *a.threshold;
    }
    model.validate();
    return model;
}

int cmd_match(const Globals& g, const MatchArgs& a, std::ostream& out) {
    const auto profiles = io::read_profiles(g.resolve(a.profiles));
    const auto model = load_match_model(g, a);
    similarity::PairScoringOptions po;
    po.blocking = a.blocking;
    po.threads = a.threads;
    const auto pairs = similarity::score_pairs(profiles, model, po);
    const auto graph = similarity::graph_from_pairs(profiles.size(), pairs, model.threshold);

    std::map<std::pair<std::size_t, std::size_t>, double> prob;
    for (const auto& p : pairs) {
        prob[{p.a, p.b}] = p.probability;
    }
    const auto num = [&](double x) { return g.delimited() ? shortest(x) : fixed(x); };

    Table edges({"a", "a_screen_name", "b", "b_screen_name", "probability"});
    for (const auto& [x, y] : graph.edges) {
        edges.add({std::to_string(x), profiles[x].screen_name, std::to_string(y), profiles[y].screen_name,
                   num(prob.at({x, y}))});
    }
    Table comps({"component", "index", "user_id", "screen_name"});
    std::size_t cid = 0;
    json comp_json = json::array();
    for (const auto& c : graph.components) {
        if (c.size() < 2) {
            continue;
        }
        for (auto v : c) {
            comps.add({std::to_string(cid), std::to_string(v), profiles[v].user_id, profiles[v].screen_name});
        }
        comp_json.push_back(c);
        ++cid;
    }
    if (!g.delimited()) {
        out << "profiles: " << profiles.size() << "  pairs scored: " << pairs.size()
            << "  threshold: " << shortest(model.threshold) << "  edges: " << graph.edges.size()
            << "  components (size >= 2): " << cid << "\n\n";
    }
    edges.print(out, g.delimited());
    out << '\n';
    comps.print(out, g.delimited());

    if (!a.report.empty()) {
        json e = json::array();
        for (const auto& [x, y] : graph.edges) {
            e.push_back({{"a", x}, {"b", y}, {"probability", prob.at({x, y})}});
        }
        write_json(g.resolve(a.report), {{"profiles", profiles.size()},
                                         {"pairs_scored", pairs.size()},
                                         {"threshold", model.threshold},
                                         {"edges", e},
                                         {"components", comp_json}});
    }
    return 0;
}

struct SweepArgs {
    MatchArgs match;
    std::string grid;
    std::string out;
};

int cmd_sweep(const Globals& g, const SweepArgs& a, std::ostream& out) {
    const auto profiles = io::read_profiles(g.resolve(a.match.profiles));
    const auto model = load_match_model(g, a.match);
    std::vector<double> grid;
    if (a.grid.empty()) {
        for (int k = 0; k <= 20; ++k) {
            grid.push_back(k / 20.0);
        }
    } else {
        grid = number_list(a.grid, "--grid");
    }
    for (double p : grid) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::invalid_argument("--grid: thresholds must lie in [0,1]");
        }
    }
    similarity::PairScoringOptions po;
    po.blocking = a.match.blocking;
    po.threads = a.match.threads;
    const auto pairs = similarity::score_pairs(profiles, model, po);
    const auto rows = similarity::sweep_from_pairs(profiles.size(), pairs, grid);

    const auto build = [&](bool exact) {
        Table t({"threshold", "edges", "connected_accounts", "giant_component", "average_clustering"});
        for (const auto& r : rows) {
            t.add({exact ? shortest(r.threshold) : fixed(r.threshold, 3), std::to_string(r.edge_count),
                   std::to_string(r.connected_account_count), std::to_string(r.giant_component_size),
                   exact ? shortest(r.average_clustering) : fixed(r.average_clustering)});
        }
        return t;
    };
    build(g.delimited()).print(out, g.delimited());
    if (!a.out.empty()) {
        std::ostringstream csv;
        build(true).print(csv, true);
        io::write_file_atomic(g.resolve(a.out), csv.str());
    }
    return 0;
}

// --- train ------------------------------------------------------------------

struct TrainArgs {
    std::string kind;
    std::string data;
    std::string lambdas;
    std::string split = "0.5,0.25,0.25";
    bool group_split = false;
    std::string family;
    std::string out;
    std::string roc;
    int max_sweeps = 100000;
};

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
};

Split make_split(std::size_t n, const std::array<double, 3>& ratio, const std::vector<std::string>* groups,
                 std::uint64_t seed) {
    Split s;
    const double cut1 = ratio[0] * static_cast<double>(n);
    const double cut2 = (ratio[0] + ratio[1]) * static_cast<double>(n);
    if (groups) {
        std::vector<std::string> ids(groups->begin(), groups->end());
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        seeded_shuffle(ids, seed);
        std::map<std::string, std::vector<std::size_t>> members;
        for (std::size_t r = 0; r < n; ++r) {
            members[(*groups)[r]].push_back(r);
        }
        std::size_t assigned = 0;
        for (const auto& id : ids) {
            auto& dst = static_cast<double>(assigned) < cut1   ? s.train
                        : static_cast<double>(assigned) < cut2 ? s.validation
                                                               : s.test;
            const auto& m = members[id];
            dst.insert(dst.end(), m.begin(), m.end());
            assigned += m.size();
        }
    } else {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        seeded_shuffle(order, seed);
        const auto n1 = static_cast<std::size_t>(std::llround(cut1));
        const auto n2 = std::max(n1, static_cast<std::size_t>(std::llround(cut2)));
        s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(n1, n)));
        s.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(std::min(n1, n)),
                            order.begin() + static_cast<std::ptrdiff_t>(std::min(n2, n)));
        s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(std::min(n2, n)), order.end());
    }
    for (auto* v : {&s.train, &s.validation, &s.test}) {
        std::sort(v->begin(), v->end());
    }
    return s;
}

bool both_classes(const learn::Dataset& d) {
    const auto pos = std::count(d.labels.begin(), d.labels.end(), 1);
    return pos > 0 && pos < static_cast<std::ptrdiff_t>(d.labels.size());
}

void require_classes(const learn::Dataset& d, const std::string& split) {
    if (!both_classes(d)) {
        const auto pos = std::count(d.labels.begin(), d.labels.end(), 1);
        throw Refusal("the " + split + " split has " + std::to_string(d.labels.size()) + " rows with " +
                      std::to_string(pos) + " positive; both classes are required. Try another --seed, "
                      "larger --split fractions, or more labeled data.");
    }
}

std::vector<double> model_scores(const io::StoredModel& m, const Eigen::MatrixXd& normalized) {
    return std::visit([&](const auto& model) { return learn::predict_all(model, normalized); }, m.model);
}

int cmd_train(const Globals& g, const TrainArgs& a, std::ostream& out) {
    const auto data_path = g.resolve(a.data);
    std::ifstream in(data_path);
    if (!in) {
        throw std::runtime_error("cannot open " + data_path.string());
    }
    auto table = featurize::read_table(in);

    std::optional<std::size_t> label_col;
    std::optional<std::size_t> group_col;
    std::vector<std::size_t> feature_cols;
    std::vector<std::string> names;
    for (std::size_t c = 0; c < table.names.size(); ++c) {
        if (table.names[c] == "label") {
            label_col = c;
        } else if (table.names[c] == "group") {
            group_col = c;
        } else {
            feature_cols.push_back(c);
            names.push_back(table.names[c]);
        }
    }
    if (!label_col) {
        throw io::FormatError(data_path.string(), "no 'label' column");
    }
    if (a.group_split && !group_col) {
        throw io::FormatError(data_path.string(), "--group-split needs a 'group' column");
    }
    if (feature_cols.empty()) {
        throw io::FormatError(data_path.string(), "no feature columns");
    }

    const auto n = static_cast<std::size_t>(table.values.rows());
    learn::Dataset all;
    all.feature_names = names;
    all.features.resize(table.values.rows(), static_cast<Eigen::Index>(feature_cols.size()));
    std::vector<std::string> groups;
    for (std::size_t r = 0; r < n; ++r) {
        const auto ri = static_cast<Eigen::Index>(r);
        for (std::size_t k = 0; k < feature_cols.size(); ++k) {
            all.features(ri, static_cast<Eigen::Index>(k)) = table.values(ri, static_cast<Eigen::Index>(feature_cols[k]));
        }
        try {
            all.labels.push_back(learn::to_signed_label(table.values(ri, static_cast<Eigen::Index>(*label_col))));
        } catch (const std::invalid_argument& e) {
            throw io::FormatError(data_path.string() + ": row " + std::to_string(r + 1), e.what());
        }
        if (group_col) {
            groups.push_back(shortest(table.values(ri, static_cast<Eigen::Index>(*group_col))));
        }
    }

    const auto ratios = number_list(a.split, "--split");
    if (ratios.size() != 3 || std::any_of(ratios.begin(), ratios.end(), [](double r) { return !(r >= 0.0); }) ||
        std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) {
        throw std::invalid_argument("--split: expected three nonnegative fractions summing to 1");
    }
    const auto split = make_split(n, {ratios[0], ratios[1], ratios[2]}, a.group_split ? &groups : nullptr, g.seed);
    auto train = all.subset(split.train);
    auto validation = all.subset(split.validation);
    auto test = all.subset(split.test);

    std::vector<double> grid;
    const bool kernel = a.family.empty() ? a.kind == "refollow" : a.family == "kernel";
    if (a.lambdas.empty()) {
        grid = kernel ? std::vector<double>{1e-5, 1e-3, 1e-1, 10.0} : std::vector<double>{0.1, 1.0, 10.0, 100.0};
    } else {
        grid = number_list(a.lambdas, "--lambda");
    }
    if (grid.empty() || std::any_of(grid.begin(), grid.end(), [](double l) { return !(l >= 0.0); })) {
        throw std::invalid_argument("--lambda: expected nonnegative values");
    }

    require_classes(train, "training");
    if (grid.size() > 1) {
        require_classes(validation, "validation");
    }
    require_classes(test, "test");

    io::StoredModel stored;
    stored.kind = a.kind;
    stored.feature_names = names;
    if (a.kind != "match") {
        stored.zscore = featurize::ZScoreStats::fit(train.features);
        train.features = stored.zscore->apply(train.features);
        validation.features = stored.zscore->apply(validation.features);
        test.features = stored.zscore->apply(test.features);
    }

    Table grid_table({"lambda", "validation_auc", kernel ? "iterations" : "nonzero", "converged"});
    std::optional<io::StoredModel> best;
    double best_auc = -1.0;
    for (double lambda : grid) {
        io::StoredModel candidate = stored;
        std::string detail;
        bool converged = false;
        if (kernel) {
            auto fit = learn::fit_kernel_logistic(train, lambda);
            detail = std::to_string(fit.iterations);
            converged = fit.converged;
            candidate.model = std::move(fit.model);
        } else {
            learn::L1Options opt;
            opt.max_sweeps = a.max_sweeps;
            auto fit = learn::fit_l1_logistic(train, lambda, opt);
            detail = std::to_string(fit.model.nonzero_count());
            converged = fit.converged;
            candidate.model = std::move(fit.model);
        }
        double auc = std::numeric_limits<double>::quiet_NaN();
        if (both_classes(validation)) {
            auc = learn::roc_auc(model_scores(candidate, validation.features), validation.labels).auc;
        }
        grid_table.add({shortest(lambda), std::isnan(auc) ? "n/a" : (g.delimited() ? shortest(auc) : fixed(auc)),
                        detail, converged ? "yes" : "no"});
        if (!best || auc > best_auc) {
            best = std::move(candidate);
            best_auc = std::isnan(auc) ? -1.0 : auc;
        }
    }

    const auto roc = learn::roc_auc(model_scores(*best, test.features), test.labels);
    const double chosen = std::visit([](const auto& m) { return m.lambda; }, best->model);
    const auto model_path = g.resolve(a.out.empty() ? "models/" + a.kind + ".json" : a.out);
    const auto roc_path = g.resolve(a.roc.empty() ? "reports/" + a.kind + "_roc.csv" : a.roc);
    write_json(model_path, io::to_json(*best));
    {
        Table rt({"threshold", "false_positive_rate", "true_positive_rate"});
        for (const auto& p : roc.points) {
            rt.add({shortest(p.threshold), shortest(p.false_positive_rate), shortest(p.true_positive_rate)});
        }
        std::ostringstream csv;
        rt.print(csv, true);
        io::write_file_atomic(roc_path, csv.str());
    }

    grid_table.print(out, g.delimited());
    out << '\n';
    Table summary({"metric", "value"});
    summary.add({"family", kernel ? "quadratic_kernel" : "linear"});
    summary.add({"chosen_lambda", shortest(chosen)});
    summary.add({"train_rows", std::to_string(train.labels.size())});
    summary.add({"validation_rows", std::to_string(validation.labels.size())});
    summary.add({"test_rows", std::to_string(test.labels.size())});
    summary.add({"test_auc", g.delimited() ? shortest(roc.auc) : fixed(roc.auc)});
    summary.add({"model", model_path.string()});
    summary.add({"roc", roc_path.string()});
    summary.print(out, g.delimited());
    return 0;
}

// --- instance -----------------------------------------------------------------

struct InstanceArgs {
    std::string user;
    std::string edges;
    std::string accounts;
    std::string model;
    std::string interactions;
    double rho0 = 1.0;
    double rho_bar = 0.0;
    std::int64_t page_size = 5000;
    std::string out;
};

int cmd_instance(const Globals& g, const InstanceArgs& a, std::ostream& out) {
    std::map<std::string, io::AccountRecord> accounts;
    for (auto& r : io::parse_accounts(io::read_file(g.resolve(a.accounts)))) {
        const auto id = r.snapshot.id;
        if (!accounts.emplace(id, std::move(r)).second) {
            throw io::FormatError(a.accounts, "duplicate account id " + id);
        }
    }
    const auto edges = io::parse_edges(io::read_file(g.resolve(a.edges)));
    const auto model = io::model_from_json(load_json(g.resolve(a.model)));
    if (model.feature_names != featurize::refollow_feature_names()) {
        throw io::FormatError("feature_names", "model was not trained on refollow features");
    }
    std::map<std::string, featurize::Interactions> interactions;
    if (!a.interactions.empty()) {
        for (const auto& r : io::parse_interactions(io::read_file(g.resolve(a.interactions)))) {
            if (r.user0 == a.user) {
                interactions[r.friend_id] = r.counts;
            }
        }
    }

    const auto user = accounts.find(a.user);
    if (user == accounts.end()) {
        throw Refusal("user " + a.user + " is not in the accounts file");
    }
    std::vector<std::string> former;
    std::set<std::string> followed_user;
    for (const auto& e : edges) {
        if (e.follower == a.user) {
            former.push_back(e.followed);
        }
        if (e.followed == a.user) {
            followed_user.insert(e.follower);
        }
    }
    std::sort(former.begin(), former.end(), [](const auto& x, const auto& y) { return search::id_less(x, y); });
    former.erase(std::unique(former.begin(), former.end()), former.end());

    featurize::RefollowRow base;
    base.user0 = user->second.snapshot;
    for (const auto& id : former) {
        if (const auto it = accounts.find(id); it != accounts.end()) {
            base.user0_friends.push_back(it->second.snapshot);
        }
    }

    std::map<std::string, std::size_t> excluded;
    std::vector<search::FriendSpec> friends;
    for (const auto& id : former) {
        const auto it = accounts.find(id);
        const char* reason = it == accounts.end()                       ? "unknown"
                             : !it->second.active                       ? "inactive"
                             : it->second.snapshot.protected_account    ? "private"
                             : it->second.snapshot.followers_count == 0 ? "no_followers"
                                                                        : nullptr;
        if (reason) {
            ++excluded[reason];
            continue;
        }
        auto row = base;
        row.friend_account = it->second.snapshot;
        row.friend_followed_user0 = followed_user.contains(id);
        if (const auto ix = interactions.find(id); ix != interactions.end()) {
            row.interactions = ix->second;
        }
        const double phi = model.predict(featurize::refollow_features(row));
        friends.push_back({id, static_cast<std::int64_t>(it->second.snapshot.followers_count), phi});
    }
    if (friends.empty()) {
        std::string why;
        for (const auto& [k, v] : excluded) {
            why += (why.empty() ? "" : ", ") + std::to_string(v) + " " + k;
        }
        throw Refusal("user " + a.user + " has no eligible former friends (" + std::to_string(former.size()) +
                      " former friends" + (why.empty() ? "" : "; excluded: " + why) + ")");
    }
    const search::SearchInstance inst(std::move(friends), a.page_size, a.rho0, a.rho_bar);
    const auto path = g.resolve(a.out.empty() ? "instances/" + a.user + ".json" : a.out);
    write_json(path, io::to_json(inst));

    Table t({"friend", "followers", "queries", "phi"});
    for (std::size_t i = 0; i < inst.size(); ++i) {
        const auto& f = inst.friend_at(i);
        t.add({f.id, std::to_string(f.follower_count), std::to_string(inst.query_count(i)),
               g.delimited() ? shortest(f.phi) : fixed(f.phi)});
    }
    t.print(out, g.delimited());
    if (!g.delimited()) {
        out << "\nfriends: " << inst.size() << "  total queries: " << inst.total_queries();
        for (const auto& [k, v] : excluded) {
            out << "  " << k << ": " << v;
        }
        out << "\nwrote " << path.string() << '\n';
    }
    return 0;
}

// --- search / simulate --------------------------------------------------------

struct SearchArgs {
    std::string instance;
    std::string policies = "optimal,greedy,min_n,max_p,random";
    std::string truth;
    std::int64_t runs = 0;
    std::int64_t random_count = 500;
    std::string order;
    bool show_policy = false;
    unsigned threads = 0;
    std::string report;
};

struct LoadedInstance {
    search::SearchInstance instance;
    std::optional<search::GroundTruth> truth;
};

LoadedInstance load_instance(const Globals& g, const std::string& instance_path, const std::string& truth_path) {
    const auto ip = g.resolve(instance_path);
    auto inst = [&] {
        try {
            return io::instance_from_json(load_json(ip));
        } catch (const io::FormatError& e) {
            throw io::FormatError(ip.string() + ": " + e.where(), e.what());
        }
    }();
    std::optional<search::GroundTruth> truth;
    if (!truth_path.empty()) {
        truth = io::truth_from_json(load_json(g.resolve(truth_path)), inst);
    }
    return {std::move(inst), std::move(truth)};
}

search::SimReport run_sim(const LoadedInstance& li, const search::Policy& p, std::int64_t runs, std::uint64_t seed,
                          unsigned threads) {
    search::SimOptions opt;
    opt.threads = threads;
    return li.truth ? search::simulate_given_truth(li.instance, p, *li.truth, runs, seed, opt)
                    : search::simulate(li.instance, p, runs, seed, opt);
}

/// Seed of the k-th random policy drawn by a command.
std::uint64_t random_policy_seed(std::uint64_t seed, std::int64_t k) {
    return SplitMix64::stream(seed, static_cast<std::uint64_t>(k)).next();
}

int cmd_search(const Globals& g, const SearchArgs& a, std::ostream& out) {
    const auto li = load_instance(g, a.instance, a.truth);
    const auto& inst = li.instance;
    if (a.runs < 0) {
        throw std::invalid_argument("--runs must be nonnegative");
    }
    if (a.random_count < 1) {
        throw std::invalid_argument("--random-count must be at least 1");
    }
    auto names = split_list(a.policies);
    for (const auto& n : names) {
        if (n != "optimal" && n != "greedy" && n != "min_n" && n != "max_p" && n != "random") {
            throw std::invalid_argument("--policies: unknown policy '" + n + "'");
        }
    }

    struct Row {
        std::string name;
        std::optional<search::Policy> policy;
        double expected = 0.0;
        std::optional<double> actual;
        std::optional<search::SimReport> sim;
    };
    std::vector<Row> rows;
    const auto fill = [&](Row& r, const search::Policy& p) {
        r.policy = p;
        r.expected = search::expected_cost(inst, p);
        if (li.truth) {
            r.actual = search::actual_cost(inst, p, *li.truth);
        }
        if (a.runs > 0) {
            r.sim = run_sim(li, p, a.runs, g.seed, a.threads);
        }
    };
    for (const auto& n : names) {
        Row r{n, {}, 0.0, {}, {}};
        if (n != "random") {
            fill(r, search::make_policy(inst, n, g.seed).policy);
        } else {
            // Expected and actual costs average over the drawn policies; the
            // simulation spreads its runs evenly across them.
            double expected = 0.0;
            double actual = 0.0;
            std::vector<search::SimReport> parts;
            for (std::int64_t k = 0; k < a.random_count; ++k) {
                const auto p = search::random_policy(inst, random_policy_seed(g.seed, k)).policy;
                expected += search::expected_cost(inst, p);
                if (li.truth) {
                    actual += search::actual_cost(inst, p, *li.truth);
                }
                const auto share = a.runs / a.random_count + (k < a.runs % a.random_count ? 1 : 0);
                if (share > 0) {
                    parts.push_back(run_sim(li, p, share, random_policy_seed(g.seed, k), a.threads));
                }
            }
            const auto count = static_cast<double>(a.random_count);
            r.expected = expected / count;
            if (li.truth) {
                r.actual = actual / count;
            }
            if (a.runs > 0) {
                r.sim = search::merge_reports(parts);
                r.sim->seed = g.seed;
            }
        }
        rows.push_back(std::move(r));
    }
    if (!a.order.empty()) {
        Row r{"forced", {}, 0.0, {}, {}};
        const auto p = search::policy_from_ids(inst, split_list(a.order));
        if (!search::is_valid(inst, p)) {
            throw std::invalid_argument("--order: each friend must appear exactly ceil(N_i/N_M) times");
        }
        fill(r, p);
        rows.push_back(std::move(r));
    }

    const auto num = [&](double x) { return g.delimited() ? shortest(x) : fixed(x); };
    std::vector<std::string> headers{"policy", "expected"};
    if (li.truth) headers.push_back("actual");
    if (a.runs > 0) {
        headers.push_back("simulated");
        headers.push_back("std_error");
    }
    if (a.show_policy) headers.push_back("order");
    Table t(headers);
    json report = json::array();
    for (const auto& r : rows) {
        std::vector<std::string> cells{r.name, num(r.expected)};
        json jr = {{"name", r.name}, {"expected_cost", r.expected}};
        if (r.actual) {
            cells.push_back(num(*r.actual));
            jr["actual_cost"] = *r.actual;
        }
        if (r.sim) {
            cells.push_back(num(r.sim->mean_unsuccessful_queries));
            cells.push_back(num(r.sim->std_error));
            jr["simulation"] = io::to_json(*r.sim);
        }
        const bool single = r.name != "random";
        if (single) {
            jr["policy"] = search::policy_ids(inst, *r.policy);
        }
        if (a.show_policy) {
            std::string seq;
            if (single) {
                for (const auto& id : search::policy_ids(inst, *r.policy)) {
                    seq += (seq.empty() ? "" : " ") + id;
                }
            } else {
                seq = "(" + std::to_string(a.random_count) + " policies)";
            }
            cells.push_back(seq);
        }
        t.add(std::move(cells));
        report.push_back(std::move(jr));
    }
    t.print(out, g.delimited());
    if (!a.report.empty()) {
        write_json(g.resolve(a.report), {{"instance", a.instance},
                                         {"seed", g.seed},
                                         {"random_count", a.random_count},
                                         {"runs", a.runs},
                                         {"policies", report}});
    }
    return 0;
}

struct SimulateArgs {
    std::string instance;
    std::string policy = "optimal";
    std::string order;
    std::string truth;
    std::int64_t runs = 10000;
    unsigned threads = 0;
    std::string out;
};

int cmd_simulate(const Globals& g, const SimulateArgs& a, std::ostream& out) {
    const auto li = load_instance(g, a.instance, a.truth);
    if (a.runs < 1) {
        throw std::invalid_argument("--runs must be at least 1");
    }
    search::Policy p;
    std::string name = a.policy;
    if (!a.order.empty()) {
        p = search::policy_from_ids(li.instance, split_list(a.order));
        if (!search::is_valid(li.instance, p)) {
            throw std::invalid_argument("--order: each friend must appear exactly ceil(N_i/N_M) times");
        }
        name = "forced";
    } else {
        p = search::make_policy(li.instance, a.policy, random_policy_seed(g.seed, 0)).policy;
    }
    const auto rep = run_sim(li, p, a.runs, g.seed, a.threads);
    const auto num = [&](double x) { return g.delimited() ? shortest(x) : fixed(x); };
    Table t({"policy", "runs", "mean", "std_error", "found", "below_threshold", "exhausted"});
    t.add({name, std::to_string(rep.runs), num(rep.mean_unsuccessful_queries), num(rep.std_error),
           std::to_string(rep.count(search::Termination::Found)),
           std::to_string(rep.count(search::Termination::BelowThreshold)),
           std::to_string(rep.count(search::Termination::Exhausted))});
    t.print(out, g.delimited());
    if (!a.out.empty()) {
        write_json(g.resolve(a.out), io::to_json(rep));
    }
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Locate the new accounts of suspended users and match account profiles.", "reacquire"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
    app.add_option("--workspace", g.workspace, "Directory that relative paths resolve against")
        ->capture_default_str();
    app.add_option("--format", g.format, "Output style")
        ->check(CLI::IsMember({"table", "delimited"}))
        ->capture_default_str();

    MatchArgs ma;
    auto* match = app.add_subcommand("match", "Score profile pairs and report same-user components");
    match->add_option("--profiles", ma.profiles, "Profiles file (one JSON object per line)")->required();
    match->add_option("--model", ma.model, "Match model file (default: built-in coefficients)");
    match->add_option("--threshold", ma.threshold, "Edge threshold on the match probability");
    match->add_flag("--blocking", ma.blocking, "Only score pairs sharing a name 3-gram or user id");
    match->add_option("--threads", ma.threads, "Worker threads (0 = all cores)");
    match->add_option("--report", ma.report, "Also write edges and components as JSON");

    SweepArgs sa;
    auto* sweep = app.add_subcommand("sweep", "Cluster-graph statistics over a threshold grid");
    sweep->add_option("--profiles", sa.match.profiles, "Profiles file")->required();
    sweep->add_option("--model", sa.match.model, "Match model file");
    sweep->add_option("--grid", sa.grid, "Comma-separated thresholds (default 0,0.05,...,1)");
    sweep->add_flag("--blocking", sa.match.blocking, "Only score pairs sharing a name 3-gram or user id");
    sweep->add_option("--threads", sa.match.threads, "Worker threads (0 = all cores)");
    sweep->add_option("--out", sa.out, "Also write the table as CSV");

    TrainArgs ta;
    auto* train = app.add_subcommand("train", "Fit a classifier with a seeded train/validation/test split");
    train->add_option("--kind", ta.kind, "Model kind")
        ->required()
        ->check(CLI::IsMember({"suspension", "match", "refollow"}));
    train->add_option("--data", ta.data, "CSV with a header, a 'label' column and optional 'group' column")
        ->required();
    train->add_option("--lambda", ta.lambdas, "Comma-separated regularization grid");
    train->add_option("--split", ta.split, "Train,validation,test fractions")->capture_default_str();
    train->add_flag("--group-split", ta.group_split, "Keep each 'group' value inside one split");
    train->add_option("--family", ta.family, "linear or kernel (default: kernel for refollow)")
        ->check(CLI::IsMember({"linear", "kernel"}));
    train->add_option("--out", ta.out, "Model path (default models/<kind>.json)");
    train->add_option("--roc", ta.roc, "Test ROC path (default reports/<kind>_roc.csv)");
    train->add_option("--max-sweeps", ta.max_sweeps, "Coordinate-descent sweep limit")->capture_default_str();

    InstanceArgs ia;
    auto* instance = app.add_subcommand("instance", "Build a search instance for one suspended user");
    instance->add_option("--user", ia.user, "Suspended user id")->required();
    instance->add_option("--edges", ia.edges, "follower_id,friend_id CSV")->required();
    instance->add_option("--accounts", ia.accounts, "Account records (one JSON object per line)")->required();
    instance->add_option("--model", ia.model, "Refollow model file")->required();
    instance->add_option("--interactions", ia.interactions, "user0_id,friend_id,mentions,retweets,replies CSV");
    instance->add_option("--rho0", ia.rho0, "Prior probability that a new account exists")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    instance->add_option("--rho-bar", ia.rho_bar, "Stop once the existence probability falls below this")
        ->capture_default_str();
    instance->add_option("--page-size", ia.page_size, "Followers returned per query")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    instance->add_option("--out", ia.out, "Instance path (default instances/<user>.json)");

    SearchArgs qa;
    auto* srch = app.add_subcommand("search", "Compare query policies on an instance");
    srch->add_option("--instance", qa.instance, "Instance file")->required();
    srch->add_option("--policies", qa.policies, "Comma-separated subset of optimal,greedy,min_n,max_p,random")
        ->capture_default_str();
    srch->add_option("--truth", qa.truth, "Ground truth file; adds the actual-cost column");
    srch->add_option("--runs", qa.runs, "Simulated runs per policy (0 = none)")->capture_default_str();
    srch->add_option("--random-count", qa.random_count, "Random policies to average over")->capture_default_str();
    srch->add_option("--order", qa.order, "Comma-separated friend ids, one per query; adds a 'forced' row");
    srch->add_flag("--show-policy", qa.show_policy, "Print each policy's query order");
    srch->add_option("--threads", qa.threads, "Simulation threads (0 = all cores)");
    srch->add_option("--report", qa.report, "Also write the results as JSON");

    SimulateArgs ua;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo runs of one policy");
    sim->add_option("--instance", ua.instance, "Instance file")->required();
    sim->add_option("--policy", ua.policy, "optimal, greedy, min_n, max_p or random")
        ->check(CLI::IsMember({"optimal", "greedy", "min_n", "max_p", "random"}))
        ->capture_default_str();
    sim->add_option("--order", ua.order, "Comma-separated friend ids instead of a named policy");
    sim->add_option("--truth", ua.truth, "Fix existence and reconnections from this file");
    sim->add_option("--runs", ua.runs, "Number of runs")->capture_default_str();
    sim->add_option("--threads", ua.threads, "Worker threads (0 = all cores)");
    sim->add_option("--out", ua.out, "Also write the report as JSON");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& s : args) {
        argv.push_back(s.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*match) return cmd_match(g, ma, out);
        if (*sweep) return cmd_sweep(g, sa, out);
        if (*train) return cmd_train(g, ta, out);
        if (*instance) return cmd_instance(g, ia, out);
        if (*srch) return cmd_search(g, qa, out);
        if (*sim) return cmd_simulate(g, ua, out);
    } catch (const Refusal& e) {
        err << "refused: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace reacquire::cli
