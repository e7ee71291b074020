#include "reacquire/cluster_graph.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

namespace reacquire::similarity {

namespace {

struct Prepared {
    std::u32string screen_name;
    std::u32string name;
    std::vector<std::u32string> grams;  // sorted, unique
};

void add_grams(const std::u32string& s, std::vector<std::u32string>& out) {
    std::u32string folded = s;
    for (auto& c : folded) {
        if (c >= U'A' && c <= U'Z') {
            c = c - U'A' + U'a';
        }
    }
    if (folded.empty()) {
        return;
    }
    if (folded.size() < 3) {
        out.push_back(folded);
        return;
    }
    for (std::size_t k = 0; k + 3 <= folded.size(); ++k) {
        out.push_back(folded.substr(k, 3));
    }
}

std::vector<Prepared> prepare(std::span<const ProfileRecord> profiles, bool with_grams) {
    std::vector<Prepared> out(profiles.size());
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        out[i].screen_name = decode_utf8(profiles[i].screen_name);
        out[i].name = decode_utf8(profiles[i].name);
        if (with_grams) {
            add_grams(out[i].screen_name, out[i].grams);
            add_grams(out[i].name, out[i].grams);
            std::sort(out[i].grams.begin(), out[i].grams.end());
            out[i].grams.erase(std::unique(out[i].grams.begin(), out[i].grams.end()), out[i].grams.end());
        }
    }
    return out;
}

bool share_gram(const Prepared& x, const Prepared& y) {
    auto i = x.grams.begin();
    auto j = y.grams.begin();
    while (i != x.grams.end() && j != y.grams.end()) {
        if (*i == *j) {
            return true;
        }
        if (*i < *j) {
            ++i;
        } else {
            ++j;
        }
    }
    return false;
}

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent_[std::max(a, b)] = std::min(a, b);
        }
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

std::vector<ScoredPair> score_pairs(std::span<const ProfileRecord> profiles, const MatchModel& model,
                                    const PairScoringOptions& options) {
    const std::size_t n = profiles.size();
    const std::size_t all_pairs = n < 2 ? 0 : n * (n - 1) / 2;
    if (!options.blocking && all_pairs > options.max_pairs) {
        throw std::length_error(std::to_string(all_pairs) + " profile pairs exceed the cap of " +
                                std::to_string(options.max_pairs) + "; enable blocking");
    }
    const auto prepared = prepare(profiles, options.blocking);

    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(threads, n)));
    // Rows are dealt round-robin so the triangular workload evens out; each
    // worker keeps its own list and the lists are merged back into (a, b) order.
    std::vector<std::vector<ScoredPair>> per_row(n);
    auto work = [&](unsigned w) {
        for (std::size_t a = w; a < n; a += threads) {
            auto& row = per_row[a];
            for (std::size_t b = a + 1; b < n; ++b) {
                if (options.blocking && profiles[a].user_id != profiles[b].user_id &&
                    !share_gram(prepared[a], prepared[b])) {
                    continue;
                }
                const ComparisonFeatures phi{
                    levenshtein_ratio(prepared[a].screen_name, prepared[b].screen_name),
                    levenshtein_ratio(prepared[a].name, prepared[b].name),
                    static_cast<double>(image_match(profiles[a].profile_picture, profiles[b].profile_picture)),
                    static_cast<double>(image_match(profiles[a].banner_picture, profiles[b].banner_picture)),
                };
                row.push_back({a, b, match_probability(model, phi)});
            }
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back(work, w);
        }
    }
    std::vector<ScoredPair> out;
    for (auto& row : per_row) {
        out.insert(out.end(), row.begin(), row.end());
    }
    return out;
}

std::vector<std::vector<std::size_t>> connected_components(
    std::size_t node_count, std::span<const std::pair<std::size_t, std::size_t>> edges) {
    DisjointSets sets(node_count);
    for (const auto& [a, b] : edges) {
        sets.unite(a, b);
    }
    std::vector<std::vector<std::size_t>> by_root(node_count);
    for (std::size_t v = 0; v < node_count; ++v) {
        by_root[sets.find(v)].push_back(v);
    }
    std::vector<std::vector<std::size_t>> out;
    for (auto& c : by_root) {
        if (!c.empty()) {
            out.push_back(std::move(c));
        }
    }
    return out;
}

ClusterGraph graph_from_pairs(std::size_t node_count, std::span<const ScoredPair> pairs, double threshold) {
    ClusterGraph g;
    g.node_count = node_count;
    for (const auto& p : pairs) {
        if (p.probability >= threshold) {
            g.edges.emplace_back(p.a, p.b);
        }
    }
    g.components = connected_components(node_count, g.edges);
    return g;
}

ClusterGraph build_cluster_graph(std::span<const ProfileRecord> profiles, const MatchModel& model,
                                 double threshold, const PairScoringOptions& options) {
    const auto pairs = score_pairs(profiles, model, options);
    return graph_from_pairs(profiles.size(), pairs, threshold);
}

double average_clustering(std::size_t node_count, std::span<const std::pair<std::size_t, std::size_t>> edges) {
    if (node_count == 0) {
        return 0.0;
    }
    std::vector<std::vector<std::size_t>> adj(node_count);
    for (const auto& [a, b] : edges) {
        if (a == b) {
            continue;
        }
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& nb : adj) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    double total = 0.0;
    for (std::size_t v = 0; v < node_count; ++v) {
        const auto& nb = adj[v];
        const auto k = nb.size();
        if (k < 2) {
            continue;
        }
        std::size_t links = 0;
        for (std::size_t x = 0; x < k; ++x) {
            const auto& nx = adj[nb[x]];
            for (std::size_t y = x + 1; y < k; ++y) {
                if (std::binary_search(nx.begin(), nx.end(), nb[y])) {
                    ++links;
                }
            }
        }
        total += 2.0 * static_cast<double>(links) / (static_cast<double>(k) * static_cast<double>(k - 1));
    }
    return total / static_cast<double>(node_count);
}

std::vector<SweepRow> sweep_from_pairs(std::size_t node_count, std::span<const ScoredPair> pairs,
                                       std::span<const double> grid) {
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (double p : grid) {
        const auto g = graph_from_pairs(node_count, pairs, p);
        SweepRow row;
        row.threshold = p;
        row.edge_count = g.edges.size();
        for (const auto& c : g.components) {
            if (c.size() > 1) {
                row.connected_account_count += c.size();
            }
            row.giant_component_size = std::max(row.giant_component_size, c.size());
        }
        row.average_clustering = average_clustering(node_count, g.edges);
        rows.push_back(row);
    }
    return rows;
}

std::vector<SweepRow> threshold_sweep(std::span<const ProfileRecord> profiles, const MatchModel& model,
                                      std::span<const double> grid, const PairScoringOptions& options) {
    const auto pairs = score_pairs(profiles, model, options);
    return sweep_from_pairs(profiles.size(), pairs, grid);
}

}  // namespace reacquire::similarity
