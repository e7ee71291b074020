#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "reacquire/similarity.hpp"

namespace reacquire::similarity {

struct ScoredPair {
    std::size_t a = 0;  // a < b, indices into the profile list
    std::size_t b = 0;
    double probability = 0.0;
};

struct PairScoringOptions {
    /// Refuse all-pairs scoring beyond this many pairs unless blocking is on.
    std::size_t max_pairs = 20'000'000;
    /// Only score pairs that share a character 3-gram (ASCII case-folded) in
    /// screen name or name, plus pairs with the same user id.
    bool blocking = false;
    /// 0 = hardware concurrency.
    unsigned threads = 0;
};

/// Match probability of every candidate pair, ordered by (a, b).
std::vector<ScoredPair> score_pairs(std::span<const ProfileRecord> profiles, const MatchModel& model,
                                    const PairScoringOptions& options = {});

/// Same-user graph: an undirected edge per pair at or above the threshold.
struct ClusterGraph {
    std::size_t node_count = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    /// Connected components including singletons, each sorted, ordered by
    /// smallest member.
    std::vector<std::vector<std::size_t>> components;
};

ClusterGraph graph_from_pairs(std::size_t node_count, std::span<const ScoredPair> pairs, double threshold);

ClusterGraph build_cluster_graph(std::span<const ProfileRecord> profiles, const MatchModel& model,
                                 double threshold, const PairScoringOptions& options = {});

std::vector<std::vector<std::size_t>> connected_components(
    std::size_t node_count, std::span<const std::pair<std::size_t, std::size_t>> edges);

/// Mean local clustering coefficient over all nodes; nodes of degree < 2
/// contribute 0.
double average_clustering(std::size_t node_count, std::span<const std::pair<std::size_t, std::size_t>> edges);

struct SweepRow {
    double threshold = 0.0;
    std::size_t edge_count = 0;
    /// Accounts with at least one edge.
    std::size_t connected_account_count = 0;
    std::size_t giant_component_size = 0;
    double average_clustering = 0.0;
};

std::vector<SweepRow> sweep_from_pairs(std::size_t node_count, std::span<const ScoredPair> pairs,
                                       std::span<const double> grid);

std::vector<SweepRow> threshold_sweep(std::span<const ProfileRecord> profiles, const MatchModel& model,
                                      std::span<const double> grid, const PairScoringOptions& options = {});

}  // namespace reacquire::similarity
