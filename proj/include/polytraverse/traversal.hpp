// BFS traversal of the polytope adjacency graph: flat, bounded, hierarchical,
// with a visitor callback and optional dynamic region shrinking.
#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <unordered_set>

#include "polytraverse/polytope.hpp"

namespace polytraverse {

struct TraversalConfig {
    BoundedRegion region;
    std::optional<long> max_polytopes;
    std::optional<double> time_budget_seconds;
    bool prescreen = true;
    // Number of threads used to batch-check neighbor candidates. Visit
    // order, result sets and stats are identical for every worker count.
    int workers = 1;
    Tolerances tolerances;

    explicit TraversalConfig(BoundedRegion r) : region(std::move(r)) {}
};

enum class VisitAction { Continue, Stop, ShrinkRegion };

struct VisitOutcome {
    VisitAction action = VisitAction::Continue;
    std::optional<BoundedRegion> new_region;

    static VisitOutcome proceed() { return {}; }
    static VisitOutcome stop() { return {VisitAction::Stop, {}}; }
    static VisitOutcome shrink(BoundedRegion region) {
        return {VisitAction::ShrinkRegion, std::move(region)};
    }
};

struct TraversalStats {
    long polytopes_visited = 0;
    long lp_calls = 0;
    long codes_checked = 0;
    double wall_time_seconds = 0.0;
    bool truncated = false;      // a limit fired before the frontier drained
    bool stopped_early = false;  // the visitor requested a stop
    int workers = 1;
};

using Visitor = std::function<VisitOutcome(const Polytope&, const LocalLinearModel&)>;

using CodeSet = std::unordered_set<ActivationCode, ActivationCodeHash>;

struct TraversalResult {
    CodeSet codes;
    TraversalStats stats;
    BoundedRegion final_region;
};

// Full hierarchical traversal from `start`, which must lie inside the
// region. The visitor (optional) sees every visited leaf polytope exactly
// once, in deterministic FIFO discovery order with ascending-bit neighbor
// generation. Shrink outcomes are rejected here; use
// traverse_with_shrinking for verifiers that tighten the region.
TraversalResult traverse(const ReluNetwork& net, const DenseVector& start,
                         const TraversalConfig& config, const Visitor& visitor = {});

// Same engine with dynamic region shrinking enabled: each requested region
// must be a subset of the current one (checked by LP); queue entries from
// before a shrink are re-checked on pop and skipped when they no longer
// intersect the region.
TraversalResult traverse_with_shrinking(const ReluNetwork& net, const DenseVector& start,
                                        const TraversalConfig& config,
                                        const Visitor& visitor);

// Single-level BFS: traverses the level-`level` polytopes inside the parent
// polytope named by `parent_code` intersected with `parent_region`, without
// descending further. Returns the full codes discovered; the visitor is
// invoked only when `level` is the network's last level.
CodeSet traverse_level(const ReluNetwork& net, const ActivationCode& parent_code,
                       const BoundedRegion& parent_region, const DenseVector& start,
                       int level, const Visitor& visitor = {},
                       const Tolerances& tol = {});

}  // namespace polytraverse
