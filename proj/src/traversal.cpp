#include "polytraverse/traversal.hpp"

#include <atomic>
#include <deque>
#include <thread>

namespace polytraverse {
namespace {

using Segment = std::vector<std::uint8_t>;

struct SegmentHash {
    std::size_t operator()(const Segment& v) const {
        std::uint64_t h = 1469598103934665603ull;
        for (std::uint8_t b : v) {
            h ^= b + 1u;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

Segment segment_of(const LevelCoefficients& lc, const DenseVector& x) {
    const DenseVector z = lc.effective_weights * x + lc.effective_bias;
    Segment bits(static_cast<std::size_t>(z.size()));
    for (Eigen::Index m = 0; m < z.size(); ++m)
        bits[static_cast<std::size_t>(m)] = z(m) >= 0.0 ? 1 : 0;
    return bits;
}

ConstraintSystem segment_rows(const LevelCoefficients& lc, const Segment& bits, int dim) {
    ConstraintSystem sys(dim);
    for (Eigen::Index m = 0; m < lc.effective_weights.rows(); ++m)
        sys.add(detail::code_constraint(lc.effective_weights.row(m).transpose(),
                                        lc.effective_bias(m),
                                        bits[static_cast<std::size_t>(m)] != 0));
    return sys;
}

class Engine {
public:
    Engine(const ReluNetwork& net, const TraversalConfig& config, const Visitor& visitor,
           bool allow_shrink, int leaf_level)
        : net_(net),
          config_(config),
          visitor_(visitor),
          allow_shrink_(allow_shrink),
          leaf_level_(leaf_level),
          region_(config.region),
          region_rows_(region_.constraints()) {
        if (config_.region.dimension() != net_.input_dim())
            throw InvalidInputError("traversal region dimension mismatch");
        if (config_.max_polytopes && *config_.max_polytopes <= 0)
            throw InvalidInputError("max_polytopes must be positive");
        if (config_.time_budget_seconds && *config_.time_budget_seconds <= 0)
            throw InvalidInputError("time budget must be positive");
        if (config_.workers < 1) throw InvalidInputError("workers must be >= 1");
        stats_.workers = config_.workers;
    }

    TraversalResult run(const DenseVector& start, const ActivationCode& prefix,
                        const ConstraintSystem& prefix_rows,
                        const LevelCoefficients* masked_parent, int entry_level) {
        start_time_ = std::chrono::steady_clock::now();
        recurse(start, entry_level, prefix, prefix_rows, masked_parent);
        stats_.wall_time_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time_)
                .count();
        return {std::move(result_), stats_, region_};
    }

private:
    struct QueueEntry {
        Segment segment;
        long region_version;
    };

    bool aborted() const { return stop_ || truncated_; }

    void note_limits() {
        if (config_.max_polytopes && stats_.polytopes_visited >= *config_.max_polytopes) {
            truncated_ = true;
            stats_.truncated = true;
        }
        if (config_.time_budget_seconds) {
            const double elapsed =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time_)
                    .count();
            if (elapsed > *config_.time_budget_seconds) {
                truncated_ = true;
                stats_.truncated = true;
            }
        }
    }

    void apply_shrink(BoundedRegion next) {
        if (!allow_shrink_)
            throw InvalidInputError("visitor requested a region shrink outside "
                                    "traverse_with_shrinking");
        if (next.dimension() != net_.input_dim())
            throw InvalidInputError("shrink region dimension mismatch");
        // Subset check: every current-region constraint must hold throughout
        // the requested region.
        const ConstraintSystem next_rows = next.constraints();
        for (const auto& c : region_rows_.constraints) {
            if (c.trivial()) continue;
            const Objective dir =
                c.sense == Sense::LessEqual ? Objective::Maximize : Objective::Minimize;
            ++stats_.lp_calls;
            const LpSolution sol = optimize_linear(c.normal, dir, next_rows,
                                                   config_.tolerances);
            if (sol.status == LpStatus::Infeasible) break;  // empty region is a subset
            if (sol.status == LpStatus::Unbounded)
                throw InvalidInputError("shrink region is not a subset (unbounded)");
            const double worst = c.sense == Sense::LessEqual ? *sol.value + c.offset
                                                             : -(*sol.value + c.offset);
            if (worst > config_.tolerances.interior_margin)
                throw InvalidInputError("shrink region is not a subset of the current one");
        }
        region_ = std::move(next);
        region_rows_ = region_.constraints();
        ++region_version_;
    }

    // Visits a leaf polytope: builds its closed system and local model,
    // invokes the visitor and applies the outcome.
    void visit_leaf(const ActivationCode& code, const ConstraintSystem& closed_rows,
                    const LevelCoefficients& masked_leaf) {
        result_.insert(code);
        ++stats_.polytopes_visited;
        if (visitor_ && leaf_level_ == net_.depth()) {
            Polytope poly{code, closed_rows, leaf_level_};
            const LocalLinearModel model = model_from_masked(net_, masked_leaf);
            const VisitOutcome outcome = visitor_(poly, model);
            if (outcome.action == VisitAction::Stop) {
                stop_ = true;
                stats_.stopped_early = true;
            } else if (outcome.action == VisitAction::ShrinkRegion) {
                if (!outcome.new_region)
                    throw InvalidInputError("shrink outcome carries no region");
                apply_shrink(*outcome.new_region);
            }
        }
        note_limits();
    }

    // Feasibility of prefix+segment code rows against the current region,
    // under the interior-margin policy.
    FeasibilityResult check_code(const ConstraintSystem& code_rows) {
        return detail::check_with_margin(code_rows, &region_rows_, config_.tolerances,
                                         &stats_.lp_calls);
    }

    void recurse(const DenseVector& x, int level, const ActivationCode& prefix,
                 const ConstraintSystem& prefix_rows, const LevelCoefficients* masked_parent) {
        LevelCoefficients lc = level == 1 ? first_level_coefficients(net_)
                                          : next_level_coefficients(net_, *masked_parent);
        const int width = static_cast<int>(lc.effective_weights.rows());
        const int dim = net_.input_dim();

        std::deque<QueueEntry> queue;
        std::unordered_set<Segment, SegmentHash> checked;

        const Segment initial = segment_of(lc, x);
        checked.insert(initial);
        ++stats_.codes_checked;
        {
            // Queue entries carry the region version their feasibility was
            // decided under; a later version triggers a re-check on pop.
            const long version_at_check = region_version_;
            ConstraintSystem rows = prefix_rows;
            rows.append(segment_rows(lc, initial, dim));
            const FeasibilityResult feas = check_code(rows);
            // A start cell thinner than the interior margin still seeds the
            // BFS frontier but is neither reported nor descended into.
            if (feas.feasible())
                handle_found(prefix, initial, lc, prefix_rows, level, x,
                             /*descend_with_hint=*/true);
            queue.push_back({initial, version_at_check});
        }
        if (aborted()) return;

        // Hyperplane pre-screening against B intersected with the parent
        // polytope; without it every index is a candidate. The scope is known
        // non-empty here (this polytope was reached through a feasible chain).
        PrescreenResult candidates;
        if (config_.prescreen) {
            ConstraintSystem level_planes(dim);
            for (Eigen::Index m = 0; m < lc.effective_weights.rows(); ++m)
                level_planes.add({lc.effective_weights.row(m).transpose(),
                                  lc.effective_bias(m), Sense::LessEqual});
            BoundedRegion scope = region_;
            if (!prefix_rows.empty())
                scope = BoundedRegion::intersection(
                    {region_, BoundedRegion::halfspaces(dim, prefix_rows.constraints)});
            candidates = detail::prescreen_scoped(level_planes, scope, config_.tolerances,
                                                  &stats_.lp_calls, config_.workers);
        } else {
            candidates = PrescreenResult::all(width);
        }

        while (!queue.empty() && !aborted()) {
            note_limits();
            if (aborted()) return;
            const QueueEntry entry = queue.front();
            queue.pop_front();
            if (entry.region_version != region_version_) {
                // The region shrank since this entry was queued; skip it when
                // it no longer intersects the current region.
                ConstraintSystem rows = prefix_rows;
                rows.append(segment_rows(lc, entry.segment, dim));
                if (!check_code(rows).feasible()) continue;
            }

            // Unchecked one-bit flips, in ascending hyperplane order.
            std::vector<int> flips;
            std::vector<Segment> flip_segments;
            for (int m : candidates.cutting) {
                Segment flipped = entry.segment;
                flipped[static_cast<std::size_t>(m)] ^= 1u;
                if (checked.contains(flipped)) continue;
                checked.insert(flipped);
                flips.push_back(m);
                flip_segments.push_back(std::move(flipped));
            }
            stats_.codes_checked += static_cast<long>(flips.size());
            const long version_at_check = region_version_;

            std::vector<FeasibilityResult> feas(flips.size());
            const int threads = std::min<int>(config_.workers,
                                              static_cast<int>(flips.size()));
            if (threads <= 1) {
                for (std::size_t i = 0; i < flips.size(); ++i) {
                    ConstraintSystem rows = prefix_rows;
                    rows.append(segment_rows(lc, flip_segments[i], dim));
                    feas[i] = check_code(rows);
                }
            } else {
                std::atomic<long> extra_calls{0};
                std::atomic<std::size_t> cursor{0};
                auto work = [&]() {
                    for (std::size_t i = cursor.fetch_add(1); i < flips.size();
                         i = cursor.fetch_add(1)) {
                        ConstraintSystem rows = prefix_rows;
                        rows.append(segment_rows(lc, flip_segments[i], dim));
                        long calls = 0;
                        feas[i] = detail::check_with_margin(rows, &region_rows_,
                                                            config_.tolerances, &calls);
                        extra_calls += calls;
                    }
                };
                std::vector<std::thread> pool;
                for (int t = 0; t < threads; ++t) pool.emplace_back(work);
                for (auto& t : pool) t.join();
                stats_.lp_calls += extra_calls.load();
            }

            for (std::size_t i = 0; i < flips.size() && !aborted(); ++i) {
                if (!feas[i].feasible()) continue;
                queue.push_back({flip_segments[i], version_at_check});
                handle_found(prefix, flip_segments[i], lc, prefix_rows, level,
                             feas[i].witness ? std::optional<DenseVector>(*feas[i].witness)
                                             : std::nullopt,
                             /*descend_with_hint=*/false);
            }
        }
    }

    // A non-empty polytope at `level` was identified: report it when it is a
    // leaf, otherwise descend into it. Discovered neighbors descend via an
    // interior point; the initial cell descends through the start point
    // itself, which by construction lies inside it.
    void handle_found(const ActivationCode& prefix, const Segment& segment,
                      const LevelCoefficients& lc, const ConstraintSystem& prefix_rows,
                      int level, std::optional<DenseVector> point_hint,
                      bool descend_with_hint) {
        const ActivationCode code = prefix.with_appended(segment);
        ConstraintSystem closed_rows = prefix_rows;
        closed_rows.append(segment_rows(lc, segment, net_.input_dim()));
        LevelCoefficients masked = lc;
        apply_mask(masked, segment);
        if (level == leaf_level_) {
            visit_leaf(code, closed_rows, masked);
            return;
        }
        DenseVector down;
        if (descend_with_hint && point_hint) {
            down = *point_hint;
        } else {
            // Interior point of polytope-and-region; the feasibility witness
            // stands in when the Chebyshev slack cannot clear the margin.
            ConstraintSystem scoped = closed_rows;
            scoped.append(region_rows_);
            ++stats_.lp_calls;
            const FeasibilityResult center = interior_point(scoped, config_.tolerances);
            if (center.feasible()) {
                down = *center.witness;
            } else if (point_hint) {
                down = *point_hint;
            } else {
                throw SolverStallError("no descent point for a feasible polytope");
            }
        }
        recurse(down, level + 1, code, closed_rows, &masked);
    }

    const ReluNetwork& net_;
    const TraversalConfig& config_;
    const Visitor& visitor_;
    bool allow_shrink_;
    int leaf_level_;

    BoundedRegion region_;
    ConstraintSystem region_rows_;
    long region_version_ = 0;

    TraversalStats stats_;
    CodeSet result_;
    bool stop_ = false;
    bool truncated_ = false;
    std::chrono::steady_clock::time_point start_time_;
};

TraversalResult run_full(const ReluNetwork& net, const DenseVector& start,
                         const TraversalConfig& config, const Visitor& visitor,
                         bool allow_shrink) {
    if (start.size() != net.input_dim())
        throw InvalidInputError("traverse: start dimension mismatch");
    if (!config.region.contains(start, config.tolerances.numeric))
        throw InvalidInputError("traverse: start point lies outside the region");
    Engine engine(net, config, visitor, allow_shrink, net.depth());
    return engine.run(start, ActivationCode{}, ConstraintSystem(net.input_dim()), nullptr,
                      1);
}

}  // namespace

TraversalResult traverse(const ReluNetwork& net, const DenseVector& start,
                         const TraversalConfig& config, const Visitor& visitor) {
    return run_full(net, start, config, visitor, /*allow_shrink=*/false);
}

TraversalResult traverse_with_shrinking(const ReluNetwork& net, const DenseVector& start,
                                        const TraversalConfig& config,
                                        const Visitor& visitor) {
    return run_full(net, start, config, visitor, /*allow_shrink=*/true);
}

CodeSet traverse_level(const ReluNetwork& net, const ActivationCode& parent_code,
                       const BoundedRegion& parent_region, const DenseVector& start,
                       int level, const Visitor& visitor, const Tolerances& tol) {
    if (level < 1 || level > net.depth())
        throw InvalidInputError("traverse_level: level out of range");
    if (parent_code.level_count() != level - 1)
        throw InvalidInputError("traverse_level: parent code must cover levels below the "
                                "target level");
    if (start.size() != net.input_dim())
        throw InvalidInputError("traverse_level: start dimension mismatch");
    TraversalConfig config(parent_region);
    config.tolerances = tol;
    Engine engine(net, config, visitor, /*allow_shrink=*/false, level);
    ConstraintSystem prefix_rows(net.input_dim());
    std::optional<LevelCoefficients> masked_parent;
    if (level > 1) {
        prefix_rows = polytope_from_code(net, parent_code).system;
        masked_parent = level_coefficients(net, parent_code, level - 1);
        if (!prefix_rows.satisfied(start, tol))
            throw InvalidInputError("traverse_level: start lies outside the parent polytope");
    }
    if (!parent_region.contains(start, tol.numeric))
        throw InvalidInputError("traverse_level: start lies outside the region");
    return engine
        .run(start, parent_code, prefix_rows, masked_parent ? &*masked_parent : nullptr,
             level)
        .codes;
}

}  // namespace polytraverse
