#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "sgm/core.hpp"
#include "sgm/subdivision.hpp"

namespace sgm::refinement {

using subdivision::GridCell;
using subdivision::Phase1Outcome;

struct RefineState {
    Point s;
    double s_value = 0.0;
    GridCell cell;
    int rotations_used = 0;
    int crossovers_used = 0;
    /// Index into the diagonal ordering of the last improving ray.
    std::optional<std::size_t> last_direction;
    /// Multiplier on every ray and rotation length; halved when a full pass
    /// finds nothing.
    double scale = 1.0;
};

/// Improving candidate found by a sweep.
struct Candidate {
    Point point;
    double value = 0.0;
    std::size_t direction = 0;
};

/// Vertex with the best cached value; ties go to the lowest relative
/// coordinates. Throws UsageError on an empty outcome.
std::pair<Point, double> select_best_vertex(const Phase1Outcome& outcome, Sense sense);

/// Sign vector number `index` of {+1,-1}^n in lexicographic order with +1
/// first, i.e. bit (n-1-i) of index set means -1 on axis i.
Point diagonal_direction(std::size_t n, std::size_t index);

/// All 2^n sign vectors, all-ones first. Throws UsageError for n > 20.
std::vector<Point> diagonal_directions(std::size_t n);

/// s + alpha * dir. Throws UsageError unless alpha > 0 and dimensions match.
Point ray_mutate(const Point& s, const Point& dir, double alpha);

/// Tries s + m * alpha_base * scale * dir for m = 1..10, skipping points
/// outside the box; first strictly better one wins.
std::optional<Candidate> alpha_sweep(const RefineState& state, EvalContext& ctx, const Point& dir,
                                     const SgmConfig& config);

/// For each beta (scaled like the rays) and each diagonal except the last
/// improving one, tries s + beta * e. Every evaluated candidate uses one unit
/// of the TRM allowance.
std::optional<Candidate> rotational_sweep(RefineState& state, EvalContext& ctx, const SgmConfig& config);

Point crossover_midpoint(const Point& p1, const Point& p2);

/// Midpoints of the n cell edges meeting at the corner nearest ray_end
/// (ties go to the lower corner on that axis).
std::vector<Point> crossover_adjacent_sides(const GridCell& cell, const Point& ray_end);

struct Phase2Event {
    std::size_t iteration = 0;
    Point incumbent;
    Point candidate;
    double value = 0.0;
    bool accepted = false;
};
using Phase2Sink = std::function<void(const Phase2Event&)>;

/// Phase 2 from the phase-1 outcome. The start point is the better of the
/// best vertex and the phase-1 elite. `generations` counts improving outer
/// iterations; `evaluations` counts this phase only; the trace holds one
/// entry per improvement plus the start.
RunResult run_phase2(const Phase1Outcome& outcome, EvalContext& ctx, const SgmConfig& config,
                     const Phase2Sink& sink = {});

} // namespace sgm::refinement
