#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "sgm/core.hpp"

namespace sgm::subdivision {

/// Subdivision would push the grid below 2^-kMaxLevel of the initial extent.
struct RefinementLimit : std::runtime_error {
    RefinementLimit() : std::runtime_error("cell refinement limit reached") {}
};

inline constexpr int kMaxLevel = 40;

using RelCoords = std::vector<std::int64_t>;

/// Axis-aligned hypercube cell of the dyadic grid over a box.
///
/// At level L the grid step on axis i is extent_i * 2^-L, and a grid point
/// with relative coordinates k sits at lo_i + k_i * step_i. Halving a step is
/// exact in binary floating point, so the same point always has the same
/// coordinates no matter which level it is reached from.
struct GridCell {
    Point lo;                 // grid anchor (domain lower corner)
    Point base;               // lowest corner, lo + origin * step
    std::vector<double> step; // edge length per axis
    int level = 0;
    RelCoords origin;         // relative coordinates of base at this level

    std::size_t dim() const noexcept { return base.size(); }
    /// 2^n; throws UsageError when that does not fit.
    std::size_t corner_count() const;
    /// Corner `index`: bit i set means +step on axis i.
    Point corner(std::size_t index) const;
    RelCoords corner_rel(std::size_t index) const;
    Point center() const;
    bool contains(const Point& p) const;
    double diameter() const;
};

struct LabeledVertex {
    Point point;
    RelCoords rel; // at the level of the cell it was labelled for
    int label = 0;
    double value = 0.0;
};

struct Phase1Outcome {
    GridCell cell;
    std::vector<LabeledVertex> vertices;
    std::size_t evaluations = 0;
    std::size_t rounds_completed = 0;
    bool complete = false;
    /// Best individual evaluated anywhere in phase 1 (vertices, neighbours and
    /// mutation offspring). Empty only if nothing could be evaluated.
    std::optional<Point> elite;
    double elite_value = 0.0;
    std::vector<TraceEntry> trace;
};

/// One labelling round as seen by a trace sink.
struct RoundSnapshot {
    std::size_t round = 0;
    std::vector<GridCell> cells;
    std::vector<std::vector<LabeledVertex>> vertices; // parallel to cells
    std::size_t selected = 0;
    bool complete = false;
};
using RoundSink = std::function<void(const RoundSnapshot&)>;

// ---------------------------------------------------------------------------

/// Point on the dyadic grid of a box.
class Lattice {
public:
    explicit Lattice(BoxDomain box) : box_(std::move(box)) {}

    const BoxDomain& box() const noexcept { return box_; }
    double step(std::size_t axis, int level) const;
    Point point(const RelCoords& k, int level) const;
    bool inside(const RelCoords& k, int level) const;
    /// Level-independent key: k scaled to the finest representable level.
    static RelCoords key(const RelCoords& k, int level);

private:
    BoxDomain box_;
};

/// Counted evaluations on the grid, cached per grid point, plus the running
/// elite. One instance per run.
class LatticeCache {
public:
    LatticeCache(EvalContext& ctx, const BoxDomain& box) : ctx_(ctx), lattice_(box) {}

    const Lattice& lattice() const noexcept { return lattice_; }
    EvalContext& context() noexcept { return ctx_; }

    double value(const RelCoords& k, int level);

    struct Best {
        RelCoords k; // at the probe level
        double value = 0.0;
    };
    /// Best of the Moore neighbourhood of vertex k (given at `level`) probed
    /// one level finer, the vertex itself included and winning ties.
    Best best_moore_neighbor(const RelCoords& k, int level);
    /// Per-axis best of {v - h e_i, v, v + h e_i}, h one level finer; used
    /// when 3^n - 1 neighbours are too many. The result combines the winning
    /// offset of every axis.
    RelCoords best_axis_direction(const RelCoords& k, int level);

    const std::optional<Point>& elite() const noexcept { return elite_; }
    double elite_value() const noexcept { return elite_value_; }

private:
    EvalContext& ctx_;
    Lattice lattice_;
    std::map<RelCoords, double> values_;
    std::optional<Point> elite_;
    double elite_value_ = 0.0;
};

// ---------------------------------------------------------------------------

/// Whole box as one level-0 cell; its corners are the initial population.
GridCell initial_cell(const BoxDomain& box);

/// Calls fn(delta) for every delta in {-1,0,+1}^n except zero, in
/// lexicographic order (axis 0 most significant, -1 before 0 before +1).
void for_each_moore_offset(std::size_t n, const std::function<void(const std::vector<int>&)>& fn);

/// p + delta*h for every Moore offset, keeping only points inside the box.
std::vector<Point> neighborhood(const Point& p, const std::vector<double>& h, const BoxDomain& box);

struct NeighborChoice {
    Point best;      // c
    Point direction; // d = c - p
    double value = 0.0;
};

/// Best of neighborhood(p, h, box) and p itself; p wins ties, otherwise the
/// earliest neighbour in enumeration order.
NeighborChoice best_neighbor(EvalContext& ctx, const Point& p, const std::vector<double>& h, const BoxDomain& box);

/// 0 if d has no negative component, else the largest 1-based index i with
/// d_i < 0.
int label_by_direction(const Point& d);

/// 0 if w has no negative component, else the smallest 1-based index i with
/// w_i < 0. w is g(x) - x = grad f(x).
int label_by_gradient(const Point& w);

enum class Probe { Moore, Axis };

/// Labels corner `corner` of `cell`. Best-neighbour labelling probes the grid
/// one level below the cell (step / 2), over the full Moore neighbourhood or
/// axis by axis; gradient labelling nudges boundary vertices inward by
/// 1e-9 * step first.
LabeledVertex label_vertex(LatticeCache& cache, const GridCell& cell, std::size_t corner, Labeling labeling,
                           Probe probe = Probe::Moore);
LabeledVertex label_vertex(EvalContext& ctx, const GridCell& cell, std::size_t corner, Labeling labeling,
                           Probe probe = Probe::Moore);

/// True iff {0..n} is a subset of labels. Requires exactly 2^n labels.
bool is_completely_labeled(const std::vector<int>& labels, std::size_t n);

/// The 2^n half-size children, ordered by child corner index.
std::vector<GridCell> subdivide(const GridCell& cell);

/// Child of `cell` on the side of p selected per axis (upper when p_i is at
/// or beyond the midpoint).
GridCell child_toward(const GridCell& cell, const Point& p);

/// Phase 1: TF rounds of labelling, completely-labelled cell selection and
/// bisection, then a final labelling of the last children.
Phase1Outcome run_phase1(EvalContext& ctx, const SgmConfig& config, const RoundSink& sink = {});

} // namespace sgm::subdivision
