#include "sgm/subdivision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "sgm/testbed.hpp"

namespace sgm::subdivision {

namespace {

constexpr int kKeyLevel = 62;

std::size_t checked_corner_count(std::size_t n)
{
    if (n >= 8 * sizeof(std::size_t) - 1)
        throw UsageError("2^" + std::to_string(n) + " corners do not fit in an index");
    return std::size_t{1} << n;
}

/// Labels in {0..n} all present.
bool covers_all_labels(const std::vector<int>& labels, std::size_t n)
{
    std::vector<bool> seen(n + 1, false);
    for (int l : labels) {
        if (l >= 0 && static_cast<std::size_t>(l) <= n)
            seen[static_cast<std::size_t>(l)] = true;
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

std::size_t distinct_labels(const std::vector<LabeledVertex>& vs)
{
    std::set<int> s;
    for (const auto& v : vs)
        s.insert(v.label);
    return s.size();
}

int label_from_offsets(const RelCoords& delta)
{
    for (std::size_t i = delta.size(); i-- > 0;) {
        if (delta[i] < 0)
            return static_cast<int>(i + 1);
    }
    return 0;
}

RelCoords doubled(const RelCoords& k)
{
    RelCoords r(k.size());
    for (std::size_t i = 0; i < k.size(); ++i)
        r[i] = 2 * k[i];
    return r;
}

struct LabelResult {
    LabeledVertex vertex;
    RelCoords best; // best neighbour one level finer (the vertex itself if none better)
};

LabelResult label_impl(LatticeCache& cache, const GridCell& cell, std::size_t corner, Labeling labeling,
                       Probe probe)
{
    const Lattice& lat = cache.lattice();
    LabelResult out;
    LabeledVertex& v = out.vertex;
    v.rel = cell.corner_rel(corner);
    v.point = lat.point(v.rel, cell.level);
    v.value = cache.value(v.rel, cell.level);

    if (labeling == Labeling::Gradient) {
        EvalContext& ctx = cache.context();
        Point nudged = v.point;
        const BoxDomain& box = lat.box();
        for (std::size_t i = 0; i < nudged.size(); ++i) {
            if (nudged[i] <= box.lo()[i])
                nudged[i] = box.lo()[i] + 1e-9 * cell.step[i];
            else if (nudged[i] >= box.hi()[i])
                nudged[i] = box.hi()[i] - 1e-9 * cell.step[i];
        }
        Point w = testbed::gradient(ctx.obj, nudged);
        if (ctx.cmp.sense == Sense::Max)
            w = -1.0 * w;
        v.label = label_by_gradient(w);
        out.best = doubled(v.rel);
        return out;
    }

    RelCoords delta;
    if (probe == Probe::Moore) {
        auto best = cache.best_moore_neighbor(v.rel, cell.level);
        delta = best.k;
        const RelCoords c = doubled(v.rel);
        for (std::size_t i = 0; i < delta.size(); ++i)
            delta[i] -= c[i];
        out.best = std::move(best.k);
    } else {
        delta = cache.best_axis_direction(v.rel, cell.level);
        out.best = doubled(v.rel);
        for (std::size_t i = 0; i < delta.size(); ++i)
            out.best[i] += delta[i];
    }
    v.label = label_from_offsets(delta);
    return out;
}

/// Selection among candidate cells: first completely labelled one, otherwise
/// the one with most distinct labels (ties: best vertex value, then order).
std::pair<std::size_t, bool> select_cell(const std::vector<std::vector<LabeledVertex>>& labels, std::size_t n,
                                         const Comparator& cmp)
{
    for (std::size_t c = 0; c < labels.size(); ++c) {
        std::vector<int> ls;
        ls.reserve(labels[c].size());
        for (const auto& v : labels[c])
            ls.push_back(v.label);
        if (covers_all_labels(ls, n))
            return {c, true};
    }
    const Comparator plain{cmp.sense, 0.0};
    auto best_value = [&](const std::vector<LabeledVertex>& vs) {
        double b = plain.worst();
        for (const auto& v : vs) {
            if (plain.better(v.value, b))
                b = v.value;
        }
        return b;
    };
    std::size_t pick = 0;
    std::size_t pick_count = distinct_labels(labels[0]);
    double pick_value = best_value(labels[0]);
    for (std::size_t c = 1; c < labels.size(); ++c) {
        const std::size_t count = distinct_labels(labels[c]);
        const double value = best_value(labels[c]);
        if (count > pick_count || (count == pick_count && plain.better(value, pick_value))) {
            pick = c;
            pick_count = count;
            pick_value = value;
        }
    }
    return {pick, false};
}

class Phase1Runner {
public:
    Phase1Runner(EvalContext& ctx, const SgmConfig& config, const RoundSink& sink)
        : ctx_(ctx), config_(config), sink_(sink), cache_(ctx, ctx.obj.domain), n_(ctx.obj.dim),
          probe_(n_ > config.max_enum_dim ? Probe::Axis : Probe::Moore)
    {
    }

    Phase1Outcome run()
    {
        Phase1Outcome out;
        out.cell = initial_cell(ctx_.obj.domain);
        const std::size_t start = ctx_.counter.used;
        try {
            if (probe_ == Probe::Moore)
                run_enumerated(out);
            else
                run_axiswise(out);
        } catch (const BudgetExceeded&) {
            out.complete = false;
        }
        out.evaluations = ctx_.counter.used - start;
        out.elite = cache_.elite();
        out.elite_value = cache_.elite_value();
        push_trace(out, out.rounds_completed);
        return out;
    }

private:
    void push_trace(Phase1Outcome& out, std::size_t generation)
    {
        if (!cache_.elite())
            return;
        if (!out.trace.empty() && out.trace.back().best_value == cache_.elite_value() &&
            out.trace.back().best_point == *cache_.elite())
            return;
        out.trace.push_back({generation, cache_.elite_value(), *cache_.elite()});
    }

    const LabeledVertex& labeled(const GridCell& cell, std::size_t corner)
    {
        RelCoords rel = cell.corner_rel(corner);
        auto key = std::make_pair(cell.level, rel);
        if (auto it = labels_.find(key); it != labels_.end())
            return it->second;
        LabelResult r = label_impl(cache_, cell, corner, config_.labeling, probe_);
        maybe_mutate(r.best, cell.level + 1);
        return labels_.emplace(std::move(key), std::move(r.vertex)).first->second;
    }

    /// Search-space-reducing mutation: with probability MR, search around the
    /// vertex's best neighbour one grid level finer still. Offspring only
    /// feed the elite.
    void maybe_mutate(const RelCoords& from, int level)
    {
        if (config_.mutation_rate <= 0.0)
            return;
        if (!(ctx_.rng.uniform() < config_.mutation_rate))
            return;
        if (level + 1 > kMaxLevel + 1)
            return;
        if (probe_ == Probe::Moore)
            cache_.best_moore_neighbor(from, level);
        else
            cache_.best_axis_direction(from, level);
    }

    std::vector<LabeledVertex> label_all(const GridCell& cell)
    {
        std::vector<LabeledVertex> vs;
        const std::size_t m = cell.corner_count();
        vs.reserve(m);
        for (std::size_t c = 0; c < m; ++c)
            vs.push_back(labeled(cell, c));
        return vs;
    }

    void run_enumerated(Phase1Outcome& out)
    {
        std::vector<GridCell> candidates{out.cell};
        bool all_complete = true;
        for (int round = 0; round <= config_.tf_rounds; ++round) {
            std::vector<std::vector<LabeledVertex>> labels;
            labels.reserve(candidates.size());
            for (const auto& cell : candidates)
                labels.push_back(label_all(cell));
            auto [sel, complete] = select_cell(labels, n_, ctx_.cmp);
            all_complete = all_complete && complete;
            if (sink_)
                sink_(RoundSnapshot{static_cast<std::size_t>(round), candidates, labels, sel, complete});

            out.cell = candidates[sel];
            out.vertices = std::move(labels[sel]);
            out.complete = all_complete;
            if (round == config_.tf_rounds)
                break;
            candidates = subdivide(out.cell);
            out.rounds_completed = static_cast<std::size_t>(round + 1);
            push_trace(out, out.rounds_completed);
        }
    }

    /// High-dimensional variant: one child per round, chosen axis by axis
    /// from the descent direction at the parent's centre; the final cell is
    /// judged on its corner simplex (base and the n adjacent corners).
    void run_axiswise(Phase1Outcome& out)
    {
        GridCell cell = out.cell;
        for (int round = 0; round < config_.tf_rounds; ++round) {
            const RelCoords centre = [&] {
                RelCoords c = doubled(cell.origin);
                for (auto& x : c)
                    x += 1;
                return c;
            }();
            cache_.value(centre, cell.level + 1);
            const RelCoords delta = cache_.best_axis_direction(centre, cell.level + 1);
            const Point centre_pt = cache_.lattice().point(centre, cell.level + 1);
            Point toward = centre_pt;
            for (std::size_t i = 0; i < n_; ++i) {
                if (delta[i] < 0)
                    toward[i] = -std::numeric_limits<double>::infinity();
                else if (delta[i] > 0)
                    toward[i] = std::numeric_limits<double>::infinity();
                else
                    toward[i] = cache_.elite() ? (*cache_.elite())[i] : centre_pt[i];
            }
            if (sink_)
                sink_(RoundSnapshot{static_cast<std::size_t>(round), {cell}, {{}}, 0, false});
            cell = child_toward(cell, toward);
            out.cell = cell;
            out.rounds_completed = static_cast<std::size_t>(round + 1);
            push_trace(out, out.rounds_completed);
        }

        std::vector<LabeledVertex> simplex;
        simplex.push_back(labeled(cell, 0));
        for (std::size_t i = 0; i < n_; ++i)
            simplex.push_back(labeled(cell, std::size_t{1} << i));
        std::vector<int> ls;
        for (const auto& v : simplex)
            ls.push_back(v.label);
        out.complete = covers_all_labels(ls, n_);
        out.vertices = std::move(simplex);
        if (sink_)
            sink_(RoundSnapshot{static_cast<std::size_t>(config_.tf_rounds), {cell}, {out.vertices}, 0,
                                out.complete});
    }

    EvalContext& ctx_;
    const SgmConfig& config_;
    const RoundSink& sink_;
    LatticeCache cache_;
    std::size_t n_;
    Probe probe_;
    std::map<std::pair<int, RelCoords>, LabeledVertex> labels_;
};

} // namespace

// ---------------------------------------------------------------------------

std::size_t GridCell::corner_count() const
{
    return checked_corner_count(dim());
}

RelCoords GridCell::corner_rel(std::size_t index) const
{
    RelCoords k = origin;
    for (std::size_t i = 0; i < k.size() && i < 8 * sizeof(std::size_t); ++i) {
        if ((index >> i) & 1U)
            k[i] += 1;
    }
    return k;
}

Point GridCell::corner(std::size_t index) const
{
    const RelCoords k = corner_rel(index);
    Point p(dim());
    for (std::size_t i = 0; i < dim(); ++i)
        p[i] = lo[i] + static_cast<double>(k[i]) * step[i];
    return p;
}

Point GridCell::center() const
{
    Point c(dim());
    for (std::size_t i = 0; i < dim(); ++i)
        c[i] = base[i] + 0.5 * step[i];
    return c;
}

bool GridCell::contains(const Point& p) const
{
    if (p.size() != dim())
        throw UsageError("GridCell::contains: dimension mismatch");
    for (std::size_t i = 0; i < dim(); ++i) {
        if (!(base[i] <= p[i] && p[i] <= base[i] + step[i]))
            return false;
    }
    return true;
}

double GridCell::diameter() const
{
    double s = 0.0;
    for (double h : step)
        s += h * h;
    return std::sqrt(s);
}

// ---------------------------------------------------------------------------

double Lattice::step(std::size_t axis, int level) const
{
    return std::ldexp(box_.extent(axis), -level);
}

Point Lattice::point(const RelCoords& k, int level) const
{
    Point p(k.size());
    for (std::size_t i = 0; i < k.size(); ++i)
        p[i] = box_.lo()[i] + static_cast<double>(k[i]) * step(i, level);
    return p;
}

bool Lattice::inside(const RelCoords& k, int level) const
{
    const std::int64_t top = std::int64_t{1} << level;
    return std::all_of(k.begin(), k.end(), [&](std::int64_t x) { return 0 <= x && x <= top; });
}

RelCoords Lattice::key(const RelCoords& k, int level)
{
    if (level < 0 || level > kKeyLevel)
        throw RefinementLimit();
    RelCoords r(k.size());
    for (std::size_t i = 0; i < k.size(); ++i)
        r[i] = k[i] << (kKeyLevel - level);
    return r;
}

double LatticeCache::value(const RelCoords& k, int level)
{
    RelCoords key = Lattice::key(k, level);
    if (auto it = values_.find(key); it != values_.end())
        return it->second;
    const Point p = lattice_.point(k, level);
    const double v = ctx_.eval(p);
    values_.emplace(std::move(key), v);
    if (!elite_ || ctx_.cmp.better(v, elite_value_)) {
        elite_ = p;
        elite_value_ = v;
    }
    return v;
}

LatticeCache::Best LatticeCache::best_moore_neighbor(const RelCoords& k, int level)
{
    const int probe_level = level + 1;
    Best best{doubled(k), 0.0};
    best.value = value(best.k, probe_level);
    const RelCoords centre = best.k;
    for_each_moore_offset(k.size(), [&](const std::vector<int>& delta) {
        RelCoords q = centre;
        for (std::size_t i = 0; i < q.size(); ++i)
            q[i] += delta[i];
        if (!lattice_.inside(q, probe_level))
            return;
        const double v = value(q, probe_level);
        if (ctx_.cmp.better(v, best.value)) {
            best.k = std::move(q);
            best.value = v;
        }
    });
    return best;
}

RelCoords LatticeCache::best_axis_direction(const RelCoords& k, int level)
{
    const int probe_level = level + 1;
    const RelCoords centre = doubled(k);
    const double vc = value(centre, probe_level);
    RelCoords delta(k.size(), 0);
    for (std::size_t i = 0; i < k.size(); ++i) {
        double best = vc;
        for (int s : {-1, 1}) {
            RelCoords q = centre;
            q[i] += s;
            if (!lattice_.inside(q, probe_level))
                continue;
            const double v = value(q, probe_level);
            if (ctx_.cmp.better(v, best)) {
                best = v;
                delta[i] = s;
            }
        }
    }
    return delta;
}

// ---------------------------------------------------------------------------

GridCell initial_cell(const BoxDomain& box)
{
    GridCell c;
    c.lo = box.lo();
    c.base = box.lo();
    c.step.resize(box.dim());
    for (std::size_t i = 0; i < box.dim(); ++i)
        c.step[i] = box.extent(i);
    c.level = 0;
    c.origin.assign(box.dim(), 0);
    return c;
}

void for_each_moore_offset(std::size_t n, const std::function<void(const std::vector<int>&)>& fn)
{
    if (n == 0)
        return;
    std::vector<int> delta(n, -1);
    while (true) {
        if (std::any_of(delta.begin(), delta.end(), [](int d) { return d != 0; }))
            fn(delta);
        // odometer, last axis fastest
        std::size_t i = n;
        while (i > 0) {
            --i;
            if (delta[i] < 1) {
                ++delta[i];
                break;
            }
            delta[i] = -1;
            if (i == 0)
                return;
        }
        if (n == 0)
            return;
    }
}

std::vector<Point> neighborhood(const Point& p, const std::vector<double>& h, const BoxDomain& box)
{
    if (p.size() != box.dim() || h.size() != p.size())
        throw UsageError("neighborhood: dimension mismatch");
    std::vector<Point> out;
    for_each_moore_offset(p.size(), [&](const std::vector<int>& delta) {
        Point q = p;
        for (std::size_t i = 0; i < q.size(); ++i)
            q[i] += delta[i] * h[i];
        if (contains(box, q))
            out.push_back(std::move(q));
    });
    return out;
}

NeighborChoice best_neighbor(EvalContext& ctx, const Point& p, const std::vector<double>& h, const BoxDomain& box)
{
    NeighborChoice out{p, Point(p.size()), ctx.eval(p)};
    for (const Point& q : neighborhood(p, h, box)) {
        const double v = ctx.eval(q);
        if (ctx.cmp.better(v, out.value)) {
            out.best = q;
            out.value = v;
        }
    }
    out.direction = out.best - p;
    return out;
}

int label_by_direction(const Point& d)
{
    for (std::size_t i = d.size(); i-- > 0;) {
        if (d[i] < 0.0)
            return static_cast<int>(i + 1);
    }
    return 0;
}

int label_by_gradient(const Point& w)
{
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] < 0.0)
            return static_cast<int>(i + 1);
    }
    return 0;
}

LabeledVertex label_vertex(LatticeCache& cache, const GridCell& cell, std::size_t corner, Labeling labeling,
                           Probe probe)
{
    return label_impl(cache, cell, corner, labeling, probe).vertex;
}

LabeledVertex label_vertex(EvalContext& ctx, const GridCell& cell, std::size_t corner, Labeling labeling,
                           Probe probe)
{
    LatticeCache cache(ctx, ctx.obj.domain);
    return label_vertex(cache, cell, corner, labeling, probe);
}

bool is_completely_labeled(const std::vector<int>& labels, std::size_t n)
{
    if (labels.size() != checked_corner_count(n))
        throw UsageError("is_completely_labeled: expected 2^n labels");
    return covers_all_labels(labels, n);
}

std::vector<GridCell> subdivide(const GridCell& cell)
{
    if (cell.level + 1 > kMaxLevel)
        throw RefinementLimit();
    const std::size_t m = cell.corner_count();
    std::vector<GridCell> out;
    out.reserve(m);
    for (std::size_t c = 0; c < m; ++c) {
        GridCell child;
        child.lo = cell.lo;
        child.level = cell.level + 1;
        child.step.resize(cell.dim());
        child.origin.resize(cell.dim());
        child.base = Point(cell.dim());
        for (std::size_t i = 0; i < cell.dim(); ++i) {
            child.step[i] = std::ldexp(cell.step[i], -1);
            child.origin[i] = 2 * cell.origin[i] + static_cast<std::int64_t>((c >> i) & 1U);
            child.base[i] = cell.lo[i] + static_cast<double>(child.origin[i]) * child.step[i];
        }
        out.push_back(std::move(child));
    }
    return out;
}

GridCell child_toward(const GridCell& cell, const Point& p)
{
    if (cell.level + 1 > kMaxLevel)
        throw RefinementLimit();
    GridCell child;
    child.lo = cell.lo;
    child.level = cell.level + 1;
    child.step.resize(cell.dim());
    child.origin.resize(cell.dim());
    child.base = Point(cell.dim());
    for (std::size_t i = 0; i < cell.dim(); ++i) {
        child.step[i] = std::ldexp(cell.step[i], -1);
        const double mid = cell.lo[i] + static_cast<double>(2 * cell.origin[i] + 1) * child.step[i];
        const std::int64_t upper = p[i] >= mid ? 1 : 0;
        child.origin[i] = 2 * cell.origin[i] + upper;
        child.base[i] = cell.lo[i] + static_cast<double>(child.origin[i]) * child.step[i];
    }
    return child;
}

Phase1Outcome run_phase1(EvalContext& ctx, const SgmConfig& config, const RoundSink& sink)
{
    return Phase1Runner(ctx, config, sink).run();
}

} // namespace sgm::subdivision
