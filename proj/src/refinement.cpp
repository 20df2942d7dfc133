#include "sgm/refinement.hpp"

#include <algorithm>
#include <cmath>

namespace sgm::refinement {

namespace {

std::size_t direction_count(std::size_t n, const SgmConfig& config)
{
    if (n >= 8 * sizeof(std::size_t) - 1)
        return config.max_directions;
    return std::min<std::size_t>(std::size_t{1} << n, config.max_directions);
}

} // namespace

std::pair<Point, double> select_best_vertex(const Phase1Outcome& outcome, Sense sense)
{
    if (outcome.vertices.empty())
        throw UsageError("select_best_vertex: outcome has no vertices");
    const Comparator plain{sense, 0.0};
    const subdivision::LabeledVertex* best = &outcome.vertices.front();
    for (const auto& v : outcome.vertices) {
        if (plain.better(v.value, best->value) || (v.value == best->value && v.rel < best->rel))
            best = &v;
    }
    return {best->point, best->value};
}

Point diagonal_direction(std::size_t n, std::size_t index)
{
    Point d(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t bit = n - 1 - i;
        if (bit < 8 * sizeof(std::size_t) && ((index >> bit) & 1U))
            d[i] = -1.0;
    }
    return d;
}

std::vector<Point> diagonal_directions(std::size_t n)
{
    if (n == 0 || n > 20)
        throw UsageError("diagonal_directions: dimension must be in 1..20");
    std::vector<Point> out;
    const std::size_t m = std::size_t{1} << n;
    out.reserve(m);
    for (std::size_t k = 0; k < m; ++k)
        out.push_back(diagonal_direction(n, k));
    return out;
}

Point ray_mutate(const Point& s, const Point& dir, double alpha)
{
    if (!(alpha > 0.0))
        throw UsageError("ray_mutate: alpha must be positive");
    if (s.size() != dir.size())
        throw UsageError("ray_mutate: dimension mismatch");
    return s + alpha * dir;
}

std::optional<Candidate> alpha_sweep(const RefineState& state, EvalContext& ctx, const Point& dir,
                                     const SgmConfig& config)
{
    const BoxDomain& box = ctx.obj.domain;
    for (int m = 1; m <= 10; ++m) {
        const Point p = ray_mutate(state.s, dir, m * config.alpha_base * state.scale);
        if (!contains(box, p))
            continue;
        const double v = ctx.eval(p);
        if (ctx.cmp.better(v, state.s_value))
            return Candidate{p, v, 0};
    }
    return std::nullopt;
}

std::optional<Candidate> rotational_sweep(RefineState& state, EvalContext& ctx, const SgmConfig& config)
{
    const std::size_t n = state.s.size();
    const std::size_t dirs = direction_count(n, config);
    const double unit = state.scale * config.alpha_base / 0.1;
    const BoxDomain& box = ctx.obj.domain;
    for (double beta : config.beta_sweep) {
        for (std::size_t k = 0; k < dirs; ++k) {
            if (state.last_direction && *state.last_direction == k)
                continue;
            if (state.rotations_used >= config.trm_max)
                return std::nullopt;
            const Point p = ray_mutate(state.s, diagonal_direction(n, k), beta * unit);
            if (!contains(box, p))
                continue;
            ++state.rotations_used;
            const double v = ctx.eval(p);
            if (ctx.cmp.better(v, state.s_value))
                return Candidate{p, v, k};
        }
    }
    return std::nullopt;
}

Point crossover_midpoint(const Point& p1, const Point& p2)
{
    if (p1.size() != p2.size())
        throw UsageError("crossover_midpoint: dimension mismatch");
    Point m(p1.size());
    for (std::size_t i = 0; i < p1.size(); ++i)
        m[i] = 0.5 * p1[i] + 0.5 * p2[i];
    return m;
}

std::vector<Point> crossover_adjacent_sides(const GridCell& cell, const Point& ray_end)
{
    if (ray_end.size() != cell.dim() || !ray_end.all_finite())
        throw UsageError("crossover_adjacent_sides: bad ray endpoint");
    const std::size_t n = cell.dim();
    // Per-axis choice is the nearest corner in every norm.
    Point corner(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = cell.base[i];
        const double hi = cell.base[i] + cell.step[i];
        corner[i] = std::abs(ray_end[i] - hi) < std::abs(ray_end[i] - lo) ? hi : lo;
    }
    std::vector<Point> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Point other = corner;
        other[i] = corner[i] == cell.base[i] ? cell.base[i] + cell.step[i] : cell.base[i];
        out.push_back(crossover_midpoint(corner, other));
    }
    return out;
}

RunResult run_phase2(const Phase1Outcome& outcome, EvalContext& ctx, const SgmConfig& config,
                     const Phase2Sink& sink)
{
    const std::size_t start_used = ctx.counter.used;
    const std::size_t n = ctx.obj.dim;
    RefineState state;
    std::tie(state.s, state.s_value) = select_best_vertex(outcome, ctx.cmp.sense);
    // Every vertex value also went through the elite update, so the vertex
    // only wins when it beats the elite by the comparator's margin.
    if (outcome.elite && !ctx.cmp.better(state.s_value, outcome.elite_value)) {
        state.s = *outcome.elite;
        state.s_value = outcome.elite_value;
    }
    state.cell = outcome.cell;

    RunResult result;
    result.trace.push_back({0, state.s_value, state.s});
    const std::size_t dirs = direction_count(n, config);
    int stalls = 0;
    std::vector<std::size_t> order(dirs);
    for (std::size_t k = 0; k < dirs; ++k)
        order[k] = k;

    auto emit = [&](const Point& cand, double v, bool accepted) {
        if (sink)
            sink(Phase2Event{result.generations, state.s, cand, v, accepted});
    };

    try {
        while (true) {
            std::optional<Candidate> found;
            for (std::size_t j = 0; j < dirs && !found; ++j) {
                const std::size_t k = order[j];
                found = alpha_sweep(state, ctx, diagonal_direction(n, k), config);
                if (found) {
                    found->direction = k;
                    // Move to front: the next pass starts with what worked last.
                    std::rotate(order.begin(), order.begin() + static_cast<long>(j),
                                order.begin() + static_cast<long>(j) + 1);
                }
            }
            if (!found && state.rotations_used < config.trm_max)
                found = rotational_sweep(state, ctx, config);

            if (!found) {
                if (config.alpha_base * state.scale / 2.0 < config.min_step)
                    break;
                state.scale /= 2.0;
                continue;
            }

            state.last_direction = found->direction;
            Point best = found->point;
            double best_value = found->value;
            emit(best, best_value, true);
            if (state.crossovers_used < config.tc_max) {
                ++state.crossovers_used;
                for (const Point& m : crossover_adjacent_sides(state.cell, found->point)) {
                    if (!contains(ctx.obj.domain, m))
                        continue;
                    const double v = ctx.eval(m);
                    const bool take = ctx.cmp.better(v, best_value);
                    emit(m, v, take);
                    if (take) {
                        best = m;
                        best_value = v;
                    }
                }
            }

            const double gain = std::abs(state.s_value - best_value);
            state.s = std::move(best);
            state.s_value = best_value;
            ++result.generations;
            result.trace.push_back({result.generations, state.s_value, state.s});
            stalls = gain < config.tolerance ? stalls + 1 : 0;
            if (stalls >= 3)
                break;
        }
    } catch (const BudgetExceeded&) {
    }

    result.best_point = state.s;
    result.best_value = state.s_value;
    result.evaluations = ctx.counter.used - start_used;
    attach_deviation(result, ctx.obj);
    return result;
}

} // namespace sgm::refinement
