#include "sgm/engine.hpp"

#include <chrono>
#include <cmath>

namespace sgm {

namespace {

double noise_margin(EvalContext& ctx, const SgmConfig& config)
{
    const Point centre = ctx.obj.domain.center();
    double mean = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < config.noise_samples; ++k) {
        const double v = ctx.eval(centre);
        const double d = v - mean;
        mean += d / static_cast<double>(k + 1);
        m2 += d * (v - mean);
    }
    const double sd = std::sqrt(m2 / static_cast<double>(config.noise_samples - 1));
    return config.noise_z * sd * std::sqrt(2.0);
}

} // namespace

SgmConfig default_config(const Objective& obj)
{
    SgmConfig c;
    auto set = [&](int tf, int trm, int tc) {
        c.tf_rounds = tf;
        c.trm_max = trm;
        c.tc_max = tc;
    };
    if (obj.name == "F1")
        set(2, 15, 3);
    else if (obj.name == "F2")
        set(2, 16, 11);
    else if (obj.name == "F3")
        set(2, 25, 5);
    else if (obj.name == "F4")
        set(2, 75, 30);
    else if (obj.name == "F5")
        set(8, 9, 2);
    return c;
}

SolverHandle::SolverHandle(Objective obj, SgmConfig config) : obj_(std::move(obj)), config_(std::move(config))
{
    if (!obj_.eval)
        throw UsageError(obj_.name + ": objective has no evaluation function");
    if (obj_.domain.dim() != obj_.dim)
        throw UsageError(obj_.name + ": domain dimension mismatch");
    validate(config_, obj_.domain);
    if (config_.labeling == Labeling::Gradient && !obj_.has_gradient())
        throw GradientUnavailable(obj_.name + " has no gradient; use best-neighbour labelling");
}

RunResult SolverHandle::solve(const SolveHooks& hooks) const
{
    RngStream rng(config_.seed, 0);
    return solve(rng, hooks);
}

RunResult SolverHandle::solve(RngStream& rng, const SolveHooks& hooks) const
{
    const auto t0 = std::chrono::steady_clock::now();
    EvalCounter counter{0, config_.eval_budget};
    EvalContext ctx{obj_, counter, rng, Comparator{config_.sense, 0.0}};

    RunResult result;
    try {
        if (obj_.stochastic)
            ctx.cmp.margin = noise_margin(ctx, config_);
    } catch (const BudgetExceeded&) {
    }

    const subdivision::Phase1Outcome p1 = subdivision::run_phase1(ctx, config_, hooks.rounds);
    if (p1.vertices.empty()) {
        // Budget ran out before a single vertex was labelled.
        result.trace = p1.trace;
        if (p1.elite) {
            result.best_point = *p1.elite;
            result.best_value = p1.elite_value;
        }
        result.generations = p1.rounds_completed;
    } else {
        RunResult p2 = refinement::run_phase2(p1, ctx, config_, hooks.phase2);
        result.best_point = p2.best_point;
        result.best_value = p2.best_value;
        result.generations = p1.rounds_completed + p2.generations;
        result.trace = p1.trace;
        for (auto& e : p2.trace) {
            // The phase-2 start repeats the phase-1 elite unless a vertex beat it.
            if (!result.trace.empty() && result.trace.back().best_value == e.best_value &&
                result.trace.back().best_point == e.best_point)
                continue;
            e.generation += p1.rounds_completed;
            result.trace.push_back(std::move(e));
        }
    }
    result.evaluations = counter.used;
    attach_deviation(result, obj_);
    result.wallclock_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

RunResult solve(const Objective& obj, const SgmConfig& config)
{
    return SolverHandle(obj, config).solve();
}

RunResult solve(const Objective& obj, const SgmConfig& config, RngStream& rng, const SolveHooks& hooks)
{
    return SolverHandle(obj, config).solve(rng, hooks);
}

} // namespace sgm
