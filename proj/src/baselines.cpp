#include "sgm/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace sgm::baselines {

namespace {

Point uniform_point(const BoxDomain& box, RngStream& rng)
{
    Point p(box.dim());
    for (std::size_t i = 0; i < box.dim(); ++i)
        p[i] = rng.uniform(box.lo()[i], box.hi()[i]);
    return p;
}

} // namespace

RunResult random_search(const Objective& obj, std::size_t budget, RngStream& rng, Sense sense)
{
    if (budget == 0)
        throw UsageError("random_search: budget must be at least 1");
    const Comparator cmp{sense, 0.0};
    EvalCounter counter{0, budget};
    RunResult r;
    r.best_value = cmp.worst();
    for (std::size_t k = 0; k < budget; ++k) {
        Point p = uniform_point(obj.domain, rng);
        const double v = counted_eval(obj, p, counter, rng);
        if (k == 0 || cmp.better(v, r.best_value)) {
            r.best_value = v;
            r.best_point = std::move(p);
            r.trace.push_back({k, r.best_value, r.best_point});
        }
    }
    r.evaluations = counter.used;
    r.generations = budget;
    attach_deviation(r, obj);
    return r;
}

void validate(const SaConfig& cfg)
{
    if (!(cfg.t0 > 0.0))
        throw ConfigError("SA: initial temperature must be positive");
    if (!(cfg.cooling > 0.0 && cfg.cooling < 1.0))
        throw ConfigError("SA: cooling factor must lie in (0, 1)");
    if (cfg.steps_per_temp < 1)
        throw ConfigError("SA: steps per temperature must be at least 1");
    if (!(cfg.scale >= 0.0))
        throw ConfigError("SA: proposal scale must be non-negative");
    if (!(cfg.t_min > 0.0))
        throw ConfigError("SA: final temperature must be positive");
    if (cfg.budget == 0)
        throw ConfigError("SA: budget must be at least 1");
}

RunResult simulated_annealing(const Objective& obj, const SaConfig& cfg, RngStream& rng, Sense sense)
{
    validate(cfg);
    const BoxDomain& box = obj.domain;
    const Comparator cmp{sense, 0.0};
    const double sign = sense == Sense::Min ? 1.0 : -1.0;
    EvalCounter counter{0, cfg.budget};

    Point x = uniform_point(box, rng);
    double fx = counted_eval(obj, x, counter, rng);
    RunResult r;
    r.best_point = x;
    r.best_value = fx;
    r.trace.push_back({0, fx, x});

    double t = cfg.t0;
    try {
        while (t >= cfg.t_min) {
            for (int s = 0; s < cfg.steps_per_temp; ++s) {
                Point y = x;
                for (std::size_t i = 0; i < y.size(); ++i)
                    y[i] += cfg.scale * box.extent(i) * rng.gaussian();
                y = clamp(box, y);
                const double fy = counted_eval(obj, y, counter, rng);
                const double delta = sign * (fy - fx);
                if (delta <= 0.0 || rng.uniform() < std::exp(-delta / t)) {
                    x = std::move(y);
                    fx = fy;
                }
                if (cmp.better(fx, r.best_value)) {
                    r.best_value = fx;
                    r.best_point = x;
                    r.trace.push_back({r.generations, fx, x});
                }
            }
            ++r.generations;
            t *= cfg.cooling;
        }
    } catch (const BudgetExceeded&) {
    }
    r.evaluations = counter.used;
    attach_deviation(r, obj);
    return r;
}

const std::vector<ReferenceRow>& reference_table()
{
    static const std::vector<ReferenceRow> rows{
        {"PGA(lambda=4)", {1170, 1235, 3481, 3194, 1256}},
        {"PGA(lambda=8)", {1526, 1671, 3634, 5243, 2076}},
        {"Grefensstette", {2210, 14229, 2259, 3070, 4334}},
        {"Eshelman", {1538, 9477, 1740, 4137, 3004}},
        {"DE(F: RandomValues)", {260, 670, 125, 2300, 1200}},
        {"RSLMGA", {20, 29, 32, 107, 19}},
    };
    return rows;
}

const ReferenceRow& reference_row(const std::string& algorithm)
{
    const auto& rows = reference_table();
    auto it = std::find_if(rows.begin(), rows.end(), [&](const ReferenceRow& r) { return r.algorithm == algorithm; });
    if (it == rows.end())
        throw UsageError("no reference row named '" + algorithm + "'");
    return *it;
}

} // namespace sgm::baselines
