#include "sgm/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sgm {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* what)
{
    if (a != b) {
        throw UsageError(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                         std::to_string(b) + ")");
    }
}

} // namespace

bool Point::all_finite() const noexcept
{
    return std::all_of(coords_.begin(), coords_.end(), [](double x) { return std::isfinite(x); });
}

Point operator+(const Point& a, const Point& b)
{
    require_same_dim(a.size(), b.size(), "Point +");
    Point r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        r[i] = a[i] + b[i];
    return r;
}

Point operator-(const Point& a, const Point& b)
{
    require_same_dim(a.size(), b.size(), "Point -");
    Point r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        r[i] = a[i] - b[i];
    return r;
}

Point operator*(double s, const Point& p)
{
    Point r(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        r[i] = s * p[i];
    return r;
}

double max_norm_distance(const Point& a, const Point& b)
{
    require_same_dim(a.size(), b.size(), "max_norm_distance");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

BoxDomain::BoxDomain(Point lo, Point hi) : lo_(std::move(lo)), hi_(std::move(hi))
{
    require_same_dim(lo_.size(), hi_.size(), "BoxDomain");
    if (lo_.size() == 0)
        throw UsageError("BoxDomain: zero dimension");
    for (std::size_t i = 0; i < lo_.size(); ++i) {
        if (!(std::isfinite(lo_[i]) && std::isfinite(hi_[i]) && lo_[i] < hi_[i]))
            throw UsageError("BoxDomain: need finite lo < hi on axis " + std::to_string(i));
    }
}

BoxDomain BoxDomain::cube(std::size_t n, double lo, double hi)
{
    return BoxDomain(Point(n, lo), Point(n, hi));
}

double BoxDomain::max_extent() const
{
    double m = 0.0;
    for (std::size_t i = 0; i < dim(); ++i)
        m = std::max(m, extent(i));
    return m;
}

Point BoxDomain::center() const
{
    Point c(dim());
    for (std::size_t i = 0; i < dim(); ++i)
        c[i] = lo_[i] + 0.5 * extent(i);
    return c;
}

bool contains(const BoxDomain& box, const Point& p)
{
    require_same_dim(box.dim(), p.size(), "contains");
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(box.lo()[i] <= p[i] && p[i] <= box.hi()[i]))
            return false;
    }
    return true;
}

Point clamp(const BoxDomain& box, const Point& p)
{
    require_same_dim(box.dim(), p.size(), "clamp");
    Point r(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        r[i] = std::clamp(p[i], box.lo()[i], box.hi()[i]);
    return r;
}

// ---------------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(splitmix64(seed ^ splitmix64(stream + 1)))
{
}

double RngStream::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::gaussian()
{
    if (spare_) {
        double v = *spare_;
        spare_.reset();
        return v;
    }
    double u = 0.0, v = 0.0, s = 0.0;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    return u * f;
}

// ---------------------------------------------------------------------------

double counted_eval(const Objective& obj, const Point& p, EvalCounter& counter, RngStream& rng)
{
    if (p.size() != obj.dim)
        throw UsageError(obj.name + ": expected a point of dimension " + std::to_string(obj.dim));
    if (!p.all_finite() || !contains(obj.domain, p))
        throw UsageError(obj.name + ": point outside the domain");
    if (counter.exhausted())
        throw BudgetExceeded();
    ++counter.used;
    return obj.eval(p, rng);
}

double Comparator::worst() const noexcept
{
    return sense == Sense::Min ? std::numeric_limits<double>::infinity()
                               : -std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------

void validate(const SgmConfig& cfg, const BoxDomain& box)
{
    if (cfg.tf_rounds < 0)
        throw ConfigError("tf must be >= 0");
    if (!(cfg.mutation_rate >= 0.0 && cfg.mutation_rate <= 1.0))
        throw ConfigError("mr must lie in [0, 1]");
    if (!(cfg.alpha_base > 0.0))
        throw ConfigError("rms must be positive");
    if (cfg.alpha_base * 10.0 > box.max_extent())
        throw ConfigError("rms * 10 exceeds the largest domain extent");
    if (cfg.trm_max < 0 || cfg.tc_max < 0)
        throw ConfigError("trm and tc must be >= 0");
    if (cfg.beta_sweep.empty())
        throw ConfigError("beta sweep is empty");
    for (std::size_t i = 0; i < cfg.beta_sweep.size(); ++i) {
        if (!(cfg.beta_sweep[i] > 0.0))
            throw ConfigError("beta values must be positive");
        if (i > 0 && !(cfg.beta_sweep[i] > cfg.beta_sweep[i - 1]))
            throw ConfigError("beta sweep must be strictly increasing");
    }
    if (cfg.eval_budget == 0)
        throw ConfigError("budget must be positive");
    if (!(cfg.tolerance > 0.0))
        throw ConfigError("tolerance must be positive");
    if (!(cfg.min_step > 0.0))
        throw ConfigError("min_step must be positive");
    if (cfg.max_directions == 0)
        throw ConfigError("max_directions must be positive");
    if (cfg.noise_samples < 2)
        throw ConfigError("noise_samples must be >= 2");
    if (!(cfg.noise_z >= 0.0))
        throw ConfigError("noise_z must be >= 0");
}

void attach_deviation(RunResult& result, const Objective& obj)
{
    result.sd = 0.0;
    result.sd_vector = Point();
    if (!obj.known_optimum || result.best_point.size() != obj.dim)
        return;
    const Point& opt = obj.known_optimum->point;
    result.sd_vector = Point(obj.dim);
    for (std::size_t i = 0; i < obj.dim; ++i)
        result.sd_vector[i] = std::abs(result.best_point[i] - opt[i]);
    result.sd = max_norm_distance(result.best_point, opt);
}

bool trace_is_monotone(const std::vector<TraceEntry>& trace, Sense sense)
{
    for (std::size_t i = 1; i < trace.size(); ++i) {
        const double prev = trace[i - 1].best_value;
        const double cur = trace[i].best_value;
        if (sense == Sense::Min ? cur > prev : cur < prev)
            return false;
    }
    return true;
}

} // namespace sgm
