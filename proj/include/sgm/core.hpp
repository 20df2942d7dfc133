#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgm {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Caller violated a precondition (bad dimension, unknown name, ...).
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Solver configuration is invalid for the objective at hand.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised by counted_eval when the evaluation budget is spent. Solvers catch
/// it and return their best-so-far result.
struct BudgetExceeded : std::runtime_error {
    BudgetExceeded() : std::runtime_error("evaluation budget exhausted") {}
};

/// The objective has no usable gradient (F3 is piecewise constant, F4 noisy).
struct GradientUnavailable : ConfigError {
    using ConfigError::ConfigError;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Point and box geometry
// ---------------------------------------------------------------------------

class Point {
public:
    Point() = default;
    explicit Point(std::size_t n, double fill = 0.0) : coords_(n, fill) {}
    Point(std::initializer_list<double> xs) : coords_(xs) {}
    explicit Point(std::vector<double> xs) : coords_(std::move(xs)) {}

    std::size_t size() const noexcept { return coords_.size(); }
    double& operator[](std::size_t i) { return coords_[i]; }
    double operator[](std::size_t i) const { return coords_[i]; }

    auto begin() noexcept { return coords_.begin(); }
    auto end() noexcept { return coords_.end(); }
    auto begin() const noexcept { return coords_.begin(); }
    auto end() const noexcept { return coords_.end(); }

    const std::vector<double>& coords() const noexcept { return coords_; }

    bool all_finite() const noexcept;

    friend bool operator==(const Point&, const Point&) = default;

private:
    std::vector<double> coords_;
};

Point operator+(const Point& a, const Point& b);
Point operator-(const Point& a, const Point& b);
Point operator*(double s, const Point& p);

/// Largest absolute componentwise difference.
double max_norm_distance(const Point& a, const Point& b);

/// Closed axis-aligned box lo <= x <= hi.
class BoxDomain {
public:
    BoxDomain(Point lo, Point hi);

    /// Same interval [lo, hi] on every one of n axes.
    static BoxDomain cube(std::size_t n, double lo, double hi);

    const Point& lo() const noexcept { return lo_; }
    const Point& hi() const noexcept { return hi_; }
    std::size_t dim() const noexcept { return lo_.size(); }
    double extent(std::size_t i) const { return hi_[i] - lo_[i]; }
    double max_extent() const;
    Point center() const;

private:
    Point lo_;
    Point hi_;
};

bool contains(const BoxDomain& box, const Point& p);
Point clamp(const BoxDomain& box, const Point& p);

// ---------------------------------------------------------------------------
// Random streams
// ---------------------------------------------------------------------------

/// Deterministic random stream identified by (seed, stream index).
///
/// Contract, so other implementations can reproduce the sequences:
///   state seed  = splitmix64(seed ^ splitmix64(stream + 1))
///   engine      = std::mt19937_64 seeded with that single 64-bit value
///   uniform()   = (engine() >> 11) * 2^-53, in [0, 1)
///   gaussian()  = Marsaglia polar method on 2*uniform()-1 pairs; the second
///                 variate of each accepted pair is returned on the next call.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream);

    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double gaussian();

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// ---------------------------------------------------------------------------
// Objectives and evaluation accounting
// ---------------------------------------------------------------------------

enum class Sense { Min, Max };

struct KnownOptimum {
    Point point;
    double value = 0.0;
};

struct Objective {
    std::string name;
    std::size_t dim = 0;
    BoxDomain domain = BoxDomain::cube(1, 0.0, 1.0);
    /// The stream argument is only consumed by stochastic objectives.
    std::function<double(const Point&, RngStream&)> eval;
    /// Empty when no gradient exists (piecewise constant or noisy functions).
    std::function<Point(const Point&)> gradient;
    std::optional<KnownOptimum> known_optimum;
    bool stochastic = false;

    bool has_gradient() const noexcept { return static_cast<bool>(gradient); }
};

struct EvalCounter {
    std::size_t used = 0;
    std::size_t budget = 0;

    bool exhausted() const noexcept { return used >= budget; }
};

/// Evaluates obj at p and charges one unit against the counter.
/// Throws BudgetExceeded (without evaluating) once the budget is spent.
double counted_eval(const Objective& obj, const Point& p, EvalCounter& counter, RngStream& rng);

/// Strict "better than" in the configured sense. A positive margin makes the
/// comparison demand a clear win, which is how noisy objectives are handled.
struct Comparator {
    Sense sense = Sense::Min;
    double margin = 0.0;

    bool better(double candidate, double incumbent) const noexcept
    {
        return sense == Sense::Min ? candidate < incumbent - margin : candidate > incumbent + margin;
    }
    /// Worst possible value in this sense, used to seed running bests.
    double worst() const noexcept;
};

/// Everything a solver needs to charge evaluations: objective, counter,
/// random stream and the comparison rule. Single-owner, one per run.
struct EvalContext {
    const Objective& obj;
    EvalCounter& counter;
    RngStream& rng;
    Comparator cmp;

    double eval(const Point& p) { return counted_eval(obj, p, counter, rng); }
};

// ---------------------------------------------------------------------------
// Configuration and results
// ---------------------------------------------------------------------------

enum class Labeling { BestNeighbor, Gradient };

struct SgmConfig {
    Sense sense = Sense::Min;
    int tf_rounds = 3;          // TF
    double mutation_rate = 0.5; // MR
    double alpha_base = 0.1;    // RMS
    int trm_max = 50;           // TRM
    int tc_max = 20;            // TC
    std::vector<double> beta_sweep{0.1, 0.25, 0.5, 0.75, 1.0};
    Labeling labeling = Labeling::BestNeighbor;
    std::size_t eval_budget = 100000;
    double tolerance = 1e-10;
    std::uint64_t seed = 0;

    /// Phase 2 stops refining once the base ray length falls below this.
    double min_step = 1e-6;
    /// Diagonal directions tried per ray pass (2^n is capped to this).
    std::size_t max_directions = 64;
    /// Above this dimension phase 1 bisects axis by axis instead of
    /// enumerating all 2^n corners and 3^n - 1 neighbours.
    std::size_t max_enum_dim = 6;
    /// Stochastic objectives: repeated evaluations used to estimate the noise
    /// scale, and the z-score a candidate must beat the incumbent by.
    std::size_t noise_samples = 64;
    double noise_z = 6.0;
};

/// Throws ConfigError on any violated invariant of cfg relative to box.
void validate(const SgmConfig& cfg, const BoxDomain& box);

struct TraceEntry {
    std::size_t generation = 0;
    double best_value = 0.0;
    Point best_point;
};

struct RunResult {
    Point best_point;
    double best_value = 0.0;
    std::size_t evaluations = 0;
    std::size_t generations = 0;
    /// Max-norm deviation from the known optimum (0 when unknown).
    double sd = 0.0;
    /// Componentwise |best - known| (empty when unknown).
    Point sd_vector;
    std::vector<TraceEntry> trace;
    double wallclock_ms = 0.0;
};

/// Fills sd and sd_vector from obj.known_optimum.
void attach_deviation(RunResult& result, const Objective& obj);

/// True when values in the trace never worsen in the given sense.
bool trace_is_monotone(const std::vector<TraceEntry>& trace, Sense sense);

} // namespace sgm
