#include "doctest.h"

#include <cmath>
#include <random>

#include "sgm/core.hpp"

using namespace sgm;

namespace {

// Reference SplitMix64 step, written out independently of the library.
std::uint64_t ref_splitmix(std::uint64_t state)
{
    std::uint64_t z = state + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Objective square_1d()
{
    Objective o;
    o.name = "sq";
    o.dim = 1;
    o.domain = BoxDomain::cube(1, -1.0, 1.0);
    o.eval = [](const Point& p, RngStream&) { return p[0] * p[0]; };
    return o;
}

} // namespace

TEST_CASE("point arithmetic and max-norm distance")
{
    const Point a{1.0, -2.0}, b{0.5, 1.0};
    CHECK(a + b == Point{1.5, -1.0});
    CHECK(a - b == Point{0.5, -3.0});
    CHECK(2.0 * a == Point{2.0, -4.0});
    CHECK(max_norm_distance(a, b) == 3.0);
    CHECK_FALSE(Point{1.0, NAN}.all_finite());
    CHECK_THROWS_AS(max_norm_distance(a, Point{1.0}), UsageError);
}

TEST_CASE("box domain")
{
    const BoxDomain box(Point{-1.0, 0.0}, Point{1.0, 4.0});
    CHECK(box.dim() == 2);
    CHECK(box.extent(1) == 4.0);
    CHECK(box.max_extent() == 4.0);
    CHECK(box.center() == Point{0.0, 2.0});
    CHECK(contains(box, Point{1.0, 4.0}));
    CHECK_FALSE(contains(box, Point{1.0 + 1e-12, 0.0}));
    CHECK(clamp(box, Point{5.0, -3.0}) == Point{1.0, 0.0});
    CHECK_THROWS_AS(contains(box, Point{0.0}), UsageError);
    CHECK_THROWS_AS(BoxDomain(Point{1.0}, Point{0.0}), UsageError);
    CHECK_THROWS_AS(BoxDomain(Point{0.0}, Point{0.0, 1.0}), UsageError);
}

TEST_CASE("splitmix64 matches the reference constants")
{
    // First output of the canonical generator seeded with 0.
    CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
    for (std::uint64_t x : {1ULL, 42ULL, 0xFFFFFFFFFFFFFFFFULL})
        CHECK(splitmix64(x) == ref_splitmix(x));
}

TEST_CASE("random stream follows its documented construction")
{
    RngStream rng(7, 3);
    std::mt19937_64 ref(ref_splitmix(7 ^ ref_splitmix(4)));
    for (int i = 0; i < 100; ++i) {
        const double expect = static_cast<double>(ref() >> 11) * std::ldexp(1.0, -53);
        CHECK(rng.uniform() == expect);
    }
    CHECK(rng.seed() == 7);
    CHECK(rng.stream() == 3);
}

TEST_CASE("random streams are reproducible and distinct")
{
    RngStream a(1, 0), b(1, 0), c(1, 1);
    bool differs = false;
    for (int i = 0; i < 50; ++i) {
        const double x = a.uniform();
        CHECK(x == b.uniform());
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        differs = differs || x != c.uniform();
    }
    CHECK(differs);
}

TEST_CASE("gaussian draws have unit variance")
{
    RngStream rng(11, 0);
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.gaussian();
        s += g;
        s2 += g * g;
    }
    const double mean = s / n;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(s2 / n - mean * mean - 1.0) < 0.02);
}

TEST_CASE("counted evaluation charges the budget and checks the domain")
{
    const Objective o = square_1d();
    EvalCounter counter{0, 2};
    RngStream rng(0, 0);
    CHECK(counted_eval(o, Point{0.5}, counter, rng) == 0.25);
    CHECK(counted_eval(o, Point{-1.0}, counter, rng) == 1.0);
    CHECK(counter.exhausted());
    CHECK_THROWS_AS(counted_eval(o, Point{0.0}, counter, rng), BudgetExceeded);
    CHECK(counter.used == 2);

    EvalCounter fresh{0, 10};
    CHECK_THROWS_AS(counted_eval(o, Point{1.5}, fresh, rng), UsageError);
    CHECK_THROWS_AS(counted_eval(o, Point{NAN}, fresh, rng), UsageError);
    CHECK_THROWS_AS(counted_eval(o, Point{0.0, 0.0}, fresh, rng), UsageError);
    CHECK(fresh.used == 0);
}

TEST_CASE("comparator honours sense and margin")
{
    const Comparator lo{Sense::Min, 0.0}, hi{Sense::Max, 0.0}, gated{Sense::Min, 1.0};
    CHECK(lo.better(1.0, 2.0));
    CHECK_FALSE(lo.better(2.0, 2.0));
    CHECK(hi.better(3.0, 2.0));
    CHECK_FALSE(hi.better(1.0, 2.0));
    CHECK_FALSE(gated.better(1.5, 2.0));
    CHECK(gated.better(0.5, 2.0));
    CHECK(lo.better(1e300, lo.worst()));
    CHECK(hi.better(-1e300, hi.worst()));
}

TEST_CASE("config validation")
{
    const BoxDomain box = BoxDomain::cube(2, -1.0, 1.0);
    CHECK_NOTHROW(validate(SgmConfig{}, box));
    auto bad = [&](auto mutate) {
        SgmConfig c;
        mutate(c);
        CHECK_THROWS_AS(validate(c, box), ConfigError);
    };
    bad([](SgmConfig& c) { c.tf_rounds = -1; });
    bad([](SgmConfig& c) { c.mutation_rate = 1.5; });
    bad([](SgmConfig& c) { c.alpha_base = 0.0; });
    bad([](SgmConfig& c) { c.alpha_base = 0.5; }); // ten steps would span more than the box
    bad([](SgmConfig& c) { c.trm_max = -1; });
    bad([](SgmConfig& c) { c.tc_max = -1; });
    bad([](SgmConfig& c) { c.beta_sweep.clear(); });
    bad([](SgmConfig& c) { c.beta_sweep = {0.5, 0.25}; });
    bad([](SgmConfig& c) { c.beta_sweep = {-0.1}; });
    bad([](SgmConfig& c) { c.eval_budget = 0; });
    bad([](SgmConfig& c) { c.tolerance = 0.0; });
    bad([](SgmConfig& c) { c.min_step = -1.0; });
    bad([](SgmConfig& c) { c.max_directions = 0; });
    bad([](SgmConfig& c) { c.noise_samples = 1; });
}

TEST_CASE("trace monotonicity")
{
    std::vector<TraceEntry> t{{0, 3.0, {}}, {1, 2.0, {}}, {2, 2.0, {}}};
    CHECK(trace_is_monotone(t, Sense::Min));
    CHECK_FALSE(trace_is_monotone(t, Sense::Max));
    t.push_back({3, 2.5, {}});
    CHECK_FALSE(trace_is_monotone(t, Sense::Min));
    CHECK(trace_is_monotone({}, Sense::Min));
}

TEST_CASE("deviation from the known optimum")
{
    Objective o = square_1d();
    o.known_optimum = KnownOptimum{Point{0.0}, 0.0};
    RunResult r;
    r.best_point = Point{-0.25};
    attach_deviation(r, o);
    CHECK(r.sd == 0.25);
    CHECK(r.sd_vector == Point{0.25});
    o.known_optimum.reset();
    attach_deviation(r, o);
    CHECK(r.sd == 0.0);
    CHECK(r.sd_vector.size() == 0);
}
