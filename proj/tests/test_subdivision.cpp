#include "doctest.h"

#include <cmath>
#include <set>

#include "sgm/subdivision.hpp"
#include "sgm/testbed.hpp"

using namespace sgm;
using namespace sgm::subdivision;

namespace {

struct Harness {
    Objective obj;
    EvalCounter counter{0, 1000000};
    RngStream rng{0, 0};
    EvalContext ctx{obj, counter, rng, Comparator{}};

    explicit Harness(Objective o) : obj(std::move(o)) {}
};

Objective tp1_small()
{
    return testbed::with_domain(testbed::make_objective("TP1"), BoxDomain::cube(2, -1.0, 1.0));
}

/// Independent best-neighbour label: scan {-1,0,1}^n offsets of size h in
/// lexicographic order, keep the first strict improvement over the vertex.
int oracle_label(const Objective& obj, const Point& v, double h)
{
    RngStream rng(0, 0);
    const std::size_t n = v.size();
    double best = obj.eval(v, rng);
    std::vector<int> best_d(n, 0);
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i)
        total *= 3;
    for (std::size_t code = 0; code < total; ++code) {
        std::vector<int> d(n);
        std::size_t c = code;
        for (std::size_t i = n; i-- > 0;) {
            d[i] = static_cast<int>(c % 3) - 1;
            c /= 3;
        }
        Point q = v;
        bool zero = true, inside = true;
        for (std::size_t i = 0; i < n; ++i) {
            zero = zero && d[i] == 0;
            q[i] += d[i] * h;
            inside = inside && q[i] >= obj.domain.lo()[i] && q[i] <= obj.domain.hi()[i];
        }
        if (zero || !inside)
            continue;
        const double f = obj.eval(q, rng);
        if (f < best) {
            best = f;
            best_d = d;
        }
    }
    for (std::size_t i = n; i-- > 0;)
        if (best_d[i] < 0)
            return static_cast<int>(i + 1);
    return 0;
}

} // namespace

TEST_CASE("initial cell spans the box")
{
    const GridCell c = initial_cell(BoxDomain(Point{-1.0, 2.0}, Point{3.0, 4.0}));
    CHECK(c.level == 0);
    CHECK(c.corner_count() == 4);
    CHECK(c.corner(0) == Point{-1.0, 2.0});
    CHECK(c.corner(1) == Point{3.0, 2.0});
    CHECK(c.corner(2) == Point{-1.0, 4.0});
    CHECK(c.corner(3) == Point{3.0, 4.0});
    CHECK(c.center() == Point{1.0, 3.0});
    CHECK(c.diameter() == doctest::Approx(std::sqrt(20.0)));
    CHECK(c.contains(Point{3.0, 4.0}));
    CHECK_FALSE(c.contains(Point{3.5, 4.0}));
}

TEST_CASE("Moore offsets in lexicographic order")
{
    std::vector<std::vector<int>> seen;
    for_each_moore_offset(2, [&](const std::vector<int>& d) { seen.push_back(d); });
    const std::vector<std::vector<int>> expect{{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1},
                                               {1, -1},  {1, 0},  {1, 1}};
    CHECK(seen == expect);
    std::size_t count = 0;
    for_each_moore_offset(4, [&](const std::vector<int>&) { ++count; });
    CHECK(count == 80);
    for_each_moore_offset(0, [&](const std::vector<int>&) { ++count; });
    CHECK(count == 80);
}

TEST_CASE("neighbourhood is clipped to the box")
{
    const BoxDomain box = BoxDomain::cube(2, -1.0, 1.0);
    CHECK(neighborhood(Point{0.0, 0.0}, {0.5, 0.5}, box).size() == 8);
    const auto corner = neighborhood(Point{-1.0, -1.0}, {0.5, 0.5}, box);
    CHECK(corner == std::vector<Point>{{-1.0, -0.5}, {-0.5, -1.0}, {-0.5, -0.5}});
    CHECK_THROWS_AS(neighborhood(Point{0.0}, {0.5, 0.5}, box), UsageError);
}

TEST_CASE("best neighbour keeps the vertex on ties")
{
    Harness h(testbed::make_objective("F1"));
    const auto at_min = best_neighbor(h.ctx, Point{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, h.obj.domain);
    CHECK(at_min.best == Point{0.0, 0.0, 0.0});
    CHECK(at_min.direction == Point{0.0, 0.0, 0.0});
    CHECK(h.counter.used == 27);
    const auto off = best_neighbor(h.ctx, Point{2.0, -2.0, 0.0}, {1.0, 1.0, 1.0}, h.obj.domain);
    CHECK(off.best == Point{1.0, -1.0, 0.0});
    CHECK(off.value == 2.0);
}

TEST_CASE("label rules")
{
    CHECK(label_by_direction(Point{0.0, 0.0}) == 0);
    CHECK(label_by_direction(Point{1.0, 1.0}) == 0);
    CHECK(label_by_direction(Point{-1.0, 1.0}) == 1);
    CHECK(label_by_direction(Point{-1.0, -1.0}) == 2);
    CHECK(label_by_direction(Point{0.0, -1.0, 1.0}) == 2);
    CHECK(label_by_gradient(Point{1.0, 2.0}) == 0);
    CHECK(label_by_gradient(Point{-1.0, -1.0}) == 1);
    CHECK(label_by_gradient(Point{1.0, -1.0, -1.0}) == 2);
}

TEST_CASE("four-corner labelling of TP1 on [-1,1]^2")
{
    Harness h(tp1_small());
    LatticeCache cache(h.ctx, h.obj.domain);
    const GridCell cell = initial_cell(h.obj.domain);
    // corner order (-1,-1), (1,-1), (-1,1), (1,1)
    const int expect[4] = {0, 1, 2, 2};
    std::vector<int> labels;
    for (std::size_t c = 0; c < 4; ++c) {
        const LabeledVertex v = label_vertex(cache, cell, c, Labeling::BestNeighbor);
        CHECK(v.label == expect[c]);
        CHECK(v.point == cell.corner(c));
        CHECK(v.value == testbed::eval_tp1(v.point));
        labels.push_back(v.label);
    }
    CHECK(is_completely_labeled(labels, 2));

    bool centre = false;
    for (const auto& child : subdivide(cell))
        for (std::size_t c = 0; c < 4; ++c)
            centre = centre || child.corner(c) == Point{0.0, 0.0};
    CHECK(centre);
}

TEST_CASE("complete labelling needs every label")
{
    CHECK(is_completely_labeled({0, 1, 2, 2}, 2));
    CHECK_FALSE(is_completely_labeled({0, 1, 1, 1}, 2));
    CHECK(is_completely_labeled({1, 0}, 1));
    CHECK_THROWS_AS(is_completely_labeled({0, 1, 2}, 2), UsageError);
}

TEST_CASE("subdivision halves the cell exactly")
{
    const BoxDomain box = BoxDomain::cube(3, -5.12, 5.12);
    GridCell cell = initial_cell(box);
    const auto kids = subdivide(cell);
    REQUIRE(kids.size() == 8);
    for (std::size_t c = 0; c < 8; ++c) {
        CHECK(kids[c].level == 1);
        CHECK(kids[c].corner(c) == cell.corner(c));
        CHECK(kids[c].corner(7 - c) == cell.center());
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(kids[c].step[i] == 5.12);
    }
    CHECK_THROWS_AS(subdivide(GridCell{cell.lo, cell.base, cell.step, kMaxLevel, cell.origin}), RefinementLimit);
}

TEST_CASE("grid points are exact across levels")
{
    const Lattice lat(BoxDomain::cube(2, -16.0, 16.0));
    GridCell cell = initial_cell(lat.box());
    for (int level = 1; level <= kMaxLevel; ++level) {
        cell = child_toward(cell, Point{0.3, -7.1});
        // Every corner, re-expressed one level finer, lands on the same double.
        for (std::size_t c = 0; c < 4; ++c) {
            RelCoords k = cell.corner_rel(c);
            RelCoords fine = k;
            for (auto& x : fine)
                x *= 2;
            CHECK(lat.point(k, cell.level) == lat.point(fine, cell.level + 1));
            CHECK(lat.point(k, cell.level) == cell.corner(c));
            CHECK(Lattice::key(k, cell.level) == Lattice::key(fine, cell.level + 1));
        }
    }
    CHECK(cell.contains(Point{0.3, -7.1}));
    CHECK_THROWS_AS(child_toward(cell, Point{0.0, 0.0}), RefinementLimit);
}

TEST_CASE("child_toward picks the upper half at the midpoint")
{
    const GridCell cell = initial_cell(BoxDomain::cube(2, -1.0, 1.0));
    const GridCell c = child_toward(cell, Point{0.0, -0.5});
    CHECK(c.base == Point{0.0, -1.0});
    CHECK(c.origin == RelCoords{1, 0});
}

TEST_CASE("labelling matches a brute-force oracle on F1")
{
    Harness h(testbed::make_objective("F1"));
    LatticeCache cache(h.ctx, h.obj.domain);
    GridCell cell = initial_cell(h.obj.domain);
    cell = subdivide(cell)[7];       // origin (1,1,1) at level 1
    cell = subdivide(cell)[0];       // origin (2,2,2) at level 2
    const GridCell lvl2 = subdivide(subdivide(initial_cell(h.obj.domain))[0])[7]; // origin (1,1,1)
    REQUIRE(lvl2.origin == RelCoords{1, 1, 1});
    for (const GridCell* c : std::vector<const GridCell*>{&cell, &lvl2}) {
        for (std::size_t k = 0; k < 8; ++k) {
            const LabeledVertex v = label_vertex(cache, *c, k, Labeling::BestNeighbor);
            CHECK(v.label == oracle_label(h.obj, c->corner(k), c->step[0] / 2));
        }
    }
}

TEST_CASE("axis-wise probe labels agree on separable problems")
{
    Harness h(testbed::make_objective("F1"));
    LatticeCache cache(h.ctx, h.obj.domain);
    const GridCell cell = subdivide(initial_cell(h.obj.domain))[3];
    for (std::size_t k = 0; k < 8; ++k) {
        const int moore = label_vertex(cache, cell, k, Labeling::BestNeighbor, Probe::Moore).label;
        const int axis = label_vertex(cache, cell, k, Labeling::BestNeighbor, Probe::Axis).label;
        CHECK(moore == axis);
    }
}

TEST_CASE("gradient labelling")
{
    Harness h(testbed::make_objective("F1"));
    const GridCell cell = initial_cell(h.obj.domain);
    // At corner (-5.12, 5.12, -5.12) the gradient is (-, +, -): first negative is axis 1.
    CHECK(label_vertex(h.ctx, cell, 2, Labeling::Gradient).label == 1);
    CHECK(label_vertex(h.ctx, cell, 7, Labeling::Gradient).label == 0);
    CHECK(label_vertex(h.ctx, cell, 6, Labeling::Gradient).label == 1);

    Harness f3(testbed::make_objective("F3"));
    CHECK_THROWS_AS(label_vertex(f3.ctx, initial_cell(f3.obj.domain), 0, Labeling::Gradient), GradientUnavailable);
}

TEST_CASE("phase 1 with no subdivision rounds labels the whole box")
{
    Harness h(tp1_small());
    SgmConfig cfg;
    cfg.tf_rounds = 0;
    cfg.mutation_rate = 0.0;
    std::vector<RoundSnapshot> snaps;
    const Phase1Outcome out = run_phase1(h.ctx, cfg, [&](const RoundSnapshot& s) { snaps.push_back(s); });
    CHECK(out.rounds_completed == 0);
    CHECK(out.cell.level == 0);
    CHECK(out.complete);
    REQUIRE(out.vertices.size() == 4);
    CHECK(out.vertices[2].label == 2);
    CHECK(out.vertices[3].label == 2);
    CHECK(out.vertices[0].label == 0);
    CHECK(out.vertices[1].label == 1);
    REQUIRE(snaps.size() == 1);
    CHECK(snaps[0].cells.size() == 1);
    REQUIRE(out.elite);
    CHECK(*out.elite == Point{0.0, 0.0});
    CHECK(out.elite_value == doctest::Approx(-36.0));
    CHECK(out.evaluations == h.counter.used);
}

TEST_CASE("phase 1 rounds shrink the selected cell")
{
    Harness h(testbed::make_objective("TP1"));
    SgmConfig cfg;
    cfg.tf_rounds = 4;
    std::size_t rounds = 0;
    const Phase1Outcome out = run_phase1(h.ctx, cfg, [&](const RoundSnapshot& s) {
        CHECK(s.round == rounds++);
        CHECK(s.selected < s.cells.size());
        CHECK(s.vertices.size() == s.cells.size());
    });
    CHECK(rounds == 5);
    CHECK(out.rounds_completed == 4);
    CHECK(out.cell.level == 4);
    CHECK(out.cell.step[0] == 2.0);
    CHECK(trace_is_monotone(out.trace, Sense::Min));
    for (const auto& v : out.vertices) {
        CHECK(v.label >= 0);
        CHECK(v.label <= 2);
    }
}

TEST_CASE("phase 1 under a tiny budget returns what it has")
{
    Harness h(testbed::make_objective("F1"));
    h.counter.budget = 5;
    SgmConfig cfg;
    const Phase1Outcome out = run_phase1(h.ctx, cfg);
    CHECK(h.counter.used == 5);
    CHECK(out.evaluations == 5);
    CHECK_FALSE(out.complete);
    CHECK(out.elite);
}

TEST_CASE("high-dimensional phase 1 descends axis by axis")
{
    Harness h(testbed::make_objective("F4"));
    SgmConfig cfg;
    cfg.tf_rounds = 2;
    cfg.mutation_rate = 0.0;
    const Phase1Outcome out = run_phase1(h.ctx, cfg);
    CHECK(out.cell.level == 2);
    CHECK(out.vertices.size() == 31);
    CHECK(h.counter.used < 2000);
}
