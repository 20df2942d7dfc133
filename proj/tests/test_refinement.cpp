#include "doctest.h"

#include "sgm/refinement.hpp"
#include "sgm/testbed.hpp"

using namespace sgm;
using namespace sgm::refinement;

namespace {

struct Harness {
    Objective obj;
    EvalCounter counter{0, 1000000};
    RngStream rng{0, 0};
    EvalContext ctx{obj, counter, rng, Comparator{}};

    explicit Harness(Objective o) : obj(std::move(o)) {}
};

GridCell unit_cell()
{
    return subdivision::initial_cell(BoxDomain::cube(2, 0.0, 1.0));
}

RefineState state_at(const Objective& obj, Point s)
{
    RngStream rng(0, 0);
    RefineState st;
    st.s_value = obj.eval(s, rng);
    st.s = std::move(s);
    st.cell = subdivision::initial_cell(obj.domain);
    return st;
}

Phase1Outcome outcome_with(const Objective& obj, std::vector<Point> points)
{
    Phase1Outcome out;
    out.cell = subdivision::initial_cell(obj.domain);
    RngStream rng(0, 0);
    std::int64_t r = 0;
    for (auto& p : points) {
        const double v = obj.eval(p, rng);
        out.vertices.push_back({p, {r, r}, 0, v});
        ++r;
    }
    return out;
}

} // namespace

TEST_CASE("diagonal directions")
{
    const auto d2 = diagonal_directions(2);
    CHECK(d2 == std::vector<Point>{{1.0, 1.0}, {1.0, -1.0}, {-1.0, 1.0}, {-1.0, -1.0}});
    CHECK(diagonal_directions(3).size() == 8);
    CHECK(diagonal_direction(3, 0b011) == Point{1.0, -1.0, -1.0});
    CHECK_THROWS_AS(diagonal_directions(0), UsageError);
    CHECK_THROWS_AS(diagonal_directions(21), UsageError);
}

TEST_CASE("ray mutation")
{
    CHECK(ray_mutate(Point{0.5, 0.5}, Point{-1.0, -1.0}, 0.1) == Point{0.4, 0.4});
    CHECK_THROWS_AS(ray_mutate(Point{0.0}, Point{1.0}, 0.0), UsageError);
    CHECK_THROWS_AS(ray_mutate(Point{0.0}, Point{1.0, 1.0}, 0.1), UsageError);
}

TEST_CASE("alpha sweep takes the first improving step")
{
    Harness h(testbed::make_objective("TP1"));
    const RefineState st = state_at(h.obj, Point{0.5, 0.5});
    SgmConfig cfg;
    const auto c = alpha_sweep(st, h.ctx, Point{-1.0, -1.0}, cfg);
    REQUIRE(c);
    CHECK(c->point[0] == doctest::Approx(0.4));
    CHECK(c->point[1] == doctest::Approx(0.4));
    CHECK(h.counter.used == 1);

    // Uphill: all ten steps tried, none accepted.
    CHECK_FALSE(alpha_sweep(st, h.ctx, Point{1.0, 1.0}, cfg));
    CHECK(h.counter.used == 11);
}

TEST_CASE("alpha sweep skips points outside the box")
{
    Harness h(testbed::make_objective("TP1"));
    const RefineState st = state_at(h.obj, Point{15.95, 15.95});
    SgmConfig cfg;
    CHECK_FALSE(alpha_sweep(st, h.ctx, Point{1.0, 1.0}, cfg));
    CHECK(h.counter.used == 0);
}

TEST_CASE("rotational sweep reaches the optimum from (0.1,-0.1)")
{
    Harness h(testbed::make_objective("TP1"));
    RefineState st = state_at(h.obj, Point{0.1, -0.1});
    SgmConfig cfg;
    const auto c = rotational_sweep(st, h.ctx, cfg);
    REQUIRE(c);
    CHECK(c->point[0] == doctest::Approx(0.0));
    CHECK(c->point[1] == doctest::Approx(0.0));
    CHECK(c->direction == 2);
    CHECK(st.rotations_used == 3);
}

TEST_CASE("rotational sweep respects its cap and the last direction")
{
    Harness h(testbed::make_objective("TP1"));
    RefineState st = state_at(h.obj, Point{0.1, -0.1});
    st.last_direction = 2;
    SgmConfig cfg;
    cfg.trm_max = 2;
    CHECK_FALSE(rotational_sweep(st, h.ctx, cfg));
    CHECK(st.rotations_used == 2);
    CHECK(h.counter.used == 2);
}

TEST_CASE("crossover midpoint")
{
    CHECK(crossover_midpoint(Point{0.0, 2.0}, Point{1.0, -2.0}) == Point{0.5, 0.0});
    CHECK_THROWS_AS(crossover_midpoint(Point{0.0}, Point{1.0, 2.0}), UsageError);
}

TEST_CASE("crossover on the sides adjacent to the nearest corner")
{
    const GridCell cell = unit_cell();
    CHECK(crossover_adjacent_sides(cell, Point{0.9, 0.2}) == std::vector<Point>{{0.5, 0.0}, {1.0, 0.5}});
    CHECK(crossover_adjacent_sides(cell, Point{0.1, 0.8}) == std::vector<Point>{{0.5, 1.0}, {0.0, 0.5}});
    // Equidistant: the lower corner.
    CHECK(crossover_adjacent_sides(cell, Point{0.5, 0.5}) == std::vector<Point>{{0.5, 0.0}, {0.0, 0.5}});
    // Points outside the cell use the nearest corner too.
    CHECK(crossover_adjacent_sides(cell, Point{3.0, -2.0}) == std::vector<Point>{{0.5, 0.0}, {1.0, 0.5}});
    CHECK_THROWS_AS(crossover_adjacent_sides(cell, Point{0.5}), UsageError);
}

TEST_CASE("best vertex selection")
{
    const Objective tp1 = testbed::make_objective("TP1");
    const auto out = outcome_with(tp1, {{1.0, 1.0}, {0.5, 0.0}, {-0.5, 0.0}});
    const auto [p, v] = select_best_vertex(out, Sense::Min);
    // (0.5,0) and (-0.5,0) tie; the lower relative coordinates win.
    CHECK(p == Point{0.5, 0.0});
    CHECK(v == testbed::eval_tp1(Point{0.5, 0.0}));
    CHECK(select_best_vertex(out, Sense::Max).first == Point{1.0, 1.0});
    CHECK_THROWS_AS(select_best_vertex(Phase1Outcome{}, Sense::Min), UsageError);
}

TEST_CASE("phase 2 from the optimum makes no progress")
{
    Harness h(testbed::make_objective("TP1"));
    const auto out = outcome_with(h.obj, {{0.0, 0.0}});
    SgmConfig cfg;
    cfg.trm_max = 0;
    cfg.tc_max = 0;
    const RunResult r = run_phase2(out, h.ctx, cfg);
    CHECK(r.generations == 0);
    CHECK(r.best_point == Point{0.0, 0.0});
    CHECK(r.trace.size() == 1);
    CHECK(r.sd == 0.0);
}

TEST_CASE("phase 2 descends to the TP1 optimum")
{
    Harness h(testbed::make_objective("TP1"));
    auto out = outcome_with(h.obj, {{2.0, -1.0}, {3.0, 3.0}});
    out.cell = subdivision::subdivide(subdivision::initial_cell(h.obj.domain))[1];
    SgmConfig cfg;
    std::size_t accepted = 0;
    const RunResult r = run_phase2(out, h.ctx, cfg, [&](const Phase2Event& e) { accepted += e.accepted; });
    CHECK(r.sd < 1e-3);
    CHECK(r.best_value == doctest::Approx(-36.0).epsilon(1e-9));
    CHECK(r.generations >= 1);
    CHECK(accepted >= r.generations);
    CHECK(r.trace.size() == r.generations + 1);
    CHECK(trace_is_monotone(r.trace, Sense::Min));
    CHECK(r.evaluations == h.counter.used);
}

TEST_CASE("phase 2 stops at the budget")
{
    Harness h(testbed::make_objective("BEALE"));
    h.counter.budget = 50;
    const auto out = outcome_with(h.obj, {{0.0, 0.0}});
    const RunResult r = run_phase2(out, h.ctx, SgmConfig{});
    CHECK(h.counter.used == 50);
    CHECK(r.best_value <= 14.203125);
}

TEST_CASE("phase 2 prefers the elite unless a vertex clearly beats it")
{
    Harness h(testbed::make_objective("TP1"));
    auto out = outcome_with(h.obj, {{1.0, 1.0}});
    out.elite = Point{0.0, 0.5};
    out.elite_value = testbed::eval_tp1(*out.elite);
    SgmConfig cfg;
    cfg.trm_max = 0;
    cfg.tc_max = 0;
    h.counter.budget = 0;
    const RunResult r = run_phase2(out, h.ctx, cfg);
    CHECK(r.trace.front().best_point == Point{0.0, 0.5});
}
