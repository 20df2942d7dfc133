#include <cmath>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "sgm/baselines.hpp"
#include "sgm/bench.hpp"
#include "sgm/engine.hpp"
#include "sgm/subdivision.hpp"
#include "sgm/testbed.hpp"

namespace sgm::bench {

namespace {

nlohmann::json result_json(const std::string& name, const RunResult& r)
{
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& e : r.trace)
        trace.push_back({{"generation", e.generation}, {"best_value", e.best_value}, {"best_point", e.best_point.coords()}});
    return {{"function", name},
            {"best_point", r.best_point.coords()},
            {"best_value", r.best_value},
            {"evaluations", r.evaluations},
            {"generations", r.generations},
            {"sd", r.sd},
            {"sd_vector", r.sd_vector.coords()},
            {"wallclock_ms", r.wallclock_ms},
            {"trace", trace}};
}

bool check_labels(std::ostream& out)
{
    const Objective tp1 = testbed::with_domain(testbed::make_objective("TP1"), BoxDomain::cube(2, -1.0, 1.0));
    EvalCounter counter{0, 1000};
    RngStream rng(0, 0);
    EvalContext ctx{tp1, counter, rng, Comparator{}};
    subdivision::LatticeCache cache(ctx, tp1.domain);
    const auto cell = subdivision::initial_cell(tp1.domain);
    // Corner order: (-1,-1), (1,-1), (-1,1), (1,1).
    const int expected[4] = {0, 1, 2, 2};
    std::vector<int> labels;
    bool ok = true;
    for (std::size_t c = 0; c < 4; ++c) {
        labels.push_back(subdivision::label_vertex(cache, cell, c, Labeling::BestNeighbor).label);
        ok = ok && labels.back() == expected[c];
    }
    ok = ok && subdivision::is_completely_labeled(labels, 2);
    bool centre = false;
    for (const auto& child : subdivision::subdivide(cell))
        for (std::size_t c = 0; c < 4; ++c)
            centre = centre || child.corner(c) == Point{0.0, 0.0};
    ok = ok && centre;
    out << (ok ? "ok   " : "FAIL ") << "TP1 corner labels on [-1,1]^2: " << labels[2] << ' ' << labels[3] << ' '
        << labels[0] << ' ' << labels[1] << " (expect 2 2 0 1), centre introduced by subdivision\n";
    return ok;
}

bool check_gradients(std::ostream& out)
{
    bool all = true;
    RngStream rng(12345, 0);
    for (const std::string name : {"TP1", "BEALE", "F1", "F2"}) {
        const Objective obj = testbed::make_objective(name);
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            Point p(obj.dim);
            for (std::size_t i = 0; i < obj.dim; ++i) {
                const double margin = 1e-3 * obj.domain.extent(i);
                p[i] = rng.uniform(obj.domain.lo()[i] + margin, obj.domain.hi()[i] - margin);
            }
            const Point g = testbed::gradient(obj, p);
            const Point fd = testbed::finite_difference_gradient(
                [&](const Point& x) {
                    RngStream unused(0, 0);
                    return obj.eval(x, unused);
                },
                p);
            double gmax = 1.0;
            for (double v : g)
                gmax = std::max(gmax, std::abs(v));
            worst = std::max(worst, max_norm_distance(g, fd) / gmax);
        }
        const bool ok = worst <= 1e-4;
        all = all && ok;
        out << (ok ? "ok   " : "FAIL ") << name << " gradient vs central differences, worst relative error " << worst
            << '\n';
    }
    return all;
}

} // namespace

bool run_self_checks(std::ostream& out)
{
    bool ok = true;
    try {
        testbed::check_foxholes(testbed::load_foxholes(testbed::default_foxholes_path()));
        out << "ok   foxholes matrix " << testbed::default_foxholes_path().string() << '\n';
    } catch (const std::exception& e) {
        out << "FAIL foxholes matrix: " << e.what() << '\n';
        ok = false;
    }
    ok = check_labels(out) && ok;
    ok = check_gradients(out) && ok;
    const auto png = reference_png_row();
    const bool png_ok = png == std::vector<long>{13, 24, 4, 22, 64};
    out << (png_ok ? "ok   " : "FAIL ") << "PNG row from reference tables\n";
    return ok && png_ok;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Sub-dividing genetic method: solver and benchmark harness", "sgm"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run an experiment described by a spec file");
    std::string spec_path;
    std::size_t workers = 0;
    run->add_option("spec", spec_path, "Spec file (key = value lines)")->required();
    run->add_option("--workers", workers, "Worker threads (default: spec value or hardware threads)");

    auto* solve_cmd = app.add_subcommand("solve", "Single SGM run, result printed as JSON");
    std::string function;
    std::optional<int> tf, trm, tc;
    std::optional<double> mr, rms;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> budget;
    std::optional<std::string> labeling;
    solve_cmd->add_option("function", function, "TP1, BEALE or F1..F5")->required();
    solve_cmd->add_option("--tf", tf, "Phase-1 subdivision rounds");
    solve_cmd->add_option("--mr", mr, "Mutation rate");
    solve_cmd->add_option("--rms", rms, "Base ray length");
    solve_cmd->add_option("--trm", trm, "Rotational candidate cap");
    solve_cmd->add_option("--tc", tc, "Crossover cap");
    solve_cmd->add_option("--seed", seed, "Random seed");
    solve_cmd->add_option("--labeling", labeling, "best_neighbor or gradient");
    solve_cmd->add_option("--budget", budget, "Evaluation budget");

    auto* tables = app.add_subcommand("tables", "Print the reference generation table and PNG row");
    auto* validate_cmd = app.add_subcommand("validate", "Run invariant self-checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "sgm: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (*run) {
            ExperimentSpec spec = parse_spec_file(spec_path);
            if (workers)
                spec.workers = workers;
            const Report report = run_experiment(spec);
            for (const auto& f : spec.functions) {
                if (spec.emit_svg && testbed::make_objective(f).dim != 2)
                    err << "note: " << f << " is not 2-D, no SVG traces\n";
            }
            out << "function,algorithm,trials,median_best_f,mean_generations,success_rate,png\n";
            for (const auto& a : report.aggregates) {
                out << a.function << ',' << a.algorithm << ',' << a.trials << ',' << a.median_best_f << ','
                    << a.mean_generations << ',' << a.success_rate << ',' << (a.png ? std::to_string(*a.png) : "")
                    << '\n';
            }
            if (!spec.outputs.empty())
                out << "wrote " << spec.outputs.string() << '\n';
            return 0;
        }
        if (*solve_cmd) {
            const Objective obj = testbed::make_objective(function);
            SgmConfig cfg = default_config(obj);
            if (tf)
                cfg.tf_rounds = *tf;
            if (mr)
                cfg.mutation_rate = *mr;
            if (rms)
                cfg.alpha_base = *rms;
            if (trm)
                cfg.trm_max = *trm;
            if (tc)
                cfg.tc_max = *tc;
            if (seed)
                cfg.seed = *seed;
            if (budget)
                cfg.eval_budget = *budget;
            if (labeling) {
                if (*labeling == "gradient")
                    cfg.labeling = Labeling::Gradient;
                else if (*labeling == "best_neighbor")
                    cfg.labeling = Labeling::BestNeighbor;
                else
                    throw ConfigError("--labeling must be best_neighbor or gradient");
            }
            const RunResult r = solve(obj, cfg);
            out << result_json(obj.name, r).dump(2) << '\n';
            return 0;
        }
        if (*tables) {
            out << "algorithm,F1,F2,F3,F4,F5\n";
            for (const auto& row : baselines::reference_table()) {
                out << row.algorithm;
                for (long g : row.gens)
                    out << ',' << g;
                out << '\n';
            }
            out << "PNG";
            for (long p : reference_png_row())
                out << ',' << p;
            out << '\n';
            return 0;
        }
        if (*validate_cmd)
            return run_self_checks(out) ? 0 : 1;
    } catch (const IoError& e) {
        err << "sgm: " << e.what() << '\n';
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "sgm: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "sgm: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

} // namespace sgm::bench
