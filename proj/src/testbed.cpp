#include "sgm/testbed.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#ifndef SGM_DATA_DIR
#define SGM_DATA_DIR "data"
#endif

namespace sgm::testbed {

namespace {

constexpr std::array<double, 5> kFoxRow{-32.0, -16.0, 0.0, 16.0, 32.0};

void require_dim(const Point& p, std::size_t n, const char* name)
{
    if (p.size() != n)
        throw UsageError(std::string(name) + ": expected dimension " + std::to_string(n));
}

double f5_value(const Point& p)
{
    const auto& m = foxholes_matrix();
    double sum = 0.002;
    for (std::size_t j = 0; j < 25; ++j) {
        const double dx = p[0] - m.a[0][j];
        const double dy = p[1] - m.a[1][j];
        sum += 1.0 / (static_cast<double>(j + 1) + std::pow(dx, 6) + std::pow(dy, 6));
    }
    return 1.0 / sum;
}

Point tp1_gradient(const Point& p)
{
    return Point{2.0 * p[0] + 18.0 * std::sin(p[0]), 2.0 * p[1] + 18.0 * std::sin(p[1])};
}

Point beale_gradient(const Point& p)
{
    const double x = p[0], y = p[1];
    const double a = 1.5 - x + x * y;
    const double b = 2.25 - x + x * y * y;
    const double c = 2.625 - x + x * y * y * y;
    const double gx = 2.0 * a * (y - 1.0) + 2.0 * b * (y * y - 1.0) + 2.0 * c * (y * y * y - 1.0);
    const double gy = 2.0 * a * x + 2.0 * b * (2.0 * x * y) + 2.0 * c * (3.0 * x * y * y);
    return Point{gx, gy};
}

Point sphere_gradient(const Point& p)
{
    return 2.0 * p;
}

Point rosenbrock_gradient(const Point& p)
{
    const double x = p[0], y = p[1];
    return Point{400.0 * x * (x * x - y) - 2.0 * (1.0 - x), -200.0 * (x * x - y)};
}

Objective base(std::string name, BoxDomain box)
{
    Objective o;
    o.name = std::move(name);
    o.dim = box.dim();
    o.domain = std::move(box);
    return o;
}

} // namespace

// ---------------------------------------------------------------------------

void check_foxholes(const FoxholesMatrix& m)
{
    for (std::size_t j = 0; j < 25; ++j) {
        if (m.a[0][j] != kFoxRow[j % 5] || m.a[1][j] != kFoxRow[j / 5])
            throw UsageError("foxholes matrix: column " + std::to_string(j + 1) + " breaks the row pattern");
        for (int r = 0; r < 2; ++r) {
            if (std::abs(m.a[r][j]) > 65.536)
                throw UsageError("foxholes matrix: column " + std::to_string(j + 1) + " outside the domain");
        }
    }
}

FoxholesMatrix load_foxholes(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open foxholes file " + path.string());
    FoxholesMatrix m;
    std::size_t col = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        if (col == 25)
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": more than 25 rows");
        std::istringstream row(line);
        double a1 = 0.0, a2 = 0.0;
        std::string extra;
        if (!(row >> a1 >> a2) || (row >> extra))
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected two numbers");
        m.a[0][col] = a1;
        m.a[1][col] = a2;
        ++col;
    }
    if (col != 25)
        throw IoError(path.string() + ": expected 25 rows, found " + std::to_string(col));
    check_foxholes(m);
    return m;
}

std::filesystem::path default_foxholes_path()
{
    if (const char* env = std::getenv("SGM_FOXHOLES"); env && *env)
        return env;
    return std::filesystem::path(SGM_DATA_DIR) / "foxholes.txt";
}

const FoxholesMatrix& foxholes_matrix()
{
    static const FoxholesMatrix m = load_foxholes(default_foxholes_path());
    return m;
}

// ---------------------------------------------------------------------------

double eval_tp1(const Point& p)
{
    require_dim(p, 2, "TP1");
    return p[0] * p[0] + p[1] * p[1] - 18.0 * std::cos(p[0]) - 18.0 * std::cos(p[1]);
}

double eval_beale(const Point& p)
{
    require_dim(p, 2, "BEALE");
    const double x = p[0], y = p[1];
    const double a = 1.5 - x + x * y;
    const double b = 2.25 - x + x * y * y;
    const double c = 2.625 - x + x * y * y * y;
    return a * a + b * b + c * c;
}

double f4_deterministic(const Point& p)
{
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double x2 = p[i] * p[i];
        s += static_cast<double>(i + 1) * x2 * x2;
    }
    return s;
}

double eval_dejong(DeJong id, const Point& p, RngStream& rng)
{
    static const Objective f1 = make_objective("F1"), f2 = make_objective("F2"), f3 = make_objective("F3"),
                           f4 = make_objective("F4"), f5 = make_objective("F5");
    const Objective* o = nullptr;
    switch (id) {
    case DeJong::F1: o = &f1; break;
    case DeJong::F2: o = &f2; break;
    case DeJong::F3: o = &f3; break;
    case DeJong::F4: o = &f4; break;
    case DeJong::F5: o = &f5; break;
    }
    require_dim(p, o->dim, o->name.c_str());
    if (!p.all_finite() || !contains(o->domain, p))
        throw UsageError(o->name + ": point outside the domain");
    return o->eval(p, rng);
}

const std::vector<std::string>& objective_names()
{
    static const std::vector<std::string> names{"TP1", "BEALE", "F1", "F2", "F3", "F4", "F5"};
    return names;
}

Objective make_objective(std::string_view name)
{
    if (name == "TP1") {
        Objective o = base("TP1", BoxDomain::cube(2, -16.0, 16.0));
        o.eval = [](const Point& p, RngStream&) { return eval_tp1(p); };
        o.gradient = tp1_gradient;
        o.known_optimum = KnownOptimum{Point{0.0, 0.0}, -36.0};
        return o;
    }
    if (name == "BEALE") {
        Objective o = base("BEALE", BoxDomain::cube(2, -4.5, 4.5));
        o.eval = [](const Point& p, RngStream&) { return eval_beale(p); };
        o.gradient = beale_gradient;
        o.known_optimum = KnownOptimum{Point{3.0, 0.5}, 0.0};
        return o;
    }
    if (name == "F1") {
        Objective o = base("F1", BoxDomain::cube(3, -5.12, 5.12));
        o.eval = [](const Point& p, RngStream&) {
            double s = 0.0;
            for (double x : p)
                s += x * x;
            return s;
        };
        o.gradient = sphere_gradient;
        o.known_optimum = KnownOptimum{Point(3, 0.0), 0.0};
        return o;
    }
    if (name == "F2") {
        Objective o = base("F2", BoxDomain::cube(2, -2.048, 2.048));
        o.eval = [](const Point& p, RngStream&) {
            const double t = p[0] * p[0] - p[1];
            return 100.0 * t * t + (1.0 - p[0]) * (1.0 - p[0]);
        };
        o.gradient = rosenbrock_gradient;
        o.known_optimum = KnownOptimum{Point{1.0, 1.0}, 0.0};
        return o;
    }
    if (name == "F3") {
        Objective o = base("F3", BoxDomain::cube(5, -5.12, 5.12));
        o.eval = [](const Point& p, RngStream&) {
            double s = 30.0;
            for (double x : p)
                s += std::floor(x);
            return s;
        };
        o.known_optimum = KnownOptimum{Point(5, -5.12), 0.0};
        return o;
    }
    if (name == "F4") {
        Objective o = base("F4", BoxDomain::cube(30, -1.28, 1.28));
        o.eval = [](const Point& p, RngStream& rng) {
            double s = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) {
                const double x2 = p[i] * p[i];
                s += static_cast<double>(i + 1) * x2 * x2 + rng.gaussian();
            }
            return s;
        };
        o.known_optimum = KnownOptimum{Point(30, 0.0), 0.0};
        o.stochastic = true;
        return o;
    }
    if (name == "F5") {
        Objective o = base("F5", BoxDomain::cube(2, -65.536, 65.536));
        o.eval = [](const Point& p, RngStream&) { return f5_value(p); };
        o.gradient = [](const Point& p) { return finite_difference_gradient(f5_value, p); };
        const Point best{-32.0, -32.0};
        o.known_optimum = KnownOptimum{best, f5_value(best)};
        return o;
    }
    std::string msg = "unknown objective '" + std::string(name) + "'; valid names:";
    for (const auto& n : objective_names())
        msg += " " + n;
    throw UsageError(msg);
}

Objective with_domain(Objective obj, BoxDomain box)
{
    if (box.dim() != obj.dim)
        throw UsageError(obj.name + ": domain dimension mismatch");
    obj.domain = std::move(box);
    if (obj.known_optimum && !contains(obj.domain, obj.known_optimum->point))
        obj.known_optimum.reset();
    return obj;
}

Point finite_difference_gradient(const std::function<double(const Point&)>& f, const Point& p)
{
    Point g(p.size());
    Point x = p;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double h = 1e-6 * (1.0 + std::abs(p[i]));
        x[i] = p[i] + h;
        const double up = f(x);
        x[i] = p[i] - h;
        const double down = f(x);
        x[i] = p[i];
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

Point gradient(const Objective& obj, const Point& p)
{
    if (!obj.has_gradient())
        throw GradientUnavailable(obj.name + " has no gradient; use best-neighbour labelling");
    if (p.size() != obj.dim)
        throw UsageError(obj.name + ": gradient point has wrong dimension");
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(obj.domain.lo()[i] < p[i] && p[i] < obj.domain.hi()[i]))
            throw UsageError(obj.name + ": gradient requires a point strictly inside the domain");
    }
    return obj.gradient(p);
}

} // namespace sgm::testbed
