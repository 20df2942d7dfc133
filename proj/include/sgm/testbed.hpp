#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sgm/core.hpp"

namespace sgm::testbed {

/// Shekel foxholes constants: a[0][j], a[1][j] is the centre of well j.
struct FoxholesMatrix {
    std::array<std::array<double, 25>, 2> a{};
};

/// Parses a foxholes file (25 non-comment lines "a1 a2") and checks the
/// matrix invariants. Throws IoError on read/parse failure, UsageError when
/// the values break the invariants.
FoxholesMatrix load_foxholes(const std::filesystem::path& path);

/// Throws UsageError unless rows cycle (-32,-16,0,16,32) as documented and
/// every column lies in [-65.536, 65.536]^2.
void check_foxholes(const FoxholesMatrix& m);

/// Default location of the shipped data file; SGM_FOXHOLES overrides it.
std::filesystem::path default_foxholes_path();

/// Process-wide matrix, loaded from default_foxholes_path() on first use.
const FoxholesMatrix& foxholes_matrix();

enum class DeJong { F1, F2, F3, F4, F5 };

double eval_tp1(const Point& p);
double eval_beale(const Point& p);
double eval_dejong(DeJong id, const Point& p, RngStream& rng);

/// F4 without its Gaussian term: sum_i i * x_i^4.
double f4_deterministic(const Point& p);

/// Names accepted by make_objective.
const std::vector<std::string>& objective_names();

/// Builds TP1, BEALE or F1..F5 with domain, known optimum and gradient.
/// Throws UsageError listing the valid names otherwise.
Objective make_objective(std::string_view name);

/// Copy of obj on a different box; the known optimum is dropped if it falls
/// outside the new box.
Objective with_domain(Objective obj, BoxDomain box);

/// Analytic gradient where one exists, central differences for F5.
/// Throws GradientUnavailable for F3/F4 and UsageError unless p is strictly
/// inside the domain.
Point gradient(const Objective& obj, const Point& p);

/// Central finite differences with step 1e-6 * (1 + |x_i|).
Point finite_difference_gradient(const std::function<double(const Point&)>& f, const Point& p);

} // namespace sgm::testbed
