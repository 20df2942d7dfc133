#pragma once

#include <array>
#include <string>
#include <vector>

#include "sgm/core.hpp"

namespace sgm::baselines {

/// Uniform sampling of the box, `budget` counted evaluations.
RunResult random_search(const Objective& obj, std::size_t budget, RngStream& rng, Sense sense = Sense::Min);

struct SaConfig {
    double t0 = 10.0;
    double cooling = 0.95;
    int steps_per_temp = 20;
    /// Proposal standard deviation as a fraction of each axis extent.
    double scale = 0.1;
    /// Annealing ends once the temperature drops below this...
    double t_min = 1e-8;
    /// ...or after this many evaluations.
    std::size_t budget = 10000;
};

/// Throws ConfigError on t0 <= 0, cooling outside (0,1), steps < 1,
/// negative scale, t_min <= 0 or budget 0.
void validate(const SaConfig& cfg);

/// Metropolis acceptance with geometric cooling from a uniform random start.
/// Gaussian proposals are clamped to the box. Returns the best point ever
/// evaluated; one generation per temperature level.
RunResult simulated_annealing(const Objective& obj, const SaConfig& cfg, RngStream& rng, Sense sense = Sense::Min);

/// Published generation counts on F1..F5.
struct ReferenceRow {
    std::string algorithm;
    std::array<long, 5> gens{};
};

/// Static rows: PGA(lambda=4), PGA(lambda=8), Grefensstette, Eshelman,
/// DE(F: RandomValues), RSLMGA.
const std::vector<ReferenceRow>& reference_table();

/// Row by exact algorithm name; throws UsageError when absent.
const ReferenceRow& reference_row(const std::string& algorithm);

} // namespace sgm::baselines
