#pragma once

#include "sgm/core.hpp"
#include "sgm/refinement.hpp"
#include "sgm/subdivision.hpp"

namespace sgm {

/// Tuned parameters for F1..F5 by name, generic defaults (TF 3, TRM 50,
/// TC 20) for anything else. MR 0.5 and RMS 0.1 throughout.
SgmConfig default_config(const Objective& obj);

struct SolveHooks {
    subdivision::RoundSink rounds;
    refinement::Phase2Sink phase2;
};

/// Objective and configuration checked against each other once: the config
/// must validate on the objective's box, and gradient labelling needs a
/// gradient.
class SolverHandle {
public:
    SolverHandle(Objective obj, SgmConfig config);

    const Objective& objective() const noexcept { return obj_; }
    const SgmConfig& config() const noexcept { return config_; }

    RunResult solve(const SolveHooks& hooks = {}) const;
    RunResult solve(RngStream& rng, const SolveHooks& hooks = {}) const;

private:
    Objective obj_;
    SgmConfig config_;
};

/// Phase 1 then phase 2 under one counter and one stream (config.seed,
/// stream 0). For stochastic objectives the comparisons demand a margin
/// estimated from repeated evaluations of the box centre.
RunResult solve(const Objective& obj, const SgmConfig& config);
RunResult solve(const Objective& obj, const SgmConfig& config, RngStream& rng, const SolveHooks& hooks = {});

} // namespace sgm
