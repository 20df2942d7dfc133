#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sgm/core.hpp"
#include "sgm/subdivision.hpp"

namespace sgm::bench {

/// Experiment description, usually read from a flat "key = value" file:
///
///     functions   = TP1, BEALE, F1
///     algorithms  = SGM, RS, SA
///     trials      = 50
///     master_seed = 7
///     outputs     = out/run1
///     emit_svg    = true
///     F2.tc       = 11        # per-function SGM overrides
///
/// '#' starts a comment. Override keys are tf, mr, rms, trm, tc, budget and
/// labeling (best_neighbor | gradient).
struct ExperimentSpec {
    std::vector<std::string> functions;
    std::vector<std::string> algorithms{"SGM"};
    std::size_t trials = 50;
    std::uint64_t master_seed = 0;
    std::filesystem::path outputs;
    bool emit_svg = false;
    /// Off writes 0 into wallclock_ms so reruns produce identical files.
    bool wallclock = true;
    /// Samples per random-search trial.
    std::size_t rs_budget = 1000;
    /// Worker threads; 0 means one per hardware thread.
    std::size_t workers = 0;
    std::map<std::string, std::map<std::string, std::string>> overrides;
};

/// Throws ConfigError on unknown keys, unknown names or malformed values.
ExperimentSpec parse_spec(std::istream& in);
ExperimentSpec parse_spec_file(const std::filesystem::path& path);

/// Throws ConfigError unless every function and algorithm resolves and
/// trials >= 1.
void validate(const ExperimentSpec& spec);

/// SGM configuration for a function after applying the spec's overrides.
SgmConfig sgm_config_for(const ExperimentSpec& spec, const Objective& obj);

struct TrialRow {
    std::string function;
    std::string algorithm;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::size_t generations = 0;
    std::size_t evaluations = 0;
    double best_f = 0.0;
    Point best_x;
    double sd = 0.0;
    double wallclock_ms = 0.0;

    friend bool operator==(const TrialRow&, const TrialRow&) = default;
};

struct AggregateRow {
    std::string function;
    std::string algorithm;
    std::size_t trials = 0;
    double median_best_f = 0.0;
    double mean_generations = 0.0;
    double success_rate = 0.0;
    /// DE generations over SGM mean generations, for SGM on F1..F5.
    std::optional<long> png;

    friend bool operator==(const AggregateRow&, const AggregateRow&) = default;
};

struct Report {
    std::vector<TrialRow> trials;
    std::vector<AggregateRow> aggregates;
};

/// ceil(reference_gens / sgm_gens). Throws UsageError when sgm_gens is 0.
long png_ratio(long reference_gens, long sgm_gens);

/// PNG of every function from the DE and RSLMGA reference rows.
std::vector<long> reference_png_row();

/// Max-norm distance to the known optimum within 1e-2 (1e-1 for F5), or a
/// value at least as good as the known optimum's.
bool trial_succeeded(const TrialRow& row, const Objective& obj);

/// Aggregates recomputed from trial rows, in first-appearance order of
/// (function, algorithm).
std::vector<AggregateRow> aggregate(const std::vector<TrialRow>& rows);

/// One trial; the trial index selects the random stream.
TrialRow run_trial(const ExperimentSpec& spec, const std::string& function, const std::string& algorithm,
                   std::size_t trial);

/// All trials, sorted by (function, algorithm, trial) in spec order whatever
/// the worker count. When spec.outputs is set, writes trials.csv,
/// trials_summary.csv, report.json and, if asked, svg/<function>_<algorithm>_<trial>.svg
/// for 2-D functions.
Report run_experiment(const ExperimentSpec& spec);

/// Writes the trial rows to `path` and the aggregates next to it as
/// <stem>_summary.csv. Both files appear atomically. Throws IoError.
void emit_csv(const Report& report, const std::filesystem::path& path);
void emit_json(const Report& report, const std::filesystem::path& path);

std::vector<TrialRow> read_trials_csv(const std::filesystem::path& path);
std::vector<AggregateRow> read_summary_csv(const std::filesystem::path& path);

extern const char* const kTrialHeader;
extern const char* const kSummaryHeader;

/// Renders a 2-D run: domain box, phase-1 cells with vertex labels and the
/// incumbent path. Returns false (and writes nothing) for other dimensions.
bool emit_svg_trace(const Objective& obj, const std::vector<subdivision::RoundSnapshot>& rounds,
                    const std::vector<TraceEntry>& trace, const std::filesystem::path& path);

/// Invariant self-checks (foxholes data, the four-corner labelling example
/// on TP1, analytic gradients); one line per check. True when all pass.
bool run_self_checks(std::ostream& out);

/// Command line entry point: run, solve, tables, validate.
/// Exit codes: 0 success, 1 usage or configuration error, 2 I/O error.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace sgm::bench
