#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "gridfuse/feeder.hpp"
#include "gridfuse/gp_training.hpp"
#include "gridfuse/imputation.hpp"
#include "gridfuse/matrix_completion.hpp"
#include "gridfuse/result_table.hpp"

namespace gridfuse {

struct ExperimentConfig {
    std::uint64_t seed = 0;
    std::vector<double> missing_fractions = {0.6, 0.4, 0.2, 0.1};
    std::vector<double> fads = {0.5, 0.6, 0.7, 0.8, 0.9};
    double grid_step = 60.0;
    std::vector<ImputationMethod> methods = {ImputationMethod::Gp, ImputationMethod::Linear};
    int trials = 10;

    /// Missing fraction applied before the FAD sweep.
    double fad_missing_fraction = 0.6;
    /// Spacing of DSSE snapshots; a multiple of grid_step.
    double snapshot_step = 900.0;
    double ci_level = 0.95;

    /// Empty: the bundled 37-bus model.
    std::filesystem::path feeder_path;
    double power_factor = 0.87;
    /// noise_seed is ignored; each trial derives its own.
    SamplingConfig sampling;
    /// seed is ignored; each trial derives its own.
    TrainConfig training = default_training();
    CompletionConfig completion;

    /// Worker threads for trials; 0 means hardware concurrency. Results do not
    /// depend on this value.
    int threads = 1;

    static TrainConfig default_training();

    /// Throws InvalidArgument naming the first offending field.
    void validate() const;
};

/// Missing-fraction sweep. Per trial: a training day and a test day are
/// simulated from independent seeds, one shared prior is fitted to the
/// training day's measurements (SCADA thinned to the AMI cadence), and each
/// test-day task is masked (nested across fractions) and imputed on the grid.
///
/// Cells: sweep_name "missing_fraction", metric "rmse_percent" pooled over all
/// tasks of a quantity against the noiseless truth, plus "ci_coverage" for gp.
ResultTable imputation_experiment(const ExperimentConfig& config);

/// FAD sweep at fad_missing_fraction. Every snapshot_step the imputed values
/// feed dsse_snapshot; the same entry subsample is used for every method.
///
/// Cells: sweep_name "fad", metric "mae" for P and Q (load buses, kW / kVAr)
/// and V (all buses, p.u.).
ResultTable fad_sweep(const ExperimentConfig& config);

/// Both sweeps with one trained prior per trial; imputation cells first.
ResultTable run_sweep(const ExperimentConfig& config);

}  // namespace gridfuse
