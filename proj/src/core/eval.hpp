#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/datasets.hpp"
#include "core/narx.hpp"
#include "core/pruning.hpp"
#include "core/termlib.hpp"

namespace narxprune {

// R-squared of `pruned` against `baseline` treated as ground truth:
// 1 - sum((pruned - baseline)^2) / sum((baseline - mean(baseline))^2).
// Throws std::invalid_argument on length mismatch or length < 2 and
// DataError("degenerate baseline") when the baseline has zero variance.
double coefficient_r2(const Eigen::VectorXd& baseline, const Eigen::VectorXd& pruned);

double median_of(std::vector<double> values);

// Everything the repeated-trial protocol needs: the full-data baseline model
// and the selected-term feature matrix that pruning operates on.
struct EvalContext {
    Dataset dataset;
    ModelPreset preset;
    DatasetLibrary library;
    TermSelection terms;                    // m library rows, selection order
    ReducedNarxModel baseline;              // fitted on every training sample
    Eigen::VectorXd baseline_coefficients;  // [theta_1..theta_m, theta_0]
    Eigen::MatrixXd features;               // m x N, rows follow `terms`
    std::vector<std::string> column_tags;   // trajectory tag per sample column

    int n_features() const { return static_cast<int>(features.rows()); }
    int n_samples() const { return static_cast<int>(features.cols()); }
};

EvalContext build_context(const Dataset& dataset, const ModelPreset& preset);

// Context around an already-fitted model: the library is rebuilt from the
// model's lag/degree config, the model's terms are located in it, and its
// stored coefficients become the baseline (no term re-selection, no refit).
EvalContext context_from_model(const Dataset& dataset, const ReducedNarxModel& model,
                               const std::string& preset_name);

struct TrialReport {
    int trial = 0;
    std::uint64_t seed = 0;
    PruneMethod method = PruneMethod::random;
    std::vector<int> selected_indices;       // selection order
    std::vector<double> refit_coefficients;  // [theta_1..theta_m, theta_0]
    double r2 = 0.0;
    double runtime_ms = 0.0;
    std::string error;  // empty on success

    bool ok() const { return error.empty(); }
};

// Aggregates over the successful trials; NaN when every trial failed.
struct TrialSummary {
    int trials = 0;
    int failures = 0;
    double median = 0.0;
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation, n - 1 denominator
};

TrialSummary summarize(const std::vector<TrialReport>& reports);

struct TrialOptions {
    PruneMethod method = PruneMethod::minibatch_fastcan;
    int n = 100;
    int q = 15;                       // atoms; ignored by random pruning
    std::optional<int> batch_size;    // p; omitted -> ceil(n/q) capped at m
    int trials = 10;
    std::uint64_t base_seed = 0;
    int jobs = 1;                     // <= 0: hardware concurrency
};

struct TrialSet {
    TrialOptions options;
    int resolved_batch_size = 0;  // 0 for random pruning
    std::vector<TrialReport> reports;
    TrialSummary summary;
};

// Trial i prunes with seed base_seed + i (dictionary re-learned per trial),
// refits the baseline terms on the selected samples, and scores the refit
// coefficients against the baseline's. Per-trial failures are captured in the
// report, not thrown. Deterministic for fixed options regardless of `jobs`.
TrialSet run_trials(const EvalContext& context, const TrialOptions& options);

enum class SweepAxis { atom_size, batch_size, sample_size };

std::string axis_name(SweepAxis axis);
SweepAxis axis_from_name(const std::string& name);

struct SweepPoint {
    int value = 0;
    int resolved_batch_size = 0;
    TrialSummary summary;
};

struct SweepReport {
    SweepAxis axis = SweepAxis::atom_size;
    TrialOptions base;  // the swept field is overridden per grid point
    std::vector<int> grid;
    std::vector<SweepPoint> points;
    int best_value = 0;  // highest median; ties break to the lower grid value
};

// Runs run_trials once per grid value. Sweeping atom size clears any
// requested batch size so the default rule applies at every q.
SweepReport sweep(const EvalContext& context, SweepAxis axis, const std::vector<int>& grid,
                  const TrialOptions& base);

struct SeriesFreeRun {
    std::string label;
    double r2 = 0.0;    // NaN when diverged
    double rmse = 0.0;  // NaN when diverged
    bool diverged = false;
};

// Baseline-quality metrics: one-step-ahead R^2 over the pooled training
// samples and a free-run comparison per test trajectory (warmup samples are
// the measured outputs and are excluded from the metrics).
struct FitAssessment {
    double train_one_step_r2 = 0.0;
    std::vector<SeriesFreeRun> test_free_runs;
};

FitAssessment assess_fit(const EvalContext& context);

struct PcaProjection {
    Eigen::MatrixXd sample_points;  // N x 2
    Eigen::MatrixXd extra_points;   // rows match extras columns
    Eigen::Vector2d variances;      // per-component variance, descending
};

// Projects the sample columns of X (and optional extra points in the same
// space) onto the top two principal directions of the centered samples. The
// sign of each direction is fixed by making its largest-magnitude loading
// positive.
PcaProjection pca_project(const Eigen::MatrixXd& X, const Eigen::MatrixXd* extras = nullptr);

}  // namespace narxprune
