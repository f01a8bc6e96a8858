#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/termlib.hpp"

namespace narxprune {

// Sparse polynomial NARX model: selected terms, their coefficients, and an
// explicit intercept fitted by ordinary least squares.
struct ReducedNarxModel {
    LibraryConfig config;
    std::vector<TermDescriptor> terms;
    Eigen::VectorXd coefficients;  // one per term
    double intercept = 0.0;

    int n_terms() const { return static_cast<int>(terms.size()); }
};

// Lag/degree/term-count bundle for the bundled experiment presets.
struct ModelPreset {
    std::string name;
    LibraryConfig config;
    int n_terms = 10;
};

// Known presets: "sdse", "adse", "emps" (lags 4/4, degree 3, 10 terms) and
// "whs" (lags 7/7, degree 3, 10 terms). Throws std::invalid_argument on an
// unknown name.
ModelPreset preset_by_name(const std::string& name);

// Greedy term selection against y(k). Returns `m` library row indices in
// selection order plus the per-step scores.
struct TermSelection {
    std::vector<int> indices;
    std::vector<double> scores;
};
TermSelection select_terms(const TermLibrary& library, int m);

// OLS fit of the given terms (plus intercept) over all samples or a subset.
ReducedNarxModel fit(const TermLibrary& library, const std::vector<int>& term_indices,
                     const std::optional<std::vector<int>>& sample_indices = std::nullopt);

// One-step-ahead prediction from measured lags; returns one value per usable
// sample of the series (aligned with build_shift_matrix columns).
Eigen::VectorXd predict_one_step(const ReducedNarxModel& model, const TimeSeries& series);

// Free-run simulation: the first max(n_y, n_u) entries of the returned
// trajectory are the initial window, the remaining `steps` are fed back from
// the model's own predictions. `input` shares the returned trajectory's time
// axis and must cover every u lag; it may be empty when n_u == 0.
// Throws NumericError("divergence") when |y| exceeds `guard`.
std::vector<double> simulate_free_run(const ReducedNarxModel& model,
                                      std::span<const double> initial_window,
                                      std::span<const double> input, int steps,
                                      double guard = 1e6);

// Free-run over a recorded series: measured outputs seed the warmup window,
// measured inputs drive the rest. Returns a full-length trajectory whose
// first max(n_y, n_u) entries are the measured outputs.
std::vector<double> free_run_on(const ReducedNarxModel& model, const TimeSeries& series,
                                double guard = 1e6);

// Evaluates each model term at one time step given lag accessors.
double evaluate_terms(const ReducedNarxModel& model,
                      std::span<const double> y_lags,   // y(k-1), ..., y(k-n_y)
                      std::span<const double> u_lags);  // u(k-1), ..., u(k-n_u)

}  // namespace narxprune
