#include "core/narx.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core/errors.hpp"
#include "core/fastcan.hpp"

namespace narxprune {

ModelPreset preset_by_name(const std::string& name) {
    if (name == "sdse" || name == "adse" || name == "emps") return {name, {4, 4, 3}, 10};
    if (name == "whs") return {name, {7, 7, 3}, 10};
    throw std::invalid_argument("unknown preset '" + name + "'");
}

TermSelection select_terms(const TermLibrary& library, int m) {
    if (m < 1 || m > library.n_terms())
        throw std::invalid_argument("term count out of range for library");
    SelectionProblem problem;
    problem.candidates = library.X.transpose();
    problem.target = library.target;
    problem.k = m;
    auto result = select_greedy(problem);
    return {std::move(result.indices), std::move(result.scores)};
}

ReducedNarxModel fit(const TermLibrary& library, const std::vector<int>& term_indices,
                     const std::optional<std::vector<int>>& sample_indices) {
    const int m = static_cast<int>(term_indices.size());
    if (m < 1) throw std::invalid_argument("need at least one term");
    for (int r : term_indices)
        if (r < 0 || r >= library.n_terms())
            throw std::invalid_argument("term index out of range");

    std::vector<int> samples;
    if (sample_indices) {
        samples = *sample_indices;
        for (int s : samples)
            if (s < 0 || s >= library.n_samples())
                throw std::invalid_argument("sample index out of range");
    } else {
        samples.resize(static_cast<std::size_t>(library.n_samples()));
        for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = static_cast<int>(i);
    }
    const int ns = static_cast<int>(samples.size());
    if (ns < m + 1)
        throw std::invalid_argument("need at least " + std::to_string(m + 1) +
                                    " samples to fit " + std::to_string(m) +
                                    " terms plus an intercept");

    Eigen::MatrixXd design(ns, m + 1);
    Eigen::VectorXd rhs(ns);
    design.col(0).setOnes();
    for (int i = 0; i < ns; ++i) {
        const int col = samples[static_cast<std::size_t>(i)];
        for (int j = 0; j < m; ++j)
            design(i, j + 1) = library.X(term_indices[static_cast<std::size_t>(j)], col);
        rhs(i) = library.target(col);
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < m + 1) throw NumericError("rank deficient design");
    Eigen::VectorXd beta = qr.solve(rhs);

    ReducedNarxModel model;
    model.config = library.config;
    model.terms.reserve(static_cast<std::size_t>(m));
    for (int r : term_indices) model.terms.push_back(library.descriptors[static_cast<std::size_t>(r)]);
    model.intercept = beta(0);
    model.coefficients = beta.tail(m);
    for (int j = 0; j < m; ++j)
        if (!std::isfinite(model.coefficients(j)) || !std::isfinite(model.intercept))
            throw NumericError("non-finite coefficients from least squares");
    return model;
}

double evaluate_terms(const ReducedNarxModel& model, std::span<const double> y_lags,
                      std::span<const double> u_lags) {
    double acc = model.intercept;
    for (int j = 0; j < model.n_terms(); ++j) {
        double prod = model.coefficients(j);
        for (const auto& f : model.terms[static_cast<std::size_t>(j)].factors) {
            const auto idx = static_cast<std::size_t>(f.lag - 1);
            prod *= (f.signal == Signal::output) ? y_lags[idx] : u_lags[idx];
        }
        acc += prod;
    }
    return acc;
}

Eigen::VectorXd predict_one_step(const ReducedNarxModel& model, const TimeSeries& series) {
    const auto shifted = build_shift_matrix(series, model.config.n_y, model.config.n_u);
    const Eigen::Index n = shifted.lagged.cols();
    Eigen::VectorXd out(n);
    for (Eigen::Index c = 0; c < n; ++c) {
        const double* col = shifted.lagged.col(c).data();
        std::span<const double> y_lags(col, static_cast<std::size_t>(model.config.n_y));
        std::span<const double> u_lags(col + model.config.n_y,
                                       static_cast<std::size_t>(model.config.n_u));
        out(c) = evaluate_terms(model, y_lags, u_lags);
    }
    return out;
}

std::vector<double> simulate_free_run(const ReducedNarxModel& model,
                                      std::span<const double> initial_window,
                                      std::span<const double> input, int steps, double guard) {
    const int n_y = model.config.n_y;
    const int n_u = model.config.n_u;
    const int warmup = static_cast<int>(initial_window.size());
    if (warmup < std::max(n_y, n_u))
        throw std::invalid_argument("initial window shorter than the maximum lag");
    if (steps < 0) throw std::invalid_argument("steps must be >= 0");
    if (n_u > 0 && static_cast<int>(input.size()) < warmup + steps - 1)
        throw std::invalid_argument("input sequence too short for the requested steps");

    std::vector<double> traj(initial_window.begin(), initial_window.end());
    traj.reserve(static_cast<std::size_t>(warmup + steps));
    std::vector<double> y_lags(static_cast<std::size_t>(n_y));
    std::vector<double> u_lags(static_cast<std::size_t>(n_u));

    for (int k = warmup; k < warmup + steps; ++k) {
        for (int i = 0; i < n_y; ++i) y_lags[static_cast<std::size_t>(i)] = traj[static_cast<std::size_t>(k - 1 - i)];
        for (int i = 0; i < n_u; ++i) u_lags[static_cast<std::size_t>(i)] = input[static_cast<std::size_t>(k - 1 - i)];
        const double value = evaluate_terms(model, y_lags, u_lags);
        if (!std::isfinite(value) || std::abs(value) > guard)
            throw NumericError("divergence: |y| exceeded " + std::to_string(guard) +
                               " at step " + std::to_string(k - warmup));
        traj.push_back(value);
    }
    return traj;
}

std::vector<double> free_run_on(const ReducedNarxModel& model, const TimeSeries& series,
                                double guard) {
    series.validate();
    const int warmup = std::max(model.config.n_y, model.config.n_u);
    const int total = static_cast<int>(series.size());
    if (total <= warmup) throw DataError("insufficient samples for free-run warmup");
    std::span<const double> init(series.y.data(), static_cast<std::size_t>(warmup));
    std::span<const double> input(series.u.data(), series.u.size());
    return simulate_free_run(model, init, input, total - warmup, guard);
}

}  // namespace narxprune
