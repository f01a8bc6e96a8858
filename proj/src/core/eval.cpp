#include "core/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "core/errors.hpp"

namespace narxprune {

double coefficient_r2(const Eigen::VectorXd& baseline, const Eigen::VectorXd& pruned) {
    if (baseline.size() != pruned.size())
        throw std::invalid_argument("coefficient vectors differ in length");
    if (baseline.size() < 2) throw std::invalid_argument("need at least two coefficients");
    const double mean = baseline.mean();
    const double denom = (baseline.array() - mean).square().sum();
    if (denom == 0.0) throw DataError("degenerate baseline");
    const double num = (pruned - baseline).squaredNorm();
    return 1.0 - num / denom;
}

double median_of(std::vector<double> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return 0.5 * (values[mid - 1] + values[mid]);
}

EvalContext build_context(const Dataset& dataset, const ModelPreset& preset) {
    EvalContext context;
    context.dataset = dataset;
    context.preset = preset;
    context.library = build_library(dataset.train_series(), preset.config);
    context.terms = select_terms(context.library.library, preset.n_terms);
    context.baseline = fit(context.library.library, context.terms.indices);

    const int m = context.baseline.n_terms();
    context.baseline_coefficients.resize(m + 1);
    context.baseline_coefficients.head(m) = context.baseline.coefficients;
    context.baseline_coefficients(m) = context.baseline.intercept;

    const auto n_samples = context.library.library.n_samples();
    context.features.resize(m, n_samples);
    for (int r = 0; r < m; ++r)
        context.features.row(r) = context.library.library.X.row(context.terms.indices[r]);

    const auto train = dataset.train();
    context.column_tags.reserve(static_cast<std::size_t>(n_samples));
    for (std::size_t source : context.library.column_source)
        context.column_tags.push_back(train.at(source)->tag);
    return context;
}

EvalContext context_from_model(const Dataset& dataset, const ReducedNarxModel& model,
                               const std::string& preset_name) {
    EvalContext context;
    context.dataset = dataset;
    context.preset.name = preset_name.empty() ? "custom" : preset_name;
    context.preset.config = model.config;
    context.preset.n_terms = model.n_terms();
    context.library = build_library(dataset.train_series(), model.config);

    const auto& descriptors = context.library.library.descriptors;
    for (const auto& term : model.terms) {
        int found = -1;
        for (std::size_t i = 0; i < descriptors.size(); ++i) {
            if (descriptors[i] == term) {
                found = static_cast<int>(i);
                break;
            }
        }
        if (found < 0) throw DataError("model term not in library: " + term.label());
        context.terms.indices.push_back(found);
    }

    context.baseline = model;
    const int m = model.n_terms();
    context.baseline_coefficients.resize(m + 1);
    context.baseline_coefficients.head(m) = model.coefficients;
    context.baseline_coefficients(m) = model.intercept;

    const auto n_samples = context.library.library.n_samples();
    context.features.resize(m, n_samples);
    for (int r = 0; r < m; ++r)
        context.features.row(r) = context.library.library.X.row(context.terms.indices[r]);

    const auto train = dataset.train();
    context.column_tags.reserve(static_cast<std::size_t>(n_samples));
    for (std::size_t source : context.library.column_source)
        context.column_tags.push_back(train.at(source)->tag);
    return context;
}

TrialSummary summarize(const std::vector<TrialReport>& reports) {
    TrialSummary summary;
    summary.trials = static_cast<int>(reports.size());
    std::vector<double> values;
    for (const auto& report : reports) {
        if (report.ok())
            values.push_back(report.r2);
        else
            ++summary.failures;
    }
    if (values.empty()) {
        summary.median = summary.mean = summary.sd = std::numeric_limits<double>::quiet_NaN();
        return summary;
    }
    summary.median = median_of(values);
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    summary.mean = mean;
    if (values.size() < 2) {
        summary.sd = 0.0;
    } else {
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        summary.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return summary;
}

namespace {

TrialReport run_one_trial(const EvalContext& context, const TrialOptions& options, int index) {
    TrialReport report;
    report.trial = index;
    report.seed = options.base_seed + static_cast<std::uint64_t>(index);
    report.method = options.method;
    const auto start = std::chrono::steady_clock::now();
    try {
        PruneResult pruned;
        if (options.method == PruneMethod::minibatch_fastcan) {
            const Dictionary dictionary =
                learn_dictionary(context.features, options.q, report.seed);
            pruned = prune_minibatch_fastcan(context.features, dictionary, options.n,
                                             options.batch_size, report.seed);
        } else {
            pruned = prune_random(context.n_samples(), options.n, report.seed);
        }
        report.selected_indices = pruned.indices;

        // Sorted sample order makes n = N reproduce the baseline fit exactly.
        std::vector<int> samples = pruned.indices;
        std::sort(samples.begin(), samples.end());
        const ReducedNarxModel refit = fit(context.library.library, context.terms.indices, samples);

        const int m = refit.n_terms();
        Eigen::VectorXd coeffs(m + 1);
        coeffs.head(m) = refit.coefficients;
        coeffs(m) = refit.intercept;
        report.refit_coefficients.assign(coeffs.data(), coeffs.data() + coeffs.size());
        report.r2 = coefficient_r2(context.baseline_coefficients, coeffs);
    } catch (const std::exception& e) {
        report.error = e.what();
    }
    const auto stop = std::chrono::steady_clock::now();
    report.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    return report;
}

}  // namespace

TrialSet run_trials(const EvalContext& context, const TrialOptions& options) {
    if (options.trials < 1) throw std::invalid_argument("trials must be positive");
    if (options.n < 1) throw std::invalid_argument("sample count must be positive");

    TrialSet set;
    set.options = options;
    if (options.method == PruneMethod::minibatch_fastcan)
        set.resolved_batch_size = resolve_batch_size(options.n, options.q, context.n_features(),
                                                     options.batch_size);

    set.reports.resize(static_cast<std::size_t>(options.trials));
    int jobs = options.jobs;
    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    jobs = std::clamp(jobs, 1, options.trials);

    if (jobs == 1) {
        for (int i = 0; i < options.trials; ++i)
            set.reports[static_cast<std::size_t>(i)] = run_one_trial(context, options, i);
    } else {
        std::atomic<int> next{0};
        auto worker = [&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= options.trials) return;
                set.reports[static_cast<std::size_t>(i)] = run_one_trial(context, options, i);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& thread : pool) thread.join();
    }

    set.summary = summarize(set.reports);
    return set;
}

std::string axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::atom_size: return "atom_size";
        case SweepAxis::batch_size: return "batch_size";
        case SweepAxis::sample_size: return "sample_size";
    }
    throw std::invalid_argument("unknown sweep axis");
}

SweepAxis axis_from_name(const std::string& name) {
    if (name == "atom_size" || name == "atom-size" || name == "atoms") return SweepAxis::atom_size;
    if (name == "batch_size" || name == "batch-size" || name == "batch")
        return SweepAxis::batch_size;
    if (name == "sample_size" || name == "sample-size" || name == "samples")
        return SweepAxis::sample_size;
    throw std::invalid_argument("unknown sweep axis: " + name);
}

SweepReport sweep(const EvalContext& context, SweepAxis axis, const std::vector<int>& grid,
                  const TrialOptions& base) {
    if (grid.empty()) throw std::invalid_argument("sweep grid is empty");

    SweepReport report;
    report.axis = axis;
    report.base = base;
    report.grid = grid;
    report.points.reserve(grid.size());

    for (int value : grid) {
        TrialOptions options = base;
        switch (axis) {
            case SweepAxis::atom_size:
                options.q = value;
                options.batch_size.reset();  // the default rule tracks each q
                break;
            case SweepAxis::batch_size: options.batch_size = value; break;
            case SweepAxis::sample_size: options.n = value; break;
        }
        const TrialSet set = run_trials(context, options);
        report.points.push_back({value, set.resolved_batch_size, set.summary});
    }

    report.best_value = grid.front();
    double best_median = -std::numeric_limits<double>::infinity();
    for (const auto& point : report.points) {
        if (std::isfinite(point.summary.median) && point.summary.median > best_median) {
            best_median = point.summary.median;
            report.best_value = point.value;
        }
    }
    return report;
}

FitAssessment assess_fit(const EvalContext& context) {
    FitAssessment assessment;

    // One-step prediction over every training sample is the fitted design
    // applied to the stored feature rows.
    const Eigen::VectorXd& target = context.library.library.target;
    Eigen::VectorXd predicted =
        context.features.transpose() * context.baseline.coefficients;
    predicted.array() += context.baseline.intercept;
    const double mean = target.mean();
    const double total = (target.array() - mean).square().sum();
    if (total == 0.0) throw DataError("constant training target");
    assessment.train_one_step_r2 = 1.0 - (predicted - target).squaredNorm() / total;

    const int warmup = std::max(context.preset.config.n_y, context.preset.config.n_u);
    int index = 0;
    for (const Trajectory* trajectory : context.dataset.test()) {
        SeriesFreeRun run;
        run.label = trajectory->series.meta.empty() ? "test_" + std::to_string(index)
                                                    : trajectory->series.meta;
        try {
            const std::vector<double> simulated = free_run_on(context.baseline, trajectory->series);
            const auto& measured = trajectory->series.y;
            double ss_res = 0.0, ss_tot = 0.0, mean_y = 0.0;
            const std::size_t start = static_cast<std::size_t>(warmup);
            const std::size_t count = measured.size() - start;
            for (std::size_t k = start; k < measured.size(); ++k) mean_y += measured[k];
            mean_y /= static_cast<double>(count);
            for (std::size_t k = start; k < measured.size(); ++k) {
                const double diff = simulated[k] - measured[k];
                ss_res += diff * diff;
                ss_tot += (measured[k] - mean_y) * (measured[k] - mean_y);
            }
            run.rmse = std::sqrt(ss_res / static_cast<double>(count));
            run.r2 = ss_tot == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                                   : 1.0 - ss_res / ss_tot;
        } catch (const NumericError&) {
            run.diverged = true;
            run.r2 = run.rmse = std::numeric_limits<double>::quiet_NaN();
        }
        assessment.test_free_runs.push_back(std::move(run));
        ++index;
    }
    return assessment;
}

PcaProjection pca_project(const Eigen::MatrixXd& X, const Eigen::MatrixXd* extras) {
    const Eigen::Index dim = X.rows();
    const Eigen::Index count = X.cols();
    if (count < 2) throw std::invalid_argument("need at least two samples for PCA");
    if (extras && extras->cols() > 0 && extras->rows() != dim)
        throw std::invalid_argument("extra points live in a different space");

    const Eigen::VectorXd mean = X.rowwise().mean();
    const Eigen::MatrixXd centered = X.colwise() - mean;
    const Eigen::MatrixXd covariance =
        centered * centered.transpose() / static_cast<double>(count - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(covariance);
    if (solver.info() != Eigen::Success) throw NumericError("PCA eigendecomposition failed");

    PcaProjection projection;
    Eigen::MatrixXd directions = Eigen::MatrixXd::Zero(dim, 2);
    projection.variances.setZero();
    const Eigen::Index available = std::min<Eigen::Index>(2, dim);
    for (Eigen::Index c = 0; c < available; ++c) {
        const Eigen::Index source = dim - 1 - c;  // eigenvalues come back ascending
        Eigen::VectorXd direction = solver.eigenvectors().col(source);
        Eigen::Index peak = 0;
        direction.cwiseAbs().maxCoeff(&peak);
        if (direction(peak) < 0.0) direction = -direction;
        directions.col(c) = direction;
        projection.variances(c) = std::max(0.0, solver.eigenvalues()(source));
    }

    projection.sample_points = (directions.transpose() * centered).transpose();
    if (extras && extras->cols() > 0) {
        const Eigen::MatrixXd centered_extras = extras->colwise() - mean;
        projection.extra_points = (directions.transpose() * centered_extras).transpose();
    } else {
        projection.extra_points.resize(0, 2);
    }
    return projection;
}

}  // namespace narxprune
