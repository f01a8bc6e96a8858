#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "core/datasets.hpp"
#include "core/errors.hpp"
#include "core/eval.hpp"
#include "core/rng.hpp"

using namespace narxprune;

namespace {

// y(k) = 0.5 y(k-1) - 0.2 y(k-2) + 0.8 u(k-1) + 0.1 y(k-1)^2
TimeSeries driven(int samples, std::uint64_t seed, const std::string& meta) {
    Rng rng(seed);
    TimeSeries ts;
    ts.meta = meta;
    double y1 = 0.0, y2 = 0.0, u1 = 0.0;
    for (int k = 0; k < samples; ++k) {
        const double y = 0.5 * y1 - 0.2 * y2 + 0.8 * u1 + 0.1 * y1 * y1;
        const double u = 2.0 * rng.uniform01() - 1.0;
        ts.t.push_back(0.05 * k);
        ts.u.push_back(u);
        ts.y.push_back(y);
        y2 = y1;
        y1 = y;
        u1 = u;
    }
    return ts;
}

Dataset small_dataset() {
    Dataset ds;
    ds.name = "driven";
    for (int i = 0; i < 3; ++i)
        ds.trajectories.push_back(
            {driven(160, 10 + static_cast<std::uint64_t>(i), "train_" + std::to_string(i)),
             "", "train"});
    ds.trajectories.push_back({driven(120, 99, "holdout"), "", "test"});
    return ds;
}

ModelPreset small_preset() {
    ModelPreset preset;
    preset.name = "custom";
    preset.config = {2, 1, 2};
    preset.n_terms = 5;
    return preset;
}

const EvalContext& shared_context() {
    static const EvalContext context = build_context(small_dataset(), small_preset());
    return context;
}

Eigen::VectorXd vec(std::initializer_list<double> values) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v(i++) = x;
    return v;
}

}  // namespace

TEST_CASE("coefficient r2 on hand-computed cases") {
    CHECK(coefficient_r2(vec({1.0, 2.0, 3.0}), vec({1.0, 2.0, 3.0})) == 1.0);
    CHECK(coefficient_r2(vec({1.0, 2.0, 3.0}), vec({1.0, 2.0, 4.0})) == doctest::Approx(0.5));
    CHECK(coefficient_r2(vec({1.0, 2.0, 3.0}), vec({2.0, 2.0, 2.0})) == doctest::Approx(0.0));
    CHECK(coefficient_r2(vec({1.0, 3.0}), vec({3.0, 1.0})) == doctest::Approx(-3.0));

    CHECK_THROWS_AS(coefficient_r2(vec({1.0, 2.0}), vec({1.0, 2.0, 3.0})),
                    std::invalid_argument);
    CHECK_THROWS_AS(coefficient_r2(vec({1.0}), vec({1.0})), std::invalid_argument);
    CHECK_THROWS_WITH_AS(coefficient_r2(vec({5.0, 5.0, 5.0}), vec({5.0, 5.0, 5.0})),
                         doctest::Contains("degenerate baseline"), DataError);
}

TEST_CASE("median of odd, even, and single-element lists") {
    CHECK(median_of({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median_of({4.0, 1.0, 3.0, 2.0}) == doctest::Approx(2.5));
    CHECK(median_of({7.0}) == 7.0);
}

TEST_CASE("summary statistics over mixed success and failure") {
    std::vector<TrialReport> reports(3);
    reports[0].r2 = 1.0;
    reports[1].r2 = 0.5;
    reports[2].error = "boom";
    const TrialSummary s = summarize(reports);
    CHECK(s.trials == 3);
    CHECK(s.failures == 1);
    CHECK(s.median == doctest::Approx(0.75));
    CHECK(s.mean == doctest::Approx(0.75));
    CHECK(s.sd == doctest::Approx(std::sqrt(0.125)));

    std::vector<TrialReport> all_failed(2);
    all_failed[0].error = "a";
    all_failed[1].error = "b";
    const TrialSummary f = summarize(all_failed);
    CHECK(f.failures == 2);
    CHECK(std::isnan(f.median));
    CHECK(std::isnan(f.mean));
}

TEST_CASE("context construction exposes the selected-term feature matrix") {
    const EvalContext& ctx = shared_context();
    CHECK(ctx.n_features() == 5);
    CHECK(ctx.n_samples() == 3 * 158);  // 160 samples, max lag 2, three records
    CHECK(ctx.terms.indices.size() == 5);
    CHECK(ctx.baseline_coefficients.size() == 6);
    CHECK(ctx.column_tags.size() == static_cast<std::size_t>(ctx.n_samples()));
    CHECK(ctx.baseline.n_terms() == 5);
    // Feature rows are the library rows of the selected terms, in order.
    for (int r = 0; r < 5; ++r) {
        const int lib_row = ctx.terms.indices[static_cast<std::size_t>(r)];
        CHECK((ctx.features.row(r) - ctx.library.library.X.row(lib_row)).cwiseAbs().maxCoeff() ==
              0.0);
    }
    // The generating recursion is exact, so the one-step fit is too.
    const FitAssessment fit = assess_fit(ctx);
    CHECK(fit.train_one_step_r2 == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(fit.test_free_runs.size() == 1);
    CHECK(fit.test_free_runs[0].label == "holdout");
    CHECK_FALSE(fit.test_free_runs[0].diverged);
    CHECK(fit.test_free_runs[0].r2 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fit.test_free_runs[0].rmse == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("a context rebuilt from a stored model matches the original") {
    const EvalContext& ctx = shared_context();
    const EvalContext restored = context_from_model(ctx.dataset, ctx.baseline, "restored");
    CHECK(restored.preset.name == "restored");
    CHECK(restored.terms.scores.empty());
    REQUIRE(restored.terms.indices.size() == ctx.terms.indices.size());
    CHECK(restored.terms.indices == ctx.terms.indices);
    CHECK((restored.features - ctx.features).cwiseAbs().maxCoeff() == 0.0);
    CHECK((restored.baseline_coefficients - ctx.baseline_coefficients).cwiseAbs().maxCoeff() ==
          0.0);

    ReducedNarxModel bad = ctx.baseline;
    bad.terms[0].factors = {{Signal::output, 7}};  // lag outside the library
    CHECK_THROWS_WITH_AS(context_from_model(ctx.dataset, bad, "restored"),
                         doctest::Contains("not in library"), DataError);
}

TEST_CASE("random pruning at full size reproduces the baseline exactly") {
    const EvalContext& ctx = shared_context();
    TrialOptions options;
    options.method = PruneMethod::random;
    options.n = ctx.n_samples();
    options.trials = 3;
    options.base_seed = 11;
    const TrialSet set = run_trials(ctx, options);
    CHECK(set.resolved_batch_size == 0);
    REQUIRE(set.reports.size() == 3);
    for (const TrialReport& report : set.reports) {
        REQUIRE(report.ok());
        CHECK(report.r2 == 1.0);  // bitwise identical refit
    }
    CHECK(set.summary.median == 1.0);
    CHECK(set.summary.sd == 0.0);
}

TEST_CASE("trial seeds advance from the base seed and reports stay in order") {
    const EvalContext& ctx = shared_context();
    TrialOptions options;
    options.method = PruneMethod::minibatch_fastcan;
    options.n = 40;
    options.q = 4;
    // Keep every selection call below the centred-feature rank ceiling m-1.
    options.batch_size = 4;
    options.trials = 4;
    options.base_seed = 100;
    const TrialSet set = run_trials(ctx, options);
    CHECK(set.resolved_batch_size == 4);
    REQUIRE(set.reports.size() == 4);
    for (int i = 0; i < 4; ++i) {
        const TrialReport& report = set.reports[static_cast<std::size_t>(i)];
        CHECK(report.trial == i);
        CHECK(report.seed == 100 + static_cast<std::uint64_t>(i));
        REQUIRE(report.ok());
        CHECK(report.selected_indices.size() == 40);
        std::set<int> distinct(report.selected_indices.begin(), report.selected_indices.end());
        CHECK(distinct.size() == 40);
        CHECK(report.refit_coefficients.size() == 6);
        CHECK(report.r2 <= 1.0 + 1e-12);
    }
    CHECK(set.summary.failures == 0);
}

TEST_CASE("trial results do not depend on the worker count") {
    const EvalContext& ctx = shared_context();
    TrialOptions options;
    options.method = PruneMethod::minibatch_fastcan;
    options.n = 30;
    options.q = 5;
    options.batch_size = 3;
    options.trials = 6;
    options.base_seed = 7;
    options.jobs = 1;
    const TrialSet serial = run_trials(ctx, options);
    options.jobs = 4;
    const TrialSet parallel = run_trials(ctx, options);
    REQUIRE(serial.reports.size() == parallel.reports.size());
    for (std::size_t i = 0; i < serial.reports.size(); ++i) {
        CHECK(serial.reports[i].r2 == parallel.reports[i].r2);
        CHECK(serial.reports[i].selected_indices == parallel.reports[i].selected_indices);
        CHECK(serial.reports[i].refit_coefficients == parallel.reports[i].refit_coefficients);
    }
}

TEST_CASE("per-trial failures are recorded, not thrown") {
    const EvalContext& ctx = shared_context();
    TrialOptions options;
    options.method = PruneMethod::minibatch_fastcan;
    // One atom, one batch of m picks: centred features span only m-1
    // directions, so every trial hits rank exhaustion.
    options.n = ctx.n_features();
    options.q = 1;
    options.batch_size = ctx.n_features();
    options.trials = 3;
    const TrialSet set = run_trials(ctx, options);
    CHECK(set.summary.failures == 3);
    for (const TrialReport& report : set.reports) {
        CHECK_FALSE(report.ok());
        CHECK(report.error.find("rank exhausted") != std::string::npos);
    }
    CHECK(std::isnan(set.summary.median));

    TrialOptions bad;
    bad.trials = 0;
    CHECK_THROWS_AS(run_trials(ctx, bad), std::invalid_argument);
}

TEST_CASE("a singleton sweep equals the wrapped trial run") {
    const EvalContext& ctx = shared_context();
    TrialOptions base;
    base.method = PruneMethod::minibatch_fastcan;
    base.n = 30;
    base.q = 5;
    base.batch_size = 3;
    base.trials = 4;
    base.base_seed = 21;

    const SweepReport report = sweep(ctx, SweepAxis::sample_size, {30}, base);
    REQUIRE(report.points.size() == 1);
    CHECK(report.best_value == 30);

    const TrialSet direct = run_trials(ctx, base);
    CHECK(report.points[0].value == 30);
    CHECK(report.points[0].resolved_batch_size == direct.resolved_batch_size);
    CHECK(report.points[0].summary.median == direct.summary.median);
    CHECK(report.points[0].summary.mean == direct.summary.mean);
    CHECK(report.points[0].summary.sd == direct.summary.sd);
}

TEST_CASE("sweeps cover the grid and pick the best median") {
    const EvalContext& ctx = shared_context();
    TrialOptions base;
    base.method = PruneMethod::minibatch_fastcan;
    base.n = 30;
    base.q = 5;
    base.batch_size = 2;  // must be ignored when q itself is swept
    base.trials = 4;
    base.base_seed = 3;

    // Grid chosen so the default batch rule stays below the rank ceiling.
    const SweepReport report = sweep(ctx, SweepAxis::atom_size, {8, 10, 15}, base);
    CHECK(report.axis == SweepAxis::atom_size);
    REQUIRE(report.points.size() == 3);
    double best_median = -1e300;
    int best_value = report.grid.front();
    for (const SweepPoint& point : report.points) {
        CHECK(point.resolved_batch_size ==
              resolve_batch_size(30, point.value, ctx.n_features()));
        if (std::isfinite(point.summary.median) && point.summary.median > best_median) {
            best_median = point.summary.median;
            best_value = point.value;
        }
    }
    CHECK(report.best_value == best_value);

    const SweepReport again = sweep(ctx, SweepAxis::atom_size, {8, 10, 15}, base);
    for (std::size_t i = 0; i < report.points.size(); ++i)
        CHECK(report.points[i].summary.median == again.points[i].summary.median);

    CHECK_THROWS_AS(sweep(ctx, SweepAxis::atom_size, {}, base), std::invalid_argument);
}

TEST_CASE("sweep axis names round-trip") {
    CHECK(axis_name(SweepAxis::atom_size) == "atom_size");
    CHECK(axis_name(SweepAxis::batch_size) == "batch_size");
    CHECK(axis_name(SweepAxis::sample_size) == "sample_size");
    for (const SweepAxis axis :
         {SweepAxis::atom_size, SweepAxis::batch_size, SweepAxis::sample_size})
        CHECK(axis_from_name(axis_name(axis)) == axis);
    CHECK(axis_from_name("atom-size") == SweepAxis::atom_size);
    CHECK(axis_from_name("atoms") == SweepAxis::atom_size);
    CHECK(axis_from_name("batch-size") == SweepAxis::batch_size);
    CHECK(axis_from_name("sample-size") == SweepAxis::sample_size);
    CHECK_THROWS_AS(axis_from_name("volume"), std::invalid_argument);
}

TEST_CASE("pca projection fixes signs and orders variances") {
    Rng rng(5);
    Eigen::MatrixXd X(2, 60);
    for (int c = 0; c < 60; ++c) {
        X(0, c) = 3.0 * (2.0 * rng.uniform01() - 1.0);
        X(1, c) = 1.0 * (2.0 * rng.uniform01() - 1.0);
    }
    const PcaProjection proj = pca_project(X);
    REQUIRE(proj.sample_points.rows() == 60);
    REQUIRE(proj.sample_points.cols() == 2);
    CHECK(proj.variances(0) >= proj.variances(1));

    // A 2-D to 2-D projection is a rotation/reflection of the centred data:
    // pairwise distances survive.
    for (int a = 0; a < 10; ++a) {
        for (int b = a + 1; b < 10; ++b) {
            const double original = (X.col(a) - X.col(b)).norm();
            const double projected =
                (proj.sample_points.row(a) - proj.sample_points.row(b)).norm();
            CHECK(projected == doctest::Approx(original).epsilon(1e-9));
        }
    }

    const PcaProjection repeat = pca_project(X);
    CHECK((proj.sample_points - repeat.sample_points).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pca of collinear points puts all variance in one component") {
    Eigen::MatrixXd X(3, 40);
    const Eigen::Vector3d direction(1.0, -2.0, 0.5);
    for (int c = 0; c < 40; ++c) X.col(c) = direction * (0.1 * c);
    const PcaProjection proj = pca_project(X);
    CHECK(proj.variances(0) > 0.0);
    CHECK(std::abs(proj.variances(1)) < 1e-9);
    for (int c = 0; c < 40; ++c) CHECK(std::abs(proj.sample_points(c, 1)) < 1e-9);
}

TEST_CASE("pca extras share the sample transform") {
    Rng rng(9);
    Eigen::MatrixXd X(4, 50);
    for (int c = 0; c < 50; ++c)
        for (int r = 0; r < 4; ++r) X(r, c) = 2.0 * rng.uniform01() - 1.0;
    Eigen::MatrixXd extras(4, 2);
    extras.col(0) = X.col(0);
    extras.col(1) = X.col(3);
    const PcaProjection proj = pca_project(X, &extras);
    REQUIRE(proj.extra_points.rows() == 2);
    CHECK((proj.extra_points.row(0) - proj.sample_points.row(0)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((proj.extra_points.row(1) - proj.sample_points.row(3)).cwiseAbs().maxCoeff() < 1e-12);

    Eigen::MatrixXd wrong(3, 2);
    wrong.setZero();
    CHECK_THROWS_AS(pca_project(X, &wrong), std::invalid_argument);
    Eigen::MatrixXd single(4, 1);
    single.setZero();
    CHECK_THROWS_AS(pca_project(single), std::invalid_argument);
}

TEST_CASE("one-dimensional features project onto a padded second axis") {
    Eigen::MatrixXd X(1, 10);
    for (int c = 0; c < 10; ++c) X(0, c) = 0.5 * c;
    const PcaProjection proj = pca_project(X);
    CHECK(proj.variances(1) == 0.0);
    for (int c = 0; c < 10; ++c) CHECK(proj.sample_points(c, 1) == 0.0);
}
