#include "core/report_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "core/errors.hpp"

namespace narxprune {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json config_json(const LibraryConfig& config) {
    return ordered_json{{"n_y", config.n_y}, {"n_u", config.n_u}, {"degree", config.degree}};
}

ordered_json factors_json(const TermDescriptor& term) {
    ordered_json factors = ordered_json::array();
    for (const auto& factor : term.factors)
        factors.push_back(ordered_json{
            {"signal", factor.signal == Signal::output ? "y" : "u"}, {"lag", factor.lag}});
    return factors;
}

ordered_json number_or_null(double value) {
    if (!std::isfinite(value)) return nullptr;
    return value;
}

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string quoted = "\"";
    for (char c : text) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

ordered_json trial_options_json(const TrialOptions& options, int resolved_p) {
    ordered_json config;
    config["method"] = method_name(options.method);
    config["n"] = options.n;
    if (options.method == PruneMethod::minibatch_fastcan) {
        config["q"] = options.q;
        config["p"] = resolved_p;
        config["requested_p"] =
            options.batch_size ? ordered_json(*options.batch_size) : ordered_json(nullptr);
    } else {
        config["q"] = nullptr;
        config["p"] = nullptr;
        config["requested_p"] = nullptr;
    }
    config["trials"] = options.trials;
    config["base_seed"] = options.base_seed;
    return config;
}

ordered_json summary_json(const TrialSummary& summary) {
    return ordered_json{{"trials", summary.trials},
                        {"failures", summary.failures},
                        {"median", number_or_null(summary.median)},
                        {"mean", number_or_null(summary.mean)},
                        {"sd", number_or_null(summary.sd)}};
}

}  // namespace

std::string model_to_json(const ReducedNarxModel& model, const std::string& preset_name) {
    ordered_json doc;
    doc["format_version"] = kFormatVersion;
    doc["kind"] = "narx_model";
    doc["preset"] = preset_name;
    doc["config"] = config_json(model.config);
    ordered_json terms = ordered_json::array();
    for (const auto& term : model.terms)
        terms.push_back(ordered_json{{"label", term.label()}, {"factors", factors_json(term)}});
    doc["terms"] = std::move(terms);
    doc["coefficients"] =
        std::vector<double>(model.coefficients.data(),
                            model.coefficients.data() + model.coefficients.size());
    doc["intercept"] = model.intercept;
    return doc.dump(2) + "\n";
}

ReducedNarxModel model_from_json_text(const std::string& text, std::string* preset_name) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw DataError(std::string("model json: ") + e.what());
    }
    try {
        if (doc.at("kind").get<std::string>() != "narx_model")
            throw DataError("model json: unexpected kind");
        ReducedNarxModel model;
        const auto& config = doc.at("config");
        model.config.n_y = config.at("n_y").get<int>();
        model.config.n_u = config.at("n_u").get<int>();
        model.config.degree = config.at("degree").get<int>();
        for (const auto& term : doc.at("terms")) {
            TermDescriptor descriptor;
            for (const auto& factor : term.at("factors")) {
                const std::string signal = factor.at("signal").get<std::string>();
                if (signal != "y" && signal != "u")
                    throw DataError("model json: unknown signal " + signal);
                const int lag = factor.at("lag").get<int>();
                if (lag < 1) throw DataError("model json: lag must be positive");
                descriptor.factors.push_back(
                    {signal == "y" ? Signal::output : Signal::input, lag});
            }
            model.terms.push_back(std::move(descriptor));
        }
        const auto coefficients = doc.at("coefficients").get<std::vector<double>>();
        if (coefficients.size() != model.terms.size())
            throw DataError("model json: coefficient count does not match terms");
        model.coefficients =
            Eigen::Map<const Eigen::VectorXd>(coefficients.data(),
                                              static_cast<Eigen::Index>(coefficients.size()));
        model.intercept = doc.at("intercept").get<double>();
        if (preset_name) *preset_name = doc.value("preset", std::string());
        return model;
    } catch (const ordered_json::exception& e) {
        throw DataError(std::string("model json: ") + e.what());
    }
}

std::string fit_report_to_json(const EvalContext& context, const FitAssessment& assessment) {
    ordered_json doc;
    doc["format_version"] = kFormatVersion;
    doc["kind"] = "fit_report";
    doc["dataset"] = context.dataset.name;
    doc["preset"] = context.preset.name;
    doc["config"] = config_json(context.preset.config);
    doc["n_terms"] = context.baseline.n_terms();
    doc["n_train_samples"] = context.n_samples();
    ordered_json terms = ordered_json::array();
    for (std::size_t i = 0; i < context.baseline.terms.size(); ++i) {
        const ordered_json score = i < context.terms.scores.size()
                                       ? ordered_json(context.terms.scores[i])
                                       : ordered_json(nullptr);
        terms.push_back(
            ordered_json{{"label", context.baseline.terms[i].label()}, {"score", score}});
    }
    doc["selected_terms"] = std::move(terms);
    doc["train_one_step_r2"] = number_or_null(assessment.train_one_step_r2);
    ordered_json runs = ordered_json::array();
    for (const auto& run : assessment.test_free_runs)
        runs.push_back(ordered_json{{"trajectory", run.label},
                                    {"r2", number_or_null(run.r2)},
                                    {"rmse", number_or_null(run.rmse)},
                                    {"diverged", run.diverged}});
    doc["test_free_runs"] = std::move(runs);
    return doc.dump(2) + "\n";
}

std::string prune_result_to_json(const PruneResult& result) {
    ordered_json doc;
    doc["format_version"] = kFormatVersion;
    doc["kind"] = "prune_result";
    doc["method"] = method_name(result.method);
    ordered_json config;
    config["n"] = result.config.n;
    if (result.method == PruneMethod::minibatch_fastcan) {
        config["q"] = result.config.q;
        config["p"] = result.config.p;
        config["requested_p"] = result.config.requested_p
                                    ? ordered_json(*result.config.requested_p)
                                    : ordered_json(nullptr);
    } else {
        config["q"] = nullptr;
        config["p"] = nullptr;
        config["requested_p"] = nullptr;
    }
    config["seed"] = result.config.seed;
    doc["config"] = std::move(config);
    doc["indices"] = result.indices;
    if (result.dictionary) {
        ordered_json dictionary;
        dictionary["q"] = result.dictionary->q;
        dictionary["seed"] = result.dictionary->seed;
        dictionary["inertia"] = number_or_null(result.dictionary->inertia);
        ordered_json atoms = ordered_json::array();
        for (int a = 0; a < result.dictionary->q; ++a) {
            const auto column = result.dictionary->atoms.col(a);
            atoms.push_back(std::vector<double>(column.begin(), column.end()));
        }
        dictionary["atoms"] = std::move(atoms);
        doc["dictionary"] = std::move(dictionary);
    } else {
        doc["dictionary"] = nullptr;
    }
    return doc.dump(2) + "\n";
}

std::string trials_to_json(const TrialSet& set, const std::string& dataset_name,
                           const std::string& preset_name, bool include_timings) {
    ordered_json doc;
    doc["format_version"] = kFormatVersion;
    doc["kind"] = "trial_report";
    doc["dataset"] = dataset_name;
    doc["preset"] = preset_name;
    doc["config"] = trial_options_json(set.options, set.resolved_batch_size);
    doc["summary"] = summary_json(set.summary);
    ordered_json trials = ordered_json::array();
    for (const auto& report : set.reports) {
        ordered_json row;
        row["trial"] = report.trial;
        row["seed"] = report.seed;
        row["r2"] = report.ok() ? number_or_null(report.r2) : ordered_json(nullptr);
        row["selected_indices"] = report.selected_indices;
        row["refit_coefficients"] = report.refit_coefficients;
        row["error"] = report.ok() ? ordered_json(nullptr) : ordered_json(report.error);
        if (include_timings) row["runtime_ms"] = report.runtime_ms;
        trials.push_back(std::move(row));
    }
    doc["trials"] = std::move(trials);
    return doc.dump(2) + "\n";
}

std::string trials_to_csv(const TrialSet& set, bool include_timings) {
    std::ostringstream out;
    out << "trial,seed,method,n,q,p,r2,n_selected,error";
    if (include_timings) out << ",runtime_ms";
    out << "\n";
    const bool fastcan = set.options.method == PruneMethod::minibatch_fastcan;
    for (const auto& report : set.reports) {
        out << report.trial << ',' << report.seed << ',' << method_name(report.method) << ','
            << set.options.n << ',';
        if (fastcan)
            out << set.options.q << ',' << set.resolved_batch_size << ',';
        else
            out << ",,";
        if (report.ok())
            out << format_double(report.r2);
        out << ',' << report.selected_indices.size() << ',' << csv_field(report.error);
        if (include_timings) out << ',' << format_double(report.runtime_ms);
        out << "\n";
    }
    return out.str();
}

std::string sweep_to_json(const SweepReport& report, const std::string& dataset_name,
                          const std::string& preset_name) {
    ordered_json doc;
    doc["format_version"] = kFormatVersion;
    doc["kind"] = "sweep_report";
    doc["dataset"] = dataset_name;
    doc["preset"] = preset_name;
    doc["axis"] = axis_name(report.axis);
    ordered_json base;
    base["method"] = method_name(report.base.method);
    base["n"] = report.base.n;
    base["q"] = report.base.q;
    base["requested_p"] = report.base.batch_size ? ordered_json(*report.base.batch_size)
                                                 : ordered_json(nullptr);
    base["trials"] = report.base.trials;
    base["base_seed"] = report.base.base_seed;
    doc["base"] = std::move(base);
    doc["grid"] = report.grid;
    ordered_json points = ordered_json::array();
    for (const auto& point : report.points) {
        ordered_json row;
        row["value"] = point.value;
        row["p"] = point.resolved_batch_size > 0 ? ordered_json(point.resolved_batch_size)
                                                 : ordered_json(nullptr);
        row["summary"] = summary_json(point.summary);
        points.push_back(std::move(row));
    }
    doc["points"] = std::move(points);
    doc["best"] = report.best_value;
    return doc.dump(2) + "\n";
}

std::string sweep_to_csv(const SweepReport& report) {
    std::ostringstream out;
    out << "axis,value,p,trials,failures,median,mean,sd\n";
    const std::string axis = axis_name(report.axis);
    for (const auto& point : report.points) {
        out << axis << ',' << point.value << ',';
        if (point.resolved_batch_size > 0) out << point.resolved_batch_size;
        out << ',' << point.summary.trials << ',' << point.summary.failures << ',';
        if (std::isfinite(point.summary.median)) out << format_double(point.summary.median);
        out << ',';
        if (std::isfinite(point.summary.mean)) out << format_double(point.summary.mean);
        out << ',';
        if (std::isfinite(point.summary.sd)) out << format_double(point.summary.sd);
        out << "\n";
    }
    return out.str();
}

std::string pca_to_csv(const Eigen::MatrixXd& X, const Dictionary* dictionary,
                       const std::vector<int>* fastcan_selected,
                       const std::vector<int>* random_selected) {
    const Eigen::MatrixXd* extras = nullptr;
    if (dictionary && dictionary->atoms.cols() > 0) extras = &dictionary->atoms;
    const PcaProjection projection = pca_project(X, extras);

    std::ostringstream out;
    out << "pc1,pc2,kind\n";
    auto emit = [&out](double a, double b, const char* kind) {
        out << format_double(a) << ',' << format_double(b) << ',' << kind << "\n";
    };
    for (Eigen::Index i = 0; i < projection.sample_points.rows(); ++i)
        emit(projection.sample_points(i, 0), projection.sample_points(i, 1), "sample");
    for (Eigen::Index i = 0; i < projection.extra_points.rows(); ++i)
        emit(projection.extra_points(i, 0), projection.extra_points(i, 1), "atom");
    auto emit_selected = [&](const std::vector<int>& indices, const char* kind) {
        for (int index : indices) {
            if (index < 0 || index >= projection.sample_points.rows())
                throw std::invalid_argument("selected index out of range for PCA export");
            emit(projection.sample_points(index, 0), projection.sample_points(index, 1), kind);
        }
    };
    if (fastcan_selected) emit_selected(*fastcan_selected, "selected_fastcan");
    if (random_selected) emit_selected(*random_selected, "selected_random");
    return out.str();
}

std::string dataset_info_json(const Dataset& dataset) {
    ordered_json doc;
    doc["format_version"] = kFormatVersion;
    doc["kind"] = "dataset_info";
    doc["name"] = dataset.name;
    doc["seed"] = dataset.seed;
    int train = 0, test = 0;
    for (const auto& trajectory : dataset.trajectories)
        (trajectory.role == "train" ? train : test) += 1;
    doc["n_train"] = train;
    doc["n_test"] = test;
    ordered_json rows = ordered_json::array();
    for (const auto& trajectory : dataset.trajectories) {
        ordered_json row;
        row["meta"] = trajectory.series.meta;
        row["role"] = trajectory.role;
        row["tag"] = trajectory.tag;
        row["samples"] = trajectory.series.size();
        rows.push_back(std::move(row));
    }
    doc["trajectories"] = std::move(rows);
    return doc.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
    const std::filesystem::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(target.parent_path(), ec);
    }
    std::ofstream out(target, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("write failed for " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace narxprune
