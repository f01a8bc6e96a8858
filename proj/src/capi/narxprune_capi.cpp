#include "narxprune.h"

#include <cstring>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "core/datasets.hpp"
#include "core/errors.hpp"
#include "core/eval.hpp"
#include "core/narx.hpp"
#include "core/pruning.hpp"
#include "core/report_io.hpp"

struct np_dataset {
    narxprune::Dataset value;
};

struct np_context {
    narxprune::EvalContext value;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

template <typename F>
np_status guarded(F&& body) {
    try {
        body();
        return NP_OK;
    } catch (const std::invalid_argument& e) {
        set_error(e.what());
        return NP_EINVAL;
    } catch (const narxprune::IoError& e) {
        set_error(e.what());
        return NP_EIO;
    } catch (const narxprune::DataError& e) {
        set_error(e.what());
        return NP_EDATA;
    } catch (const narxprune::NumericError& e) {
        set_error(e.what());
        return NP_ENUMERIC;
    } catch (const std::bad_alloc&) {
        set_error("out of memory");
        return NP_EINTERNAL;
    } catch (const std::exception& e) {
        set_error(e.what());
        return NP_EINTERNAL;
    }
}

char* copy_string(const std::string& text) {
    char* out = new char[text.size() + 1];
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

void require(bool condition, const char* message) {
    if (!condition) throw std::invalid_argument(message);
}

narxprune::TrialOptions make_options(const char* method, int n, int atoms, int batch_size,
                                     int trials, uint64_t base_seed, int jobs) {
    require(method != nullptr, "method is NULL");
    narxprune::TrialOptions options;
    options.method = narxprune::method_from_name(method);
    options.n = n;
    options.q = atoms;
    if (batch_size > 0) options.batch_size = batch_size;
    options.trials = trials;
    options.base_seed = base_seed;
    options.jobs = jobs;
    return options;
}

}  // namespace

extern "C" {

const char* np_last_error(void) { return g_last_error.c_str(); }

void np_string_free(char* text) { delete[] text; }

np_status np_dataset_generate(const char* kind, uint64_t seed, np_dataset** out) {
    return guarded([&] {
        require(kind != nullptr, "kind is NULL");
        require(out != nullptr, "out is NULL");
        auto handle = std::make_unique<np_dataset>();
        handle->value = narxprune::generate_dataset(kind, seed);
        *out = handle.release();
    });
}

np_status np_dataset_load_manifest(const char* manifest_path, np_dataset** out) {
    return guarded([&] {
        require(manifest_path != nullptr, "manifest_path is NULL");
        require(out != nullptr, "out is NULL");
        auto handle = std::make_unique<np_dataset>();
        handle->value = narxprune::load_dataset_manifest(manifest_path);
        *out = handle.release();
    });
}

np_status np_dataset_load_csv(const char* train_csv, const char* test_csv, np_dataset** out) {
    return guarded([&] {
        require(train_csv != nullptr, "train_csv is NULL");
        require(out != nullptr, "out is NULL");
        auto handle = std::make_unique<np_dataset>();
        handle->value =
            narxprune::dataset_from_csv(train_csv, test_csv ? test_csv : std::string());
        *out = handle.release();
    });
}

np_status np_dataset_save(const np_dataset* dataset, const char* dir, char** manifest_path) {
    return guarded([&] {
        require(dataset != nullptr, "dataset is NULL");
        require(dir != nullptr, "dir is NULL");
        const std::string path = narxprune::save_dataset(dataset->value, dir);
        if (manifest_path) *manifest_path = copy_string(path);
    });
}

np_status np_dataset_info_json(const np_dataset* dataset, char** json) {
    return guarded([&] {
        require(dataset != nullptr, "dataset is NULL");
        require(json != nullptr, "json is NULL");
        *json = copy_string(narxprune::dataset_info_json(dataset->value));
    });
}

void np_dataset_free(np_dataset* dataset) { delete dataset; }

np_status np_context_fit(const np_dataset* dataset, const char* preset_name, int n_y, int n_u,
                         int degree, int n_terms, np_context** out) {
    return guarded([&] {
        require(dataset != nullptr, "dataset is NULL");
        require(out != nullptr, "out is NULL");
        narxprune::ModelPreset preset;
        if (preset_name) {
            preset = narxprune::preset_by_name(preset_name);
        } else {
            preset.name = "custom";
            preset.config = {n_y, n_u, degree};
            preset.n_terms = n_terms;
        }
        auto handle = std::make_unique<np_context>();
        handle->value = narxprune::build_context(dataset->value, preset);
        *out = handle.release();
    });
}

np_status np_context_from_model_json(const np_dataset* dataset, const char* model_json,
                                     np_context** out) {
    return guarded([&] {
        require(dataset != nullptr, "dataset is NULL");
        require(model_json != nullptr, "model_json is NULL");
        require(out != nullptr, "out is NULL");
        std::string preset_name;
        const narxprune::ReducedNarxModel model =
            narxprune::model_from_json_text(model_json, &preset_name);
        auto handle = std::make_unique<np_context>();
        handle->value = narxprune::context_from_model(dataset->value, model, preset_name);
        *out = handle.release();
    });
}

np_status np_context_model_json(const np_context* context, char** json) {
    return guarded([&] {
        require(context != nullptr, "context is NULL");
        require(json != nullptr, "json is NULL");
        *json = copy_string(
            narxprune::model_to_json(context->value.baseline, context->value.preset.name));
    });
}

np_status np_context_fit_report_json(const np_context* context, char** json) {
    return guarded([&] {
        require(context != nullptr, "context is NULL");
        require(json != nullptr, "json is NULL");
        const narxprune::FitAssessment assessment = narxprune::assess_fit(context->value);
        *json = copy_string(narxprune::fit_report_to_json(context->value, assessment));
    });
}

void np_context_free(np_context* context) { delete context; }

np_status np_prune(const np_context* context, const char* method, int n, int atoms,
                   int batch_size, uint64_t seed, char** json) {
    return guarded([&] {
        require(context != nullptr, "context is NULL");
        require(method != nullptr, "method is NULL");
        require(json != nullptr, "json is NULL");
        const narxprune::PruneMethod kind = narxprune::method_from_name(method);
        narxprune::PruneResult result;
        if (kind == narxprune::PruneMethod::minibatch_fastcan) {
            const narxprune::Dictionary dictionary =
                narxprune::learn_dictionary(context->value.features, atoms, seed);
            std::optional<int> requested;
            if (batch_size > 0) requested = batch_size;
            result = narxprune::prune_minibatch_fastcan(context->value.features, dictionary, n,
                                                        requested, seed);
        } else {
            result = narxprune::prune_random(context->value.n_samples(), n, seed);
        }
        *json = copy_string(narxprune::prune_result_to_json(result));
    });
}

np_status np_evaluate(const np_context* context, const char* method, int n, int atoms,
                      int batch_size, int trials, uint64_t base_seed, int jobs,
                      int include_timings, char** json, char** csv) {
    return guarded([&] {
        require(context != nullptr, "context is NULL");
        const narxprune::TrialOptions options =
            make_options(method, n, atoms, batch_size, trials, base_seed, jobs);
        const narxprune::TrialSet set = narxprune::run_trials(context->value, options);
        if (json)
            *json = copy_string(narxprune::trials_to_json(set, context->value.dataset.name,
                                                          context->value.preset.name,
                                                          include_timings != 0));
        if (csv) *csv = copy_string(narxprune::trials_to_csv(set, include_timings != 0));
    });
}

np_status np_sweep(const np_context* context, const char* axis, const int* grid, size_t grid_len,
                   const char* method, int n, int atoms, int trials, uint64_t base_seed, int jobs,
                   char** json, char** csv) {
    return guarded([&] {
        require(context != nullptr, "context is NULL");
        require(axis != nullptr, "axis is NULL");
        require(grid != nullptr && grid_len > 0, "grid is empty");
        const narxprune::SweepAxis sweep_axis = narxprune::axis_from_name(axis);
        const narxprune::TrialOptions base =
            make_options(method, n, atoms, 0, trials, base_seed, jobs);
        const std::vector<int> values(grid, grid + grid_len);
        const narxprune::SweepReport report =
            narxprune::sweep(context->value, sweep_axis, values, base);
        if (json)
            *json = copy_string(narxprune::sweep_to_json(report, context->value.dataset.name,
                                                         context->value.preset.name));
        if (csv) *csv = copy_string(narxprune::sweep_to_csv(report));
    });
}

np_status np_pca_csv(const np_context* context, int n, int atoms, int batch_size, uint64_t seed,
                     char** csv) {
    return guarded([&] {
        require(context != nullptr, "context is NULL");
        require(csv != nullptr, "csv is NULL");
        const narxprune::Dictionary dictionary =
            narxprune::learn_dictionary(context->value.features, atoms, seed);
        std::optional<int> requested;
        if (batch_size > 0) requested = batch_size;
        const narxprune::PruneResult fastcan = narxprune::prune_minibatch_fastcan(
            context->value.features, dictionary, n, requested, seed);
        const narxprune::PruneResult random =
            narxprune::prune_random(context->value.n_samples(), n, seed);
        *csv = copy_string(narxprune::pca_to_csv(context->value.features, &dictionary,
                                                 &fastcan.indices, &random.indices));
    });
}

}  // extern "C"
