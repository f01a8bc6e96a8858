// Command-line front end: datasets -> baseline fit -> pruning -> evaluation.
// Talks to the library exclusively through the C API in narxprune.h.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "narxprune.h"

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

int exit_code_for(np_status status) {
    switch (status) {
        case NP_OK: return 0;
        case NP_EINVAL: return kExitUsage;
        case NP_EDATA:
        case NP_EIO: return kExitData;
        case NP_ENUMERIC:
        case NP_EINTERNAL: return kExitNumeric;
    }
    return kExitNumeric;
}

// Nonzero exit code to propagate, 0 otherwise.
int check(np_status status, const std::string& stage) {
    if (status == NP_OK) return 0;
    std::cerr << "error: " << stage << ": " << np_last_error() << "\n";
    return exit_code_for(status);
}

struct StringDeleter {
    void operator()(char* text) const { np_string_free(text); }
};
using ApiString = std::unique_ptr<char, StringDeleter>;

struct DatasetDeleter {
    void operator()(np_dataset* dataset) const { np_dataset_free(dataset); }
};
using DatasetHandle = std::unique_ptr<np_dataset, DatasetDeleter>;

struct ContextDeleter {
    void operator()(np_context* context) const { np_context_free(context); }
};
using ContextHandle = std::unique_ptr<np_context, ContextDeleter>;

// Dataset source shared by every command that consumes data.
struct DatasetArgs {
    std::string generator;
    std::uint64_t seed = 0;
    std::string manifest;
    std::string train_csv;
    std::string test_csv;

    void attach(CLI::App* cmd) {
        auto* gen = cmd->add_option("--dataset", generator,
                                    "Generated dataset kind (sdse, adse, sine-demo)");
        cmd->add_option("--dataset-seed", seed, "Seed for the dataset generator");
        auto* man = cmd->add_option("--manifest", manifest, "Dataset manifest path");
        auto* csv = cmd->add_option("--train-csv", train_csv, "Training CSV (columns t,u,y)");
        cmd->add_option("--test-csv", test_csv, "Optional test CSV (columns t,u,y)");
        gen->excludes(man)->excludes(csv);
        man->excludes(csv);
    }

    bool configured() const {
        return !generator.empty() || !manifest.empty() || !train_csv.empty();
    }

    int load(DatasetHandle& out) const {
        np_dataset* raw = nullptr;
        np_status status = NP_EINVAL;
        if (!generator.empty())
            status = np_dataset_generate(generator.c_str(), seed, &raw);
        else if (!manifest.empty())
            status = np_dataset_load_manifest(manifest.c_str(), &raw);
        else if (!train_csv.empty())
            status = np_dataset_load_csv(train_csv.c_str(),
                                         test_csv.empty() ? nullptr : test_csv.c_str(), &raw);
        else {
            std::cerr << "error: no dataset given "
                         "(--dataset, --manifest, or --train-csv)\n";
            return kExitUsage;
        }
        if (const int code = check(status, "loading dataset")) return code;
        out.reset(raw);
        return 0;
    }

    ordered_json echo() const {
        ordered_json spec;
        if (!generator.empty()) {
            spec["generator"] = generator;
            spec["seed"] = seed;
        } else if (!manifest.empty()) {
            spec["manifest"] = manifest;
        } else {
            spec["train_csv"] = train_csv;
            if (!test_csv.empty()) spec["test_csv"] = test_csv;
        }
        return spec;
    }
};

// Baseline source: an existing model file, or fit-on-the-fly parameters.
struct ModelArgs {
    std::string model_path;
    std::string preset;
    int n_y = 0;
    int n_u = 0;
    int degree = 1;
    int n_terms = 10;

    void attach(CLI::App* cmd, bool allow_custom) {
        cmd->add_option("--model", model_path, "Baseline model JSON produced by fit-baseline");
        cmd->add_option("--preset", preset, "Model preset (sdse, adse, emps, whs)");
        if (allow_custom) {
            cmd->add_option("--ny", n_y, "Output lags (with no --preset)");
            cmd->add_option("--nu", n_u, "Input lags (with no --preset)");
            cmd->add_option("--degree", degree, "Polynomial degree (with no --preset)");
            cmd->add_option("--terms", n_terms, "Model term count (with no --preset)");
        }
    }

    int build(const np_dataset* dataset, ContextHandle& out) const {
        np_context* raw = nullptr;
        np_status status;
        if (!model_path.empty()) {
            std::ifstream in(model_path, std::ios::binary);
            if (!in) {
                std::cerr << "error: cannot open model file " << model_path << "\n";
                return kExitData;
            }
            std::ostringstream buffer;
            buffer << in.rdbuf();
            status = np_context_from_model_json(dataset, buffer.str().c_str(), &raw);
        } else if (!preset.empty()) {
            status = np_context_fit(dataset, preset.c_str(), 0, 0, 0, 0, &raw);
        } else if (n_y > 0 || n_u > 0) {
            status = np_context_fit(dataset, nullptr, n_y, n_u, degree, n_terms, &raw);
        } else {
            std::cerr << "error: no baseline given (--model, --preset, or --ny/--nu)\n";
            return kExitUsage;
        }
        if (const int code = check(status, "building baseline")) return code;
        out.reset(raw);
        return 0;
    }

    ordered_json echo() const {
        ordered_json spec;
        if (!model_path.empty()) {
            spec["model"] = model_path;
        } else if (!preset.empty()) {
            spec["preset"] = preset;
        } else {
            spec["n_y"] = n_y;
            spec["n_u"] = n_u;
            spec["degree"] = degree;
            spec["terms"] = n_terms;
        }
        return spec;
    }
};

std::string default_out_dir() {
    if (const char* env = std::getenv("NARXPRUNE_OUT"); env && *env) return env;
    return ".";
}

int write_file(const std::string& path, const char* text, const std::string& stage) {
    const std::filesystem::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(target.parent_path(), ec);
    }
    std::ofstream out(target, std::ios::binary);
    if (!out) {
        std::cerr << "error: " << stage << ": cannot write " << path << "\n";
        return kExitData;
    }
    out << text;
    return 0;
}

std::string join_path(const std::string& dir, const std::string& name) {
    if (dir.empty() || dir == ".") return name;
    if (dir.back() == '/') return dir + name;
    return dir + "/" + name;
}

void print_echo(const std::string& command, ordered_json body) {
    ordered_json echo;
    echo["command"] = command;
    for (auto& [key, value] : body.items()) echo[key] = value;
    std::cout << "config: " << echo.dump() << "\n";
}

// "a:b:step" (inclusive) or "v1,v2,v3".
std::vector<int> parse_grid(const std::string& text) {
    std::vector<int> values;
    if (text.find(':') != std::string::npos) {
        int a = 0, b = 0, step = 1;
        char c1 = 0, c2 = 0;
        std::istringstream in(text);
        if (!(in >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0 || b < a)
            throw CLI::ValidationError("--grid", "expected a:b:step with step > 0 and b >= a");
        for (int v = a; v <= b; v += step) values.push_back(v);
    } else {
        std::istringstream in(text);
        std::string token;
        while (std::getline(in, token, ','))
            if (!token.empty()) values.push_back(std::stoi(token));
    }
    if (values.empty()) throw CLI::ValidationError("--grid", "empty grid");
    return values;
}

std::string method_file_tag(const std::string& method) {
    return method == "random" ? "random" : "fastcan";
}

int run_evaluate_method(const np_context* context, const std::string& method, int n, int atoms,
                        int batch_size, int trials, std::uint64_t seed, int jobs, bool timings,
                        const std::string& out_dir, ordered_json& summaries) {
    char* json_text = nullptr;
    char* csv_text = nullptr;
    const np_status status =
        np_evaluate(context, method.c_str(), n, atoms, batch_size, trials, seed, jobs,
                    timings ? 1 : 0, &json_text, &csv_text);
    if (const int code = check(status, "evaluate " + method)) return code;
    ApiString json_guard(json_text), csv_guard(csv_text);

    const std::string tag = method_file_tag(method);
    const std::string json_path = join_path(out_dir, "trials_" + tag + ".json");
    const std::string csv_path = join_path(out_dir, "trials_" + tag + ".csv");
    if (const int code = write_file(json_path, json_text, "evaluate")) return code;
    if (const int code = write_file(csv_path, csv_text, "evaluate")) return code;
    std::cout << "wrote " << json_path << "\n";
    std::cout << "wrote " << csv_path << "\n";

    summaries[method] = ordered_json::parse(json_text).at("summary");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dictionary-learning data pruning for NARX system identification"};
    app.require_subcommand(1);
    app.fallthrough();  // lets --out appear after the subcommand name

    std::string out_dir = default_out_dir();
    app.add_option("--out", out_dir, "Output directory (default $NARXPRUNE_OUT or .)")
        ->capture_default_str();

    // generate
    auto* generate = app.add_subcommand("generate", "Generate a dataset and write it as CSV");
    std::string gen_kind;
    std::uint64_t gen_seed = 0;
    generate->add_option("kind", gen_kind, "sdse, adse, or sine-demo")->required();
    generate->add_option("--seed", gen_seed, "Generator seed");

    // fit-baseline
    auto* fit = app.add_subcommand("fit-baseline",
                                   "Select terms and fit the full-data baseline model");
    DatasetArgs fit_data;
    fit_data.attach(fit);
    ModelArgs fit_model;
    fit_model.attach(fit, true);

    // prune
    auto* prune = app.add_subcommand("prune", "Select a sample subset with one method");
    DatasetArgs prune_data;
    prune_data.attach(prune);
    ModelArgs prune_model;
    prune_model.attach(prune, false);
    std::string prune_method = "minibatch-fastcan";
    int prune_n = 100, prune_atoms = 15, prune_batch = 0;
    std::uint64_t prune_seed = 0;
    prune->add_option("--method", prune_method, "minibatch-fastcan or random")
        ->capture_default_str();
    prune->add_option("--n", prune_n, "Samples to keep")->capture_default_str();
    prune->add_option("--atoms", prune_atoms, "Dictionary atoms q")->capture_default_str();
    prune->add_option("--batch-size", prune_batch,
                      "Batch size p (omit for ceil(n/q) capped at the term count)");
    prune->add_option("--seed", prune_seed, "Pruning seed");

    // evaluate
    auto* evaluate = app.add_subcommand(
        "evaluate", "Repeated pruning trials with coefficient-R^2 against the baseline");
    DatasetArgs eval_data;
    eval_data.attach(evaluate);
    ModelArgs eval_model;
    eval_model.attach(evaluate, false);
    std::string eval_method = "both";
    int eval_n = 100, eval_atoms = 15, eval_batch = 0, eval_trials = 10, eval_jobs = 0;
    std::uint64_t eval_seed = 0;
    bool eval_timings = false;
    evaluate->add_option("--method", eval_method, "minibatch-fastcan, random, or both")
        ->capture_default_str();
    evaluate->add_option("--n", eval_n, "Samples to keep")->capture_default_str();
    evaluate->add_option("--atoms", eval_atoms, "Dictionary atoms q")->capture_default_str();
    evaluate->add_option("--batch-size", eval_batch, "Batch size p (omit for the default rule)");
    evaluate->add_option("--trials", eval_trials, "Trial count")->capture_default_str();
    evaluate->add_option("--seed", eval_seed, "Base seed (trial i uses seed + i)");
    evaluate->add_option("--jobs", eval_jobs, "Worker threads (0 = all logical processors)");
    evaluate->add_flag("--timings", eval_timings, "Include per-trial runtimes in the reports");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Run the trial protocol over a parameter grid");
    DatasetArgs sweep_data;
    sweep_data.attach(sweep);
    ModelArgs sweep_model;
    sweep_model.attach(sweep, false);
    std::string sweep_axis = "atom-size", sweep_grid_text, sweep_method = "minibatch-fastcan";
    int sweep_n = 100, sweep_atoms = 15, sweep_trials = 10, sweep_jobs = 0;
    std::uint64_t sweep_seed = 0;
    sweep->add_option("--axis", sweep_axis, "atom-size, batch-size, or sample-size")
        ->capture_default_str();
    sweep->add_option("--grid", sweep_grid_text, "a:b:step (inclusive) or v1,v2,...")->required();
    sweep->add_option("--method", sweep_method, "minibatch-fastcan or random")
        ->capture_default_str();
    sweep->add_option("--n", sweep_n, "Samples to keep (fixed unless swept)")
        ->capture_default_str();
    sweep->add_option("--atoms", sweep_atoms, "Dictionary atoms q (fixed unless swept)")
        ->capture_default_str();
    sweep->add_option("--trials", sweep_trials, "Trials per grid point")->capture_default_str();
    sweep->add_option("--seed", sweep_seed, "Base seed");
    sweep->add_option("--jobs", sweep_jobs, "Worker threads (0 = all logical processors)");

    // pca
    auto* pca = app.add_subcommand("pca", "Project samples, atoms, and selections to 2-D");
    DatasetArgs pca_data;
    pca_data.attach(pca);
    ModelArgs pca_model;
    pca_model.attach(pca, false);
    int pca_n = 100, pca_atoms = 15, pca_batch = 0;
    std::uint64_t pca_seed = 0;
    pca->add_option("--n", pca_n, "Samples to keep")->capture_default_str();
    pca->add_option("--atoms", pca_atoms, "Dictionary atoms q")->capture_default_str();
    pca->add_option("--batch-size", pca_batch, "Batch size p (omit for the default rule)");
    pca->add_option("--seed", pca_seed, "Selection seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    if (generate->parsed()) {
        np_dataset* raw = nullptr;
        if (const int code =
                check(np_dataset_generate(gen_kind.c_str(), gen_seed, &raw), "generate"))
            return code;
        DatasetHandle dataset(raw);
        print_echo("generate",
                   {{"kind", gen_kind}, {"seed", gen_seed}, {"out", out_dir}});
        char* manifest = nullptr;
        if (const int code =
                check(np_dataset_save(dataset.get(), out_dir.c_str(), &manifest), "generate"))
            return code;
        ApiString manifest_guard(manifest);
        std::cout << "wrote " << manifest << "\n";
        return 0;
    }

    if (fit->parsed()) {
        DatasetHandle dataset;
        if (const int code = fit_data.load(dataset)) return code;
        print_echo("fit-baseline", {{"data", fit_data.echo()},
                                    {"baseline", fit_model.echo()},
                                    {"out", out_dir}});
        ContextHandle context;
        if (const int code = fit_model.build(dataset.get(), context)) return code;

        char* model_text = nullptr;
        if (const int code =
                check(np_context_model_json(context.get(), &model_text), "fit-baseline"))
            return code;
        ApiString model_guard(model_text);
        const std::string model_path = join_path(out_dir, "model.json");
        if (const int code = write_file(model_path, model_text, "fit-baseline")) return code;
        std::cout << "wrote " << model_path << "\n";

        char* report_text = nullptr;
        if (const int code =
                check(np_context_fit_report_json(context.get(), &report_text), "fit-baseline"))
            return code;
        ApiString report_guard(report_text);
        const std::string report_path = join_path(out_dir, "fit_report.json");
        if (const int code = write_file(report_path, report_text, "fit-baseline")) return code;
        std::cout << "wrote " << report_path << "\n";

        const auto report = ordered_json::parse(report_text);
        std::cout << "train one-step R^2: " << report.at("train_one_step_r2") << "\n";
        return 0;
    }

    if (prune->parsed()) {
        DatasetHandle dataset;
        if (const int code = prune_data.load(dataset)) return code;
        ContextHandle context;
        if (const int code = prune_model.build(dataset.get(), context)) return code;
        print_echo("prune", {{"data", prune_data.echo()},
                             {"baseline", prune_model.echo()},
                             {"method", prune_method},
                             {"n", prune_n},
                             {"atoms", prune_atoms},
                             {"batch_size", prune_batch > 0 ? ordered_json(prune_batch)
                                                            : ordered_json(nullptr)},
                             {"seed", prune_seed},
                             {"out", out_dir}});
        char* json_text = nullptr;
        if (const int code = check(np_prune(context.get(), prune_method.c_str(), prune_n,
                                            prune_atoms, prune_batch, prune_seed, &json_text),
                                   "prune"))
            return code;
        ApiString json_guard(json_text);
        const std::string tag = method_file_tag(prune_method);
        const std::string path = join_path(out_dir, "prune_" + tag + ".json");
        if (const int code = write_file(path, json_text, "prune")) return code;
        std::cout << "wrote " << path << "\n";
        const auto parsed = ordered_json::parse(json_text);
        std::cout << "selected " << parsed.at("indices").size() << " samples";
        if (!parsed.at("config").at("p").is_null())
            std::cout << " (batch size " << parsed.at("config").at("p").get<int>() << ")";
        std::cout << "\n";
        return 0;
    }

    if (evaluate->parsed()) {
        DatasetHandle dataset;
        if (const int code = eval_data.load(dataset)) return code;
        ContextHandle context;
        if (const int code = eval_model.build(dataset.get(), context)) return code;
        print_echo("evaluate", {{"data", eval_data.echo()},
                                {"baseline", eval_model.echo()},
                                {"method", eval_method},
                                {"n", eval_n},
                                {"atoms", eval_atoms},
                                {"batch_size", eval_batch > 0 ? ordered_json(eval_batch)
                                                              : ordered_json(nullptr)},
                                {"trials", eval_trials},
                                {"base_seed", eval_seed},
                                {"out", out_dir}});

        std::vector<std::string> methods;
        if (eval_method == "both")
            methods = {"minibatch-fastcan", "random"};
        else
            methods = {eval_method};

        ordered_json summaries;
        for (const auto& method : methods) {
            if (const int code = run_evaluate_method(context.get(), method, eval_n, eval_atoms,
                                                     eval_batch, eval_trials, eval_seed,
                                                     eval_jobs, eval_timings, out_dir, summaries))
                return code;
        }
        for (const auto& [method, summary] : summaries.items()) {
            std::cout << method << ": median " << summary.at("median") << ", mean "
                      << summary.at("mean") << ", sd " << summary.at("sd") << ", failures "
                      << summary.at("failures") << "/" << summary.at("trials") << "\n";
        }
        return 0;
    }

    if (sweep->parsed()) {
        DatasetHandle dataset;
        if (const int code = sweep_data.load(dataset)) return code;
        ContextHandle context;
        if (const int code = sweep_model.build(dataset.get(), context)) return code;

        std::vector<int> grid;
        try {
            grid = parse_grid(sweep_grid_text);
        } catch (const CLI::Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitUsage;
        }
        print_echo("sweep", {{"data", sweep_data.echo()},
                             {"baseline", sweep_model.echo()},
                             {"axis", sweep_axis},
                             {"grid", grid},
                             {"method", sweep_method},
                             {"n", sweep_n},
                             {"atoms", sweep_atoms},
                             {"trials", sweep_trials},
                             {"base_seed", sweep_seed},
                             {"out", out_dir}});

        char* json_text = nullptr;
        char* csv_text = nullptr;
        if (const int code = check(np_sweep(context.get(), sweep_axis.c_str(), grid.data(),
                                            grid.size(), sweep_method.c_str(), sweep_n,
                                            sweep_atoms, sweep_trials, sweep_seed, sweep_jobs,
                                            &json_text, &csv_text),
                                   "sweep"))
            return code;
        ApiString json_guard(json_text), csv_guard(csv_text);

        std::string axis_tag = sweep_axis;
        for (auto& c : axis_tag)
            if (c == '-') c = '_';
        const std::string json_path = join_path(out_dir, "sweep_" + axis_tag + ".json");
        const std::string csv_path = join_path(out_dir, "sweep_" + axis_tag + ".csv");
        if (const int code = write_file(json_path, json_text, "sweep")) return code;
        if (const int code = write_file(csv_path, csv_text, "sweep")) return code;
        std::cout << "wrote " << json_path << "\n";
        std::cout << "wrote " << csv_path << "\n";
        const auto parsed = ordered_json::parse(json_text);
        std::cout << "best " << axis_tag << ": " << parsed.at("best") << "\n";
        return 0;
    }

    if (pca->parsed()) {
        DatasetHandle dataset;
        if (const int code = pca_data.load(dataset)) return code;
        ContextHandle context;
        if (const int code = pca_model.build(dataset.get(), context)) return code;
        print_echo("pca", {{"data", pca_data.echo()},
                           {"baseline", pca_model.echo()},
                           {"n", pca_n},
                           {"atoms", pca_atoms},
                           {"batch_size", pca_batch > 0 ? ordered_json(pca_batch)
                                                        : ordered_json(nullptr)},
                           {"seed", pca_seed},
                           {"out", out_dir}});
        char* csv_text = nullptr;
        if (const int code = check(np_pca_csv(context.get(), pca_n, pca_atoms, pca_batch,
                                              pca_seed, &csv_text),
                                   "pca"))
            return code;
        ApiString csv_guard(csv_text);
        const std::string path = join_path(out_dir, "pca.csv");
        if (const int code = write_file(path, csv_text, "pca")) return code;
        std::cout << "wrote " << path << "\n";
        return 0;
    }

    return kExitUsage;
}
