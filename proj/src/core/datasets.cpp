#include "core/datasets.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace narxprune {

double dse_input(double t) { return 0.1 * std::cos(0.2 * std::numbers::pi * t); }

namespace {

struct State {
    double y;
    double v;
};

State dse_rhs(const State& s, double u) {
    // y'' = u - y' + y - y^2 - y^3
    return {s.v, u - s.v + s.y - s.y * s.y - s.y * s.y * s.y};
}

State rk4_step(const State& s, double t, double dt, bool forced) {
    auto input = [forced](double tt) { return forced ? dse_input(tt) : 0.0; };
    const State k1 = dse_rhs(s, input(t));
    const State k2 = dse_rhs({s.y + 0.5 * dt * k1.y, s.v + 0.5 * dt * k1.v}, input(t + 0.5 * dt));
    const State k3 = dse_rhs({s.y + 0.5 * dt * k2.y, s.v + 0.5 * dt * k2.v}, input(t + 0.5 * dt));
    const State k4 = dse_rhs({s.y + dt * k3.y, s.v + dt * k3.v}, input(t + dt));
    return {s.y + dt / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
            s.v + dt / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v)};
}

}  // namespace

std::vector<TimeSeries> simulate_dse(const SimulationConfig& config) {
    if (config.dt <= 0.0) throw std::invalid_argument("dt must be positive");
    if (config.duration < config.dt) throw std::invalid_argument("duration must be >= dt");
    if (config.initial_conditions.empty())
        throw std::invalid_argument("need at least one initial condition");

    const int steps = static_cast<int>(std::llround(config.duration / config.dt));
    std::vector<TimeSeries> out;
    out.reserve(config.initial_conditions.size());

    for (const auto& [y0, v0] : config.initial_conditions) {
        TimeSeries series;
        series.t.reserve(static_cast<std::size_t>(steps) + 1);
        series.u.reserve(static_cast<std::size_t>(steps) + 1);
        series.y.reserve(static_cast<std::size_t>(steps) + 1);
        State s{y0, v0};
        for (int k = 0; k <= steps; ++k) {
            const double t = static_cast<double>(k) * config.dt;
            series.t.push_back(t);
            series.u.push_back(config.forced ? dse_input(t) : 0.0);
            series.y.push_back(s.y);
            if (!std::isfinite(s.y) || !std::isfinite(s.v))
                throw NumericError("non-finite state at t = " + std::to_string(t));
            if (k < steps) s = rk4_step(s, t, config.dt, config.forced);
        }
        out.push_back(std::move(series));
    }
    return out;
}

std::string classify_basin(double y0, double dy0, double dt) {
    State s{y0, dy0};
    double t = 0.0;
    const double t_max = 400.0;
    while (t < t_max) {
        s = rk4_step(s, t, dt, false);
        t += dt;
        if (!std::isfinite(s.y) || !std::isfinite(s.v))
            throw NumericError("non-finite state during basin classification");
        if (std::abs(s.v) < 1e-4) {
            if (std::abs(s.y - kRightEquilibrium) < 1e-3) return "right";
            if (std::abs(s.y - kLeftEquilibrium) < 1e-3) return "left";
        }
    }
    throw NumericError("trajectory did not settle into either equilibrium");
}

std::vector<TimeSeries> Dataset::train_series() const {
    std::vector<TimeSeries> out;
    for (const auto& traj : trajectories)
        if (traj.role == "train") out.push_back(traj.series);
    return out;
}

std::vector<const Trajectory*> Dataset::train() const {
    std::vector<const Trajectory*> out;
    for (const auto& traj : trajectories)
        if (traj.role == "train") out.push_back(&traj);
    return out;
}

std::vector<const Trajectory*> Dataset::test() const {
    std::vector<const Trajectory*> out;
    for (const auto& traj : trajectories)
        if (traj.role == "test") out.push_back(&traj);
    return out;
}

namespace {

// Draw an initial condition from the half-width-0.5 box around the given
// equilibrium until the forced trajectory actually stays in that basin.
Trajectory make_dse_trajectory(Rng& rng, const std::string& basin, const std::string& role,
                               int index) {
    const double centre = basin == "left" ? kLeftEquilibrium : kRightEquilibrium;
    const double dt = 0.1;
    const int steps = 500;  // 50 s
    for (int attempt = 0; attempt < 100; ++attempt) {
        const double y0 = centre + (rng.uniform01() - 0.5);
        const double v0 = rng.uniform01() - 0.5;

        TimeSeries traj;
        State s{y0, v0};
        for (int k = 0; k <= steps; ++k) {
            const double t = static_cast<double>(k) * dt;
            traj.t.push_back(t);
            traj.u.push_back(dse_input(t));
            traj.y.push_back(s.y);
            if (k < steps) s = rk4_step(s, t, dt, true);
        }
        // forced trajectories end close to an equilibrium; continue unforced
        // from the exact end state to decide which one was reached
        if (classify_basin(s.y, s.v) == basin) {
            traj.meta = basin + "_" + role + "_" + std::to_string(index);
            return {std::move(traj), basin, role};
        }
    }
    throw NumericError("could not place an initial condition inside the " + basin + " basin");
}

Dataset generate_dse_dataset(const std::string& name, std::uint64_t seed, int n_left,
                             int n_right) {
    Rng rng(seed);
    Dataset dataset;
    dataset.name = name;
    dataset.seed = seed;
    int index = 0;
    for (int i = 0; i < n_left; ++i)
        dataset.trajectories.push_back(make_dse_trajectory(rng, "left", "train", index++));
    for (int i = 0; i < n_right; ++i)
        dataset.trajectories.push_back(make_dse_trajectory(rng, "right", "train", index++));
    dataset.trajectories.push_back(make_dse_trajectory(rng, "left", "test", index++));
    dataset.trajectories.push_back(make_dse_trajectory(rng, "right", "test", index++));
    return dataset;
}

}  // namespace

Dataset generate_sdse(std::uint64_t seed) { return generate_dse_dataset("sdse", seed, 5, 5); }

Dataset generate_adse(std::uint64_t seed) { return generate_dse_dataset("adse", seed, 2, 98); }

Dataset generate_sine_demo() {
    TimeSeries series;
    series.meta = "sine_demo";
    const int count = 100;
    for (int j = 0; j < count; ++j) {
        const double t = static_cast<double>(j) / (count - 1);
        series.t.push_back(t);
        series.u.push_back(0.0);
        series.y.push_back(std::sin(2.0 * std::numbers::pi * t));
    }
    Dataset dataset;
    dataset.name = "sine-demo";
    dataset.trajectories.push_back({std::move(series), "", "train"});
    return dataset;
}

Dataset generate_dataset(const std::string& kind, std::uint64_t seed) {
    if (kind == "sdse") return generate_sdse(seed);
    if (kind == "adse") return generate_adse(seed);
    if (kind == "sine-demo") return generate_sine_demo();
    throw std::invalid_argument("unknown dataset kind '" + kind + "'");
}

std::string save_dataset(const Dataset& dataset, const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());

    json manifest;
    manifest["format_version"] = 1;
    manifest["kind"] = "dataset_manifest";
    manifest["name"] = dataset.name;
    manifest["seed"] = dataset.seed;
    manifest["trajectories"] = json::array();

    for (std::size_t i = 0; i < dataset.trajectories.size(); ++i) {
        const auto& traj = dataset.trajectories[i];
        char filename[64];
        std::snprintf(filename, sizeof(filename), "traj_%03zu.csv", i);
        save_series_csv(traj.series, (fs::path(dir) / filename).string());
        manifest["trajectories"].push_back(
            {{"file", filename}, {"tag", traj.tag}, {"role", traj.role}, {"meta", traj.series.meta}});
    }

    const std::string manifest_path = (fs::path(dir) / "manifest.json").string();
    std::ofstream out(manifest_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + manifest_path);
    out << manifest.dump(2) << '\n';
    return manifest_path;
}

Dataset load_dataset_manifest(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw IoError("cannot open " + manifest_path);
    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        throw DataError("parse error in " + manifest_path + ": " + e.what());
    }

    Dataset dataset;
    try {
        dataset.name = manifest.at("name").get<std::string>();
        dataset.seed = manifest.value("seed", 0ULL);
        const fs::path base = fs::path(manifest_path).parent_path();
        for (const auto& entry : manifest.at("trajectories")) {
            Trajectory traj;
            const auto file = entry.at("file").get<std::string>();
            traj.series = load_benchmark_csv((base / file).string(), {},
                                             entry.value("meta", file));
            traj.tag = entry.value("tag", "");
            traj.role = entry.value("role", "train");
            dataset.trajectories.push_back(std::move(traj));
        }
    } catch (const json::exception& e) {
        throw DataError("invalid manifest " + manifest_path + ": " + e.what());
    }
    if (dataset.trajectories.empty())
        throw DataError("manifest " + manifest_path + " lists no trajectories");
    return dataset;
}

Dataset dataset_from_csv(const std::string& train_csv, const std::string& test_csv,
                         const CsvSchema& schema) {
    Dataset dataset;
    dataset.name = fs::path(train_csv).stem().string();
    dataset.trajectories.push_back({load_benchmark_csv(train_csv, schema), "", "train"});
    if (!test_csv.empty())
        dataset.trajectories.push_back({load_benchmark_csv(test_csv, schema), "", "test"});
    return dataset;
}

}  // namespace narxprune
