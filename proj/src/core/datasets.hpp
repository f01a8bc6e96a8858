#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "core/timeseries.hpp"

namespace narxprune {

// Second-order system  y'' + y' - y + y^2 + y^3 = u  with two stable
// equilibria at (-1 +- sqrt(5)) / 2 and a saddle at the origin.
inline constexpr double kRightEquilibrium = 0.6180339887498949;   // (-1 + sqrt 5) / 2
inline constexpr double kLeftEquilibrium = -1.618033988749895;    // (-1 - sqrt 5) / 2

struct SimulationConfig {
    std::vector<std::pair<double, double>> initial_conditions;  // (y0, dy0)
    double dt = 0.1;
    double duration = 50.0;
    bool forced = true;  // u(t) = 0.1 cos(0.2 pi t); otherwise u = 0
    std::uint64_t seed = 0;
};

// Classical RK4 integration at fixed step `dt`; one TimeSeries per initial
// condition, with u sampled at the same instants.
std::vector<TimeSeries> simulate_dse(const SimulationConfig& config);

// Forcing signal used by the simulated datasets.
double dse_input(double t);

// Which stable equilibrium the unforced flow reaches from (y0, dy0).
// Returns "left" or "right"; throws NumericError if neither is reached.
std::string classify_basin(double y0, double dy0, double dt = 0.1);

struct Trajectory {
    TimeSeries series;
    std::string tag;   // "left", "right", or "" for benchmark data
    std::string role;  // "train" or "test"
};

struct Dataset {
    std::string name;
    std::uint64_t seed = 0;
    std::vector<Trajectory> trajectories;

    std::vector<TimeSeries> train_series() const;
    std::vector<const Trajectory*> train() const;
    std::vector<const Trajectory*> test() const;
};

// 10 forced trajectories, 5 started in each basin, plus one held-out test
// trajectory per basin. Initial conditions are drawn uniformly from a box of
// half-width 0.5 around each stable equilibrium and redrawn (seeded) if the
// trajectory ends outside the intended basin.
Dataset generate_sdse(std::uint64_t seed);

// Same construction with 2 left / 98 right training trajectories.
Dataset generate_adse(std::uint64_t seed);

// The 100-sample sine record: y = sin(2 pi t), t = j / 99 for j = 0..99.
Dataset generate_sine_demo();

Dataset generate_dataset(const std::string& kind, std::uint64_t seed);

// Per-trajectory CSVs plus a manifest.json into `dir` (created if missing).
// Returns the manifest path.
std::string save_dataset(const Dataset& dataset, const std::string& dir);

Dataset load_dataset_manifest(const std::string& manifest_path);

// Single-CSV convenience: the file becomes one train trajectory (plus an
// optional test CSV), e.g. for benchmark recordings already in t,u,y form.
Dataset dataset_from_csv(const std::string& train_csv, const std::string& test_csv,
                         const CsvSchema& schema = {});

}  // namespace narxprune
