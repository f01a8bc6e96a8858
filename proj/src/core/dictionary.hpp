#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace narxprune {

// K-means centroids over the sample columns of a feature matrix; the pruning
// step uses each atom as a selection target.
struct Dictionary {
    Eigen::MatrixXd atoms;  // features x q
    int q = 0;
    double inertia = 0.0;   // final sum of squared distances to nearest atoms
    std::uint64_t seed = 0;
    std::vector<double> inertia_history;  // per full-batch iteration, when applicable
};

struct KMeansOptions {
    int batch_size = -1;   // -1: min(256, N); batch_size >= N runs full Lloyd steps
    int iterations = 100;
    bool refine_full_batch = true;  // one Lloyd pass after the mini-batch loop
};

// Mini-batch k-means on the columns of X (points in R^m), D^2-weighted
// probabilistic seeding, deterministic for a given (X, q, seed, options).
// Empty clusters are reseeded to the sample farthest from their centre.
Dictionary learn_dictionary(const Eigen::MatrixXd& X, int q, std::uint64_t seed,
                            const KMeansOptions& options = {});

}  // namespace narxprune
