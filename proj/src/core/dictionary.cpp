#include "core/dictionary.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace narxprune {

namespace {

int nearest_atom(const Eigen::MatrixXd& atoms, const Eigen::VectorXd& point, double* dist2) {
    int best = 0;
    double best_d = (atoms.col(0) - point).squaredNorm();
    for (int c = 1; c < atoms.cols(); ++c) {
        const double d = (atoms.col(c) - point).squaredNorm();
        if (d < best_d) {  // ties keep the lowest atom index
            best_d = d;
            best = c;
        }
    }
    if (dist2) *dist2 = best_d;
    return best;
}

Eigen::MatrixXd seed_atoms(const Eigen::MatrixXd& X, int q, Rng& rng) {
    const Eigen::Index n = X.cols();
    Eigen::MatrixXd atoms(X.rows(), q);
    std::vector<char> chosen(static_cast<std::size_t>(n), 0);

    auto first = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    atoms.col(0) = X.col(first);
    chosen[static_cast<std::size_t>(first)] = 1;

    Eigen::VectorXd min_d2(n);
    for (Eigen::Index j = 0; j < n; ++j) min_d2(j) = (X.col(j) - atoms.col(0)).squaredNorm();

    for (int c = 1; c < q; ++c) {
        const double total = min_d2.sum();
        Eigen::Index pick = -1;
        if (total > 0.0) {
            const double r = rng.uniform01() * total;
            double acc = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                acc += min_d2(j);
                if (acc >= r) {
                    pick = j;
                    break;
                }
            }
            if (pick < 0) pick = n - 1;
        } else {
            // all remaining mass is on already-chosen points (duplicates or
            // q == N): take the first unchosen sample
            for (Eigen::Index j = 0; j < n; ++j) {
                if (!chosen[static_cast<std::size_t>(j)]) {
                    pick = j;
                    break;
                }
            }
            if (pick < 0) pick = 0;
        }
        atoms.col(c) = X.col(pick);
        chosen[static_cast<std::size_t>(pick)] = 1;
        for (Eigen::Index j = 0; j < n; ++j)
            min_d2(j) = std::min(min_d2(j), (X.col(j) - atoms.col(c)).squaredNorm());
    }
    return atoms;
}

// One Lloyd step: assign every sample, move atoms to cluster means, reseed
// empties to the sample farthest from their stale centre. Returns the inertia
// measured at assignment time (before the mean update).
double lloyd_step(const Eigen::MatrixXd& X, Eigen::MatrixXd& atoms, int max_reseed_attempts,
                  bool* changed) {
    const Eigen::Index n = X.cols();
    const int q = static_cast<int>(atoms.cols());
    std::vector<int> assign(static_cast<std::size_t>(n));

    int attempts = 0;
    while (true) {
        double inertia = 0.0;
        std::vector<Eigen::Index> counts(static_cast<std::size_t>(q), 0);
        for (Eigen::Index j = 0; j < n; ++j) {
            double d2 = 0.0;
            const int c = nearest_atom(atoms, X.col(j), &d2);
            assign[static_cast<std::size_t>(j)] = c;
            counts[static_cast<std::size_t>(c)]++;
            inertia += d2;
        }

        int empty = -1;
        for (int c = 0; c < q; ++c)
            if (counts[static_cast<std::size_t>(c)] == 0) {
                empty = c;
                break;
            }
        if (empty < 0) {
            Eigen::MatrixXd means = Eigen::MatrixXd::Zero(X.rows(), q);
            for (Eigen::Index j = 0; j < n; ++j)
                means.col(assign[static_cast<std::size_t>(j)]) += X.col(j);
            bool any = false;
            for (int c = 0; c < q; ++c) {
                means.col(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
                if ((means.col(c) - atoms.col(c)).norm() > 0.0) any = true;
            }
            atoms = means;
            if (changed) *changed = any;
            return inertia;
        }

        if (++attempts > max_reseed_attempts)
            throw NumericError("empty cluster unrecoverable after " +
                               std::to_string(max_reseed_attempts) + " reseeds");
        Eigen::Index far = 0;
        double far_d = -1.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double d = (X.col(j) - atoms.col(empty)).squaredNorm();
            if (d > far_d) {
                far_d = d;
                far = j;
            }
        }
        atoms.col(empty) = X.col(far);
    }
}

}  // namespace

Dictionary learn_dictionary(const Eigen::MatrixXd& X, int q, std::uint64_t seed,
                            const KMeansOptions& options) {
    const Eigen::Index n = X.cols();
    if (q < 1) throw std::invalid_argument("atom count must be >= 1");
    if (static_cast<Eigen::Index>(q) > n)
        throw std::invalid_argument("q exceeds sample count (" + std::to_string(q) + " > " +
                                    std::to_string(n) + ")");
    if (!X.allFinite()) throw DataError("sample matrix contains non-finite values");

    Rng rng(seed);
    Dictionary dict;
    dict.q = q;
    dict.seed = seed;
    dict.atoms = seed_atoms(X, q, rng);

    const int batch = options.batch_size < 0
                          ? static_cast<int>(std::min<Eigen::Index>(256, n))
                          : options.batch_size;
    if (batch < 1) throw std::invalid_argument("batch size must be >= 1");

    if (batch >= static_cast<int>(n)) {
        // degenerate full-batch mode: plain Lloyd iterations
        for (int it = 0; it < options.iterations; ++it) {
            bool changed = false;
            dict.inertia_history.push_back(lloyd_step(X, dict.atoms, q, &changed));
            if (!changed) break;
        }
    } else {
        // streaming mini-batch updates with per-centre learning rates
        std::vector<std::uint64_t> updates(static_cast<std::size_t>(q), 0);
        for (int it = 0; it < options.iterations; ++it) {
            const auto picks = rng.sample_without_replacement(static_cast<int>(n), batch);
            for (int j : picks) {
                const int c = nearest_atom(dict.atoms, X.col(j), nullptr);
                const double eta = 1.0 / static_cast<double>(++updates[static_cast<std::size_t>(c)]);
                dict.atoms.col(c) += eta * (X.col(j) - dict.atoms.col(c));
            }
        }
    }

    if (options.refine_full_batch) {
        bool changed = false;
        lloyd_step(X, dict.atoms, q, &changed);
    }

    dict.inertia = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        double d2 = 0.0;
        nearest_atom(dict.atoms, X.col(j), &d2);
        dict.inertia += d2;
    }
    return dict;
}

}  // namespace narxprune
