#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/dictionary.hpp"

namespace narxprune {

// Resolved batch size: unspecified or over-large requests fall back to
// ceil(n / q), which is further capped at the feature count m.
int resolve_batch_size(int n, int q, int m, std::optional<int> requested = std::nullopt);

// Allocation of the n sample picks over (atom, batch) slots. Entries are
// filled round-robin across atoms with value p; the final nonzero entry takes
// the remainder.
struct BatchMatrix {
    std::vector<std::vector<int>> entries;  // q rows x t columns
    int p = 0;
    int t = 0;

    int total() const;
};

BatchMatrix build_batch_matrix(int n, int q, int p);

enum class PruneMethod { minibatch_fastcan, random };

std::string method_name(PruneMethod method);
PruneMethod method_from_name(const std::string& name);

struct PruneConfig {
    int n = 0;
    int q = 0;                       // 0 for random pruning
    int p = 0;                       // resolved batch size, 0 for random
    std::optional<int> requested_p;  // as passed by the caller
    std::uint64_t seed = 0;
};

struct PruneResult {
    std::vector<int> indices;  // global column indices, distinct, selection order
    PruneMethod method = PruneMethod::random;
    PruneConfig config;
    std::optional<Dictionary> dictionary;
};

// Mini-batch FastCan pruning: iterates atoms and batches, selecting
// B[i][j] samples per slot from the remaining pool with atom i as the target,
// then removing them from the pool. Deterministic given the dictionary; the
// seed is only echoed into the result config.
PruneResult prune_minibatch_fastcan(const Eigen::MatrixXd& X, const Dictionary& dictionary,
                                    int n, std::optional<int> batch_size, std::uint64_t seed);

// Uniform sampling without replacement, deterministic under the seed.
PruneResult prune_random(int candidate_count, int n, std::uint64_t seed);

}  // namespace narxprune
