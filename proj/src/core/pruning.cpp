#include "core/pruning.hpp"

#include <cmath>
#include <stdexcept>

#include "core/errors.hpp"
#include "core/fastcan.hpp"
#include "core/rng.hpp"

namespace narxprune {

int resolve_batch_size(int n, int q, int m, std::optional<int> requested) {
    if (n < 1 || q < 1 || m < 1)
        throw std::invalid_argument("resolve_batch_size needs n, q, m >= 1");
    const int cap = (n + q - 1) / q;  // ceil(n / q)
    int p = requested.value_or(0);
    if (!requested || p > cap) {
        p = cap;
        if (p > m) p = m;
    }
    if (p < 1) throw std::invalid_argument("batch size must be >= 1");
    return p;
}

int BatchMatrix::total() const {
    int sum = 0;
    for (const auto& row : entries)
        for (int v : row) sum += v;
    return sum;
}

BatchMatrix build_batch_matrix(int n, int q, int p) {
    if (n < 1 || q < 1 || p < 1)
        throw std::invalid_argument("build_batch_matrix needs n, q, p >= 1");
    BatchMatrix b;
    b.p = p;
    b.t = static_cast<int>((static_cast<long long>(n) + static_cast<long long>(q) * p - 1) /
                           (static_cast<long long>(q) * p));
    b.entries.assign(static_cast<std::size_t>(q), std::vector<int>(static_cast<std::size_t>(b.t), 0));
    int remaining = n;
    for (int j = 0; j < b.t && remaining > 0; ++j) {
        for (int i = 0; i < q && remaining > 0; ++i) {
            const int take = std::min(p, remaining);
            b.entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = take;
            remaining -= take;
        }
    }
    return b;
}

std::string method_name(PruneMethod method) {
    return method == PruneMethod::minibatch_fastcan ? "minibatch_fastcan" : "random";
}

PruneMethod method_from_name(const std::string& name) {
    if (name == "minibatch_fastcan" || name == "minibatch-fastcan" || name == "fastcan")
        return PruneMethod::minibatch_fastcan;
    if (name == "random") return PruneMethod::random;
    throw std::invalid_argument("unknown pruning method '" + name + "'");
}

PruneResult prune_minibatch_fastcan(const Eigen::MatrixXd& X, const Dictionary& dictionary,
                                    int n, std::optional<int> batch_size, std::uint64_t seed) {
    const int m = static_cast<int>(X.rows());
    const int total = static_cast<int>(X.cols());
    if (dictionary.atoms.rows() != X.rows())
        throw std::invalid_argument("dictionary atom dimension does not match feature count");
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (n > total)
        throw std::invalid_argument("n exceeds candidates (" + std::to_string(n) + " > " +
                                    std::to_string(total) + ")");

    const int q = dictionary.q;
    const int p = resolve_batch_size(n, q, m, batch_size);
    const BatchMatrix batches = build_batch_matrix(n, q, p);

    PruneResult result;
    result.method = PruneMethod::minibatch_fastcan;
    result.config = {n, q, p, batch_size, seed};
    result.dictionary = dictionary;
    result.indices.reserve(static_cast<std::size_t>(n));

    std::vector<char> active(static_cast<std::size_t>(total), 1);
    int active_count = total;

    for (int i = 0; i < q; ++i) {
        for (int j = 0; j < batches.t; ++j) {
            const int want = batches.entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (want == 0) continue;

            // compact the surviving pool; keep a map back to global indices
            Eigen::MatrixXd pool(m, active_count);
            std::vector<int> global(static_cast<std::size_t>(active_count));
            int at = 0;
            for (int c = 0; c < total; ++c) {
                if (!active[static_cast<std::size_t>(c)]) continue;
                pool.col(at) = X.col(c);
                global[static_cast<std::size_t>(at)] = c;
                ++at;
            }

            SelectionProblem problem;
            problem.candidates = std::move(pool);
            problem.target = dictionary.atoms.col(i);
            problem.k = want;
            SelectionResult sel;
            try {
                sel = select_greedy(problem);
            } catch (const NumericError& e) {
                throw NumericError("rank exhausted in batch (atom " + std::to_string(i + 1) +
                                   ", batch " + std::to_string(j + 1) + "): " + e.what());
            }
            for (int local : sel.indices) {
                const int g = global[static_cast<std::size_t>(local)];
                result.indices.push_back(g);
                active[static_cast<std::size_t>(g)] = 0;
                --active_count;
            }
        }
    }
    return result;
}

PruneResult prune_random(int candidate_count, int n, std::uint64_t seed) {
    if (candidate_count < 1) throw std::invalid_argument("candidate count must be >= 1");
    if (n < 0 || n > candidate_count)
        throw std::invalid_argument("n exceeds candidates (" + std::to_string(n) + " > " +
                                    std::to_string(candidate_count) + ")");
    Rng rng(seed);
    PruneResult result;
    result.method = PruneMethod::random;
    result.config = {n, 0, 0, std::nullopt, seed};
    result.indices = rng.sample_without_replacement(candidate_count, n);
    return result;
}

}  // namespace narxprune
