#include "core/fastcan.hpp"

#include <cmath>
#include <stdexcept>

#include "core/errors.hpp"

namespace narxprune {

namespace {

void center_columns(Eigen::MatrixXd& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m.col(c).array() -= m.col(c).mean();
}

}  // namespace

SelectionResult select_greedy(const SelectionProblem& problem) {
    const Eigen::Index obs = problem.candidates.rows();
    const Eigen::Index n_cand = problem.candidates.cols();
    const Eigen::Index n_targ = problem.target.cols();

    if (obs < 2) throw std::invalid_argument("selection needs at least 2 observations");
    if (problem.target.rows() != obs)
        throw std::invalid_argument("candidates and target observation counts differ");
    if (n_targ < 1) throw std::invalid_argument("target must have at least one column");
    if (problem.k < 0 || problem.k > n_cand)
        throw std::invalid_argument("k out of range for candidate count");

    Eigen::MatrixXd residual = problem.candidates;
    center_columns(residual);
    Eigen::VectorXd base_norm(n_cand);
    for (Eigen::Index j = 0; j < n_cand; ++j) base_norm(j) = residual.col(j).norm();

    Eigen::MatrixXd target = problem.target;
    center_columns(target);
    Eigen::VectorXd target_norm(n_targ);
    bool any_target = false;
    for (Eigen::Index c = 0; c < n_targ; ++c) {
        target_norm(c) = target.col(c).norm();
        if (target_norm(c) > 0.0) any_target = true;
    }
    if (!any_target) throw DataError("degenerate target: all target columns are constant");

    // Orthonormal basis of the selected (and preselected) candidate residuals.
    Eigen::MatrixXd basis(obs, static_cast<Eigen::Index>(problem.preselected.size()) + problem.k);
    Eigen::Index basis_size = 0;
    std::vector<char> taken(static_cast<std::size_t>(n_cand), 0);

    auto deflate_all = [&](const Eigen::VectorXd& q) {
        for (Eigen::Index j = 0; j < n_cand; ++j) {
            if (taken[static_cast<std::size_t>(j)]) continue;
            residual.col(j) -= q * q.dot(residual.col(j));
        }
    };

    auto append_basis = [&](Eigen::Index index) {
        Eigen::VectorXd q = residual.col(index);
        // one re-orthogonalization pass keeps the basis tight
        for (Eigen::Index b = 0; b < basis_size; ++b) q -= basis.col(b) * basis.col(b).dot(q);
        const double norm = q.norm();
        if (norm <= 0.0) return false;
        q /= norm;
        basis.col(basis_size++) = q;
        deflate_all(q);
        return true;
    };

    for (int pre : problem.preselected) {
        if (pre < 0 || pre >= n_cand) throw std::invalid_argument("preselected index out of range");
        if (taken[static_cast<std::size_t>(pre)]) continue;
        taken[static_cast<std::size_t>(pre)] = 1;
        if (base_norm(pre) > 0.0 &&
            residual.col(pre).norm() >= kRankTolerance * base_norm(pre)) {
            append_basis(pre);
        }
    }

    SelectionResult result;
    result.indices.reserve(static_cast<std::size_t>(problem.k));
    result.scores.reserve(static_cast<std::size_t>(problem.k));

    for (int step = 0; step < problem.k; ++step) {
        int best = -1;
        double best_score = -1.0;
        for (Eigen::Index j = 0; j < n_cand; ++j) {
            if (taken[static_cast<std::size_t>(j)]) continue;
            if (base_norm(j) <= 0.0) continue;  // constant candidate, score 0 and unusable
            const double norm = residual.col(j).norm();
            if (norm < kRankTolerance * base_norm(j)) continue;  // numerically exhausted
            double score = 0.0;
            for (Eigen::Index c = 0; c < n_targ; ++c) {
                if (target_norm(c) <= 0.0) continue;
                const double r = residual.col(j).dot(target.col(c)) / (norm * target_norm(c));
                score += r * r;
            }
            if (score > best_score) {  // ties keep the smallest index
                best_score = score;
                best = static_cast<int>(j);
            }
        }
        if (best < 0)
            throw NumericError("rank exhausted: no usable candidate left after " +
                               std::to_string(step) + " of " + std::to_string(problem.k) +
                               " selections");
        taken[static_cast<std::size_t>(best)] = 1;
        append_basis(best);
        result.indices.push_back(best);
        result.scores.push_back(best_score);
    }
    return result;
}

}  // namespace narxprune
