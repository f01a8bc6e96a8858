#pragma once

#include <Eigen/Dense>
#include <vector>

namespace narxprune {

// Greedy canonical-correlation selection of k candidate columns against a
// target matrix. Candidates and targets are centered column-wise; selected
// candidates deflate the remainder through modified Gram-Schmidt, so each
// step scores only the part of a candidate not already explained.
struct SelectionProblem {
    Eigen::MatrixXd candidates;     // observations x candidates
    Eigen::MatrixXd target;         // observations x targets (>= 1 column)
    int k = 0;                      // number of columns to select
    std::vector<int> preselected;   // deflated against before scoring, not returned
};

struct SelectionResult {
    std::vector<int> indices;  // in selection order, no duplicates
    std::vector<double> scores;  // winning score per step, each in [0, n_targets]
};

// A candidate is unusable once its deflated norm falls below
// kRankTolerance x its centered norm; selection stops with "rank exhausted"
// if no usable candidate remains before k picks.
inline constexpr double kRankTolerance = 1e-10;

SelectionResult select_greedy(const SelectionProblem& problem);

}  // namespace narxprune
