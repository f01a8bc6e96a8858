#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "core/timeseries.hpp"

namespace narxprune {

enum class Signal : std::uint8_t { output = 0, input = 1 };

// One lagged factor of a polynomial term, e.g. y(k-2) or u(k-1).
struct TermFactor {
    Signal signal;
    int lag;  // in samples, >= 1

    friend bool operator==(const TermFactor&, const TermFactor&) = default;
};

// A product of lagged factors in canonical sorted order. Empty factor list
// denotes the intercept (degree 0), which is never a library row.
struct TermDescriptor {
    std::vector<TermFactor> factors;

    int degree() const { return static_cast<int>(factors.size()); }
    std::string label() const;  // e.g. "y(k-1)*y(k-1)*u(k-3)"

    friend bool operator==(const TermDescriptor&, const TermDescriptor&) = default;
};

struct LibraryConfig {
    int n_y = 0;
    int n_u = 0;
    int degree = 1;  // polynomial degree l

    int n_signals() const { return n_y + n_u; }
};

// Lagged signals x_1..x_n evaluated at the usable time indices of one series.
// Rows follow the canonical signal order: y lags 1..n_y, then u lags 1..n_u.
struct ShiftMatrix {
    Eigen::MatrixXd lagged;    // n x N
    Eigen::VectorXd target;    // y(k) aligned with columns
    std::vector<double> time;  // t(k) per column, for traceability
    int n_y = 0;
    int n_u = 0;
};

// Drops the max(n_y, n_u) leading samples that would reference values before
// the record start and returns the lagged signals plus the aligned target.
ShiftMatrix build_shift_matrix(const TimeSeries& series, int n_y, int n_u);

// Full candidate term matrix: one row per multiset of lagged signals with
// degree 1..l, in graded lexicographic order.
struct TermLibrary {
    Eigen::MatrixXd X;       // terms x N
    Eigen::VectorXd target;  // y(k), length N
    std::vector<TermDescriptor> descriptors;
    LibraryConfig config;

    Eigen::Index n_terms() const { return X.rows(); }
    Eigen::Index n_samples() const { return X.cols(); }
};

TermLibrary expand_polynomial(const ShiftMatrix& shifted, int degree);

// Library over a multi-trajectory dataset: each trajectory is shifted and
// expanded on its own, then the columns are concatenated so no term value
// mixes samples from two trajectories. `column_source[c]` is the index of the
// trajectory that produced column c.
struct DatasetLibrary {
    TermLibrary library;
    std::vector<std::size_t> column_source;
};

DatasetLibrary build_library(const std::vector<TimeSeries>& trajectories,
                             const LibraryConfig& config);

// (n + l)! / (n! l!), the term count including the intercept.
std::uint64_t full_term_count(int n_signals, int degree);

}  // namespace narxprune
