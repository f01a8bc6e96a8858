#include "core/termlib.hpp"

#include <algorithm>
#include <stdexcept>

#include "core/errors.hpp"

namespace narxprune {

std::string TermDescriptor::label() const {
    if (factors.empty()) return "1";
    std::string out;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i) out += '*';
        out += (factors[i].signal == Signal::output) ? "y(k-" : "u(k-";
        out += std::to_string(factors[i].lag);
        out += ')';
    }
    return out;
}

ShiftMatrix build_shift_matrix(const TimeSeries& series, int n_y, int n_u) {
    if (n_y < 0 || n_u < 0 || n_y + n_u < 1)
        throw std::invalid_argument("lag counts must be non-negative with n_y + n_u >= 1");
    series.validate();

    const int max_lag = std::max(n_y, n_u);
    const int total = static_cast<int>(series.size());
    const int usable = total - max_lag;
    if (usable < 1)
        throw DataError("insufficient samples: need more than " + std::to_string(max_lag) +
                        ", got " + std::to_string(total));

    ShiftMatrix out;
    out.n_y = n_y;
    out.n_u = n_u;
    out.lagged.resize(n_y + n_u, usable);
    out.target.resize(usable);
    out.time.resize(static_cast<std::size_t>(usable));

    for (int c = 0; c < usable; ++c) {
        const int k = max_lag + c;
        for (int i = 0; i < n_y; ++i)
            out.lagged(i, c) = series.y[static_cast<std::size_t>(k - (i + 1))];
        for (int i = 0; i < n_u; ++i)
            out.lagged(n_y + i, c) = series.u[static_cast<std::size_t>(k - (i + 1))];
        out.target(c) = series.y[static_cast<std::size_t>(k)];
        out.time[static_cast<std::size_t>(c)] = series.t[static_cast<std::size_t>(k)];
    }
    return out;
}

namespace {

// Multisets {i_1 <= ... <= i_d} over signals 1..n for d = 1..degree, emitted
// graded (by degree) then lexicographically. Indices are 0-based here.
void enumerate_multisets(int n_signals, int degree, std::vector<std::vector<int>>& out) {
    std::vector<int> current;
    for (int d = 1; d <= degree; ++d) {
        current.assign(static_cast<std::size_t>(d), 0);
        while (true) {
            out.push_back(current);
            int pos = d - 1;
            while (pos >= 0 && current[static_cast<std::size_t>(pos)] == n_signals - 1) --pos;
            if (pos < 0) break;
            const int next = current[static_cast<std::size_t>(pos)] + 1;
            for (int j = pos; j < d; ++j) current[static_cast<std::size_t>(j)] = next;
        }
    }
}

TermFactor factor_for_signal(int signal_index, int n_y) {
    if (signal_index < n_y) return {Signal::output, signal_index + 1};
    return {Signal::input, signal_index - n_y + 1};
}

}  // namespace

TermLibrary expand_polynomial(const ShiftMatrix& shifted, int degree) {
    if (degree < 1) throw std::invalid_argument("polynomial degree must be >= 1");
    const int n = static_cast<int>(shifted.lagged.rows());
    const Eigen::Index cols = shifted.lagged.cols();

    std::vector<std::vector<int>> multisets;
    enumerate_multisets(n, degree, multisets);

    TermLibrary lib;
    lib.config = {shifted.n_y, shifted.n_u, degree};
    lib.target = shifted.target;
    lib.X.resize(static_cast<Eigen::Index>(multisets.size()), cols);
    lib.descriptors.reserve(multisets.size());

    for (std::size_t r = 0; r < multisets.size(); ++r) {
        const auto& ms = multisets[r];
        TermDescriptor desc;
        desc.factors.reserve(ms.size());
        for (int s : ms) desc.factors.push_back(factor_for_signal(s, shifted.n_y));
        lib.descriptors.push_back(std::move(desc));

        Eigen::RowVectorXd row = shifted.lagged.row(ms[0]);
        for (std::size_t j = 1; j < ms.size(); ++j)
            row = row.cwiseProduct(shifted.lagged.row(ms[j]));
        lib.X.row(static_cast<Eigen::Index>(r)) = row;
    }
    return lib;
}

DatasetLibrary build_library(const std::vector<TimeSeries>& trajectories,
                             const LibraryConfig& config) {
    if (trajectories.empty()) throw std::invalid_argument("no trajectories");

    std::vector<TermLibrary> parts;
    parts.reserve(trajectories.size());
    Eigen::Index total_cols = 0;
    for (const auto& series : trajectories) {
        parts.push_back(expand_polynomial(build_shift_matrix(series, config.n_y, config.n_u),
                                          config.degree));
        total_cols += parts.back().n_samples();
    }

    DatasetLibrary out;
    out.library.config = config;
    out.library.descriptors = parts.front().descriptors;
    out.library.X.resize(parts.front().n_terms(), total_cols);
    out.library.target.resize(total_cols);
    out.column_source.reserve(static_cast<std::size_t>(total_cols));

    Eigen::Index at = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const Eigen::Index w = parts[i].n_samples();
        out.library.X.middleCols(at, w) = parts[i].X;
        out.library.target.segment(at, w) = parts[i].target;
        out.column_source.insert(out.column_source.end(), static_cast<std::size_t>(w), i);
        at += w;
    }
    return out;
}

std::uint64_t full_term_count(int n_signals, int degree) {
    // C(n + l, l) computed multiplicatively
    std::uint64_t num = 1;
    for (int i = 1; i <= degree; ++i) {
        num = num * static_cast<std::uint64_t>(n_signals + i) / static_cast<std::uint64_t>(i);
    }
    return num;
}

}  // namespace narxprune
