#pragma once

#include <string>
#include <vector>

namespace narxprune {

// One uniformly sampled input/output record. `u` and `y` share the time axis.
struct TimeSeries {
    std::vector<double> t;
    std::vector<double> u;
    std::vector<double> y;
    std::string meta;

    std::size_t size() const { return t.size(); }
    double dt() const { return t.size() >= 2 ? t[1] - t[0] : 0.0; }

    // Enforces equal lengths (>= 2) and a strictly increasing, uniform time
    // step within 1e-9 relative tolerance. Throws DataError otherwise.
    void validate() const;
};

// Column-name mapping for benchmark CSV ingestion.
struct CsvSchema {
    std::string t_col = "t";
    std::string u_col = "u";
    std::string y_col = "y";
};

// Reads a `t,u,y` CSV (any column order, mapped through `schema`) and returns
// a validated series. Throws DataError on parse problems (with the line
// number) or non-uniform sampling, IoError if the file cannot be opened.
TimeSeries load_benchmark_csv(const std::string& path, const CsvSchema& schema = {},
                              const std::string& meta = "");

// Writes the canonical CSV form: header `t,u,y`, shortest round-trip decimal
// literals, LF line endings. Reloading reproduces the values bit-exactly.
void save_series_csv(const TimeSeries& series, const std::string& path);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

}  // namespace narxprune
