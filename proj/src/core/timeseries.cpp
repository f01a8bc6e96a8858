#include "core/timeseries.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace narxprune {

void TimeSeries::validate() const {
    if (t.size() != u.size() || t.size() != y.size())
        throw DataError("time series columns have unequal lengths");
    if (t.size() < 2) throw DataError("time series needs at least 2 samples");
    for (double v : t)
        if (!std::isfinite(v)) throw DataError("non-finite timestamp");
    const double step = t[1] - t[0];
    if (step <= 0.0) throw DataError("time axis not strictly increasing");
    for (std::size_t k = 1; k < t.size(); ++k) {
        const double d = t[k] - t[k - 1];
        if (d <= 0.0) throw DataError("time axis not strictly increasing");
        if (std::abs(d - step) > 1e-9 * std::abs(step))
            throw DataError("non-uniform sampling");
    }
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_field(const std::string& field, const std::string& path, std::size_t line_no) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
    double value = 0.0;
    auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr != end)
        throw DataError("parse error in " + path + " at line " + std::to_string(line_no) +
                        ": bad numeric field '" + field + "'");
    return value;
}

}  // namespace

TimeSeries load_benchmark_csv(const std::string& path, const CsvSchema& schema,
                              const std::string& meta) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    std::string line;
    if (!std::getline(in, line))
        throw DataError("parse error in " + path + " at line 1: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    auto header = split_csv_line(line);
    int it = -1, iu = -1, iy = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == schema.t_col) it = static_cast<int>(c);
        if (header[c] == schema.u_col) iu = static_cast<int>(c);
        if (header[c] == schema.y_col) iy = static_cast<int>(c);
    }
    if (it < 0 || iu < 0 || iy < 0)
        throw DataError("parse error in " + path + " at line 1: header must contain columns '" +
                        schema.t_col + "', '" + schema.u_col + "', '" + schema.y_col + "'");

    TimeSeries series;
    series.meta = meta.empty() ? path : meta;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw DataError("parse error in " + path + " at line " + std::to_string(line_no) +
                            ": expected " + std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
        series.t.push_back(parse_field(fields[static_cast<std::size_t>(it)], path, line_no));
        series.u.push_back(parse_field(fields[static_cast<std::size_t>(iu)], path, line_no));
        series.y.push_back(parse_field(fields[static_cast<std::size_t>(iy)], path, line_no));
    }
    series.validate();
    return series;
}

void save_series_csv(const TimeSeries& series, const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: keep LF endings everywhere
    if (!out) throw IoError("cannot write " + path);
    out << "t,u,y\n";
    for (std::size_t k = 0; k < series.t.size(); ++k) {
        out << format_double(series.t[k]) << ',' << format_double(series.u[k]) << ','
            << format_double(series.y[k]) << '\n';
    }
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace narxprune
