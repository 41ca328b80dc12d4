#include "flowcast/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace flowcast {

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        fields.push_back(field);
    }
    return fields;
}

// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

}  // namespace

std::int64_t parse_timestamp(const std::string& text) {
    int y, mo, d, h = 0, mi = 0;
    double sec = 0.0;
    char sep;
    if (std::sscanf(text.c_str(), "%d-%d-%d%c%d:%d:%lf", &y, &mo, &d, &sep, &h, &mi, &sec) >= 3) {
        return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 +
               static_cast<std::int64_t>(sec);
    }
    try {
        return static_cast<std::int64_t>(std::stod(text));
    } catch (const std::exception&) {
        throw NonUniformInterval("unparseable timestamp: " + text);
    }
}

std::vector<std::vector<std::string>> read_csv_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        rows.push_back(split_row(line));
    }
    return rows;
}

IngestResult ingest_csv(const std::string& path, const ColumnMap& columns) {
    const auto rows = read_csv_rows(path);
    if (rows.empty()) throw EmptyFile("no rows in " + path);

    const auto& header = rows.front();
    auto column_index = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw MissingColumn("missing column '" + name + "' in " + path);
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t ts_col = column_index(columns.timestamp);
    const std::size_t flow_col = column_index(columns.flow);
    std::size_t site_col = 0;
    const bool filter_site = !columns.site.empty();
    if (filter_site) site_col = column_index(columns.site);

    std::vector<std::int64_t> stamps;
    std::vector<double> flows;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() <= std::max(ts_col, flow_col)) {
            throw NonUniformInterval("short row " + std::to_string(r) + " in " + path);
        }
        if (filter_site && row[site_col] != columns.site_id) continue;
        const double flow = std::stod(row[flow_col]);
        if (!std::isfinite(flow) || flow < 0.0) {
            throw Error("invalid flow value at row " + std::to_string(r));
        }
        stamps.push_back(parse_timestamp(row[ts_col]));
        flows.push_back(flow);
    }
    if (flows.empty()) throw EmptyFile("no data rows in " + path);
    if (flows.size() == 1) {
        IngestResult result;
        TimeSeries s;
        s.values = flows;
        s.interval_minutes = 1.0;
        result.segments.push_back(std::move(s));
        result.report = {1, 0, 1, 1.0};
        return result;
    }

    // Base interval = smallest positive gap; every gap must be an integer
    // multiple of it.
    std::int64_t interval_s = 0;
    for (std::size_t i = 1; i < stamps.size(); ++i) {
        const std::int64_t gap = stamps[i] - stamps[i - 1];
        if (gap <= 0) throw NonUniformInterval("timestamps not strictly increasing");
        if (interval_s == 0 || gap < interval_s) interval_s = gap;
    }

    IngestResult result;
    result.report.interval_minutes = static_cast<double>(interval_s) / 60.0;

    TimeSeries current;
    current.interval_minutes = result.report.interval_minutes;
    current.origin_index = 0;
    current.values.push_back(flows[0]);
    std::int64_t origin_counter = 0;

    for (std::size_t i = 1; i < stamps.size(); ++i) {
        const std::int64_t gap = stamps[i] - stamps[i - 1];
        if (gap % interval_s != 0) {
            throw NonUniformInterval("gap of " + std::to_string(gap) +
                                     "s is not a multiple of the base interval");
        }
        const std::int64_t steps = gap / interval_s;
        if (steps == 1) {
            current.values.push_back(flows[i]);
        } else if (steps == 2) {
            current.values.push_back(0.5 * (flows[i - 1] + flows[i]));
            current.values.push_back(flows[i]);
            ++result.report.gaps_filled;
        } else {
            origin_counter += static_cast<std::int64_t>(current.values.size()) + steps - 1;
            result.segments.push_back(std::move(current));
            current = TimeSeries{};
            current.interval_minutes = result.report.interval_minutes;
            current.origin_index = origin_counter;
            current.values.push_back(flows[i]);
        }
    }
    result.segments.push_back(std::move(current));
    result.report.segments = result.segments.size();
    for (const auto& s : result.segments) result.report.rows_used += s.values.size();
    return result;
}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_flow_csv(const std::string& path, const TimeSeries& series,
                    std::int64_t start_epoch_seconds) {
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot write " + path);
    out << "timestamp,flow\n";
    const std::int64_t step = static_cast<std::int64_t>(series.interval_minutes * 60.0);
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        out << (start_epoch_seconds + static_cast<std::int64_t>(i) * step) << ','
            << format_double(series.values[i]) << '\n';
    }
    if (!out) throw IoFailure("write failed: " + path);
}

void write_imf_csv(const std::string& path, const Decomposition& decomposition) {
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot write " + path);
    out << 't';
    for (std::size_t m = 0; m < decomposition.imfs.size(); ++m) out << ",imf_" << (m + 1);
    out << ",residue\n";
    for (std::size_t t = 0; t < decomposition.length(); ++t) {
        out << t;
        for (const auto& imf : decomposition.imfs) out << ',' << format_double(imf[t]);
        out << ',' << format_double(decomposition.residue[t]) << '\n';
    }
    if (!out) throw IoFailure("write failed: " + path);
}

}  // namespace flowcast
