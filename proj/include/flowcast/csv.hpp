#ifndef FLOWCAST_CSV_HPP
#define FLOWCAST_CSV_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "flowcast/time_series.hpp"

namespace flowcast {

struct ColumnMap {
    std::string timestamp = "timestamp";
    std::string flow = "flow";
    std::string site;     // optional site-id column for multi-site files
    std::string site_id;  // row filter applied when `site` is set
};

struct IngestReport {
    std::size_t rows_used = 0;
    std::size_t gaps_filled = 0;   // single-sample gaps, linearly interpolated
    std::size_t segments = 0;      // longer gaps split the series
    double interval_minutes = 0.0;
};

struct IngestResult {
    std::vector<TimeSeries> segments;
    IngestReport report;

    // Single contiguous series; throws if the file had long gaps.
    const TimeSeries& single() const {
        if (segments.size() != 1) {
            throw NonUniformInterval("ingest: expected one contiguous segment, got " +
                                     std::to_string(segments.size()));
        }
        return segments.front();
    }
};

// Header row required. Timestamps are ISO-8601 ("YYYY-MM-DD HH:MM:SS",
// 'T' separator accepted) or epoch seconds; rows must be time-sorted and
// flow values non-negative. Single-sample gaps are filled by linear
// interpolation; longer gaps start a new segment.
IngestResult ingest_csv(const std::string& path, const ColumnMap& columns);

// Epoch seconds for an ISO-8601 timestamp or numeric literal.
std::int64_t parse_timestamp(const std::string& text);

void write_flow_csv(const std::string& path, const TimeSeries& series,
                    std::int64_t start_epoch_seconds = 1451606400 /* 2016-01-01 */);

// IMF dump: t, imf_1..imf_m, residue.
void write_imf_csv(const std::string& path, const Decomposition& decomposition);

std::vector<std::vector<std::string>> read_csv_rows(const std::string& path);

// Shortest round-trip decimal formatting; used everywhere a number is
// written so emitted files are byte-deterministic.
std::string format_double(double v);

}  // namespace flowcast

#endif  // FLOWCAST_CSV_HPP
