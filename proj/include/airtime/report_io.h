// CSV output for experiment reports.
//
// <out>/summary.csv    one row per (cell, method), cells in run order
// <out>/<cell>/windows.csv   one row per measurement window
// <out>/<cell>/plot.svg      optional
//
// Cells are named "rate_<bps>" in fixed mode and "adaptive" otherwise.
// Numbers use the shortest text that reads back to the same double; a
// missing estimate is an empty field.

#ifndef AIRTIME_REPORT_IO_H_
#define AIRTIME_REPORT_IO_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "airtime/harness.h"

namespace airtime {

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kWindowsHeader =
    "window_index,t_start_us,tx_bits,tx_us,backoff_us,other_us,idle_us,"
    "attempts,intended,queue_bits,measured_bps,sp_add_bps,ss_add_bps,"
    "total_sp_bps,total_ss_bps,avail_tx_rate_bps,tx_delay_us,tx_jitter_us";
inline constexpr const char* kSummaryHeader =
    "scenario,rate,method,seed,capacity_bps,windows,band,mean_measured_bps,"
    "mean_additional_bps,mean_total_bps,in_band_fraction";

void WriteWindowsCsv(std::ostream& out, const std::vector<WindowRow>& rows);
void WriteSummaryCsv(std::ostream& out, const std::vector<SummaryRow>& rows,
                     double band);
std::vector<WindowRow> ReadWindowsCsv(std::istream& in);

struct SummaryFile {
  std::vector<SummaryRow> rows;
  std::vector<double> bands;  // parallel to rows
};
SummaryFile ReadSummaryCsv(std::istream& in);

std::string CellDirectoryFor(const std::string& rate);

// Writes every file; throws ReportError naming the path on I/O failure.
void WriteReport(const RunReport& report, double band,
                 const std::filesystem::path& dir, bool plot);

struct LoadedReport {
  std::vector<SummaryRow> summary;
  std::map<std::string, std::vector<WindowRow>> cells;  // by directory
};

// Reads a report directory and recomputes every summary row from its
// windows.csv; throws ReportError on mismatch or malformed input.
LoadedReport LoadReport(const std::filesystem::path& dir);

// Human-readable side-by-side table.
void WriteComparison(std::ostream& out,
                     const std::vector<ComparisonRow>& rows);

}  // namespace airtime

#endif  // AIRTIME_REPORT_IO_H_
