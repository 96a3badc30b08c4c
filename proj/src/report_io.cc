#include "airtime/report_io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "airtime/svg_plot.h"
#include "airtime/topology.h"

namespace airtime {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string Field(double value) {
  return std::isnan(value) ? std::string() : FormatNumber(value);
}

std::string Quote(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw ReportError("unterminated quote in CSV line");
  return fields;
}

template <typename T>
T ParseField(const std::string& text, const char* column) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ReportError(std::string("bad value '") + text + "' in column " +
                      column);
  }
  return value;
}

double ParseOptional(const std::string& text, const char* column) {
  return text.empty() ? kNaN : ParseField<double>(text, column);
}

std::vector<std::vector<std::string>> ReadTable(std::istream& in,
                                                const char* header) {
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw ReportError(std::string("expected header: ") + header);
  }
  std::vector<std::vector<std::string>> table;
  const size_t columns = SplitCsvLine(header).size();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = SplitCsvLine(line);
    if (fields.size() != columns) {
      throw ReportError("row has " + std::to_string(fields.size()) +
                        " fields, expected " + std::to_string(columns));
    }
    table.push_back(std::move(fields));
  }
  return table;
}

bool SameValue(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b));
}

std::ofstream OpenForWrite(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ReportError("cannot write " + path.string());
  return out;
}

void Finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw ReportError("write failed: " + path.string());
}

}  // namespace

void WriteWindowsCsv(std::ostream& out, const std::vector<WindowRow>& rows) {
  out << kWindowsHeader << '\n';
  for (const WindowRow& r : rows) {
    out << r.window_index << ',' << r.t_start_us << ',' << r.tx_bits << ','
        << r.tx_us << ',' << r.backoff_us << ',' << r.other_us << ','
        << r.idle_us << ',' << r.attempts << ',' << r.intended << ','
        << r.queue_bits << ',' << Field(r.measured_bps) << ','
        << Field(r.sp_add_bps) << ',' << Field(r.ss_add_bps) << ','
        << Field(r.total_sp_bps) << ',' << Field(r.total_ss_bps) << ','
        << Field(r.avail_tx_rate_bps) << ',' << Field(r.tx_delay_us) << ','
        << Field(r.tx_jitter_us) << '\n';
  }
}

void WriteSummaryCsv(std::ostream& out, const std::vector<SummaryRow>& rows,
                     double band) {
  out << kSummaryHeader << '\n';
  for (const SummaryRow& r : rows) {
    out << Quote(r.scenario) << ',' << Quote(r.rate) << ','
        << ToString(r.method) << ',' << r.seed << ','
        << Field(r.capacity_bps) << ',' << r.windows << ',' << Field(band)
        << ',' << Field(r.mean_measured_bps) << ','
        << Field(r.mean_additional_bps) << ',' << Field(r.mean_total_bps)
        << ',' << Field(r.in_band_fraction) << '\n';
  }
}

std::vector<WindowRow> ReadWindowsCsv(std::istream& in) {
  std::vector<WindowRow> rows;
  for (const auto& f : ReadTable(in, kWindowsHeader)) {
    WindowRow r;
    r.window_index = ParseField<int64_t>(f[0], "window_index");
    r.t_start_us = ParseField<int64_t>(f[1], "t_start_us");
    r.tx_bits = ParseField<int64_t>(f[2], "tx_bits");
    r.tx_us = ParseField<int64_t>(f[3], "tx_us");
    r.backoff_us = ParseField<int64_t>(f[4], "backoff_us");
    r.other_us = ParseField<int64_t>(f[5], "other_us");
    r.idle_us = ParseField<int64_t>(f[6], "idle_us");
    r.attempts = ParseField<int64_t>(f[7], "attempts");
    r.intended = ParseField<int64_t>(f[8], "intended");
    r.queue_bits = ParseField<int64_t>(f[9], "queue_bits");
    r.measured_bps = ParseField<double>(f[10], "measured_bps");
    r.sp_add_bps = ParseOptional(f[11], "sp_add_bps");
    r.ss_add_bps = ParseOptional(f[12], "ss_add_bps");
    r.total_sp_bps = ParseOptional(f[13], "total_sp_bps");
    r.total_ss_bps = ParseOptional(f[14], "total_ss_bps");
    r.avail_tx_rate_bps = ParseOptional(f[15], "avail_tx_rate_bps");
    r.tx_delay_us = ParseOptional(f[16], "tx_delay_us");
    r.tx_jitter_us = ParseOptional(f[17], "tx_jitter_us");
    rows.push_back(r);
  }
  return rows;
}

SummaryFile ReadSummaryCsv(std::istream& in) {
  SummaryFile file;
  for (const auto& f : ReadTable(in, kSummaryHeader)) {
    SummaryRow r;
    r.scenario = f[0];
    r.rate = f[1];
    if (f[2] == "sp") {
      r.method = Method::kSp;
    } else if (f[2] == "ss") {
      r.method = Method::kSs;
    } else {
      throw ReportError("bad method '" + f[2] + "'");
    }
    r.seed = ParseField<uint64_t>(f[3], "seed");
    r.capacity_bps = ParseField<double>(f[4], "capacity_bps");
    r.windows = ParseField<int64_t>(f[5], "windows");
    file.bands.push_back(ParseField<double>(f[6], "band"));
    r.mean_measured_bps = ParseOptional(f[7], "mean_measured_bps");
    r.mean_additional_bps = ParseOptional(f[8], "mean_additional_bps");
    r.mean_total_bps = ParseOptional(f[9], "mean_total_bps");
    r.in_band_fraction = ParseOptional(f[10], "in_band_fraction");
    file.rows.push_back(std::move(r));
  }
  return file;
}

std::string CellDirectoryFor(const std::string& rate) {
  return rate == "adaptive" ? rate : "rate_" + rate;
}

void WriteReport(const RunReport& report, double band,
                 const std::filesystem::path& dir, bool plot) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ReportError("cannot create " + dir.string());
  std::vector<SummaryRow> summary;
  for (const CellReport& cell : report.cells) {
    const std::filesystem::path cell_dir = dir / cell.name;
    std::filesystem::create_directories(cell_dir, ec);
    if (ec) throw ReportError("cannot create " + cell_dir.string());
    const std::filesystem::path windows = cell_dir / "windows.csv";
    std::ofstream out = OpenForWrite(windows);
    WriteWindowsCsv(out, cell.rows);
    Finish(out, windows);
    if (plot) {
      const std::filesystem::path svg = cell_dir / "plot.svg";
      std::ofstream svg_out = OpenForWrite(svg);
      WriteCellSvg(svg_out, report.scenario + " @ " + cell.rate, cell.rows,
                   report.capacity_bps, band);
      Finish(svg_out, svg);
    }
    summary.insert(summary.end(), cell.summary.begin(), cell.summary.end());
  }
  const std::filesystem::path path = dir / "summary.csv";
  std::ofstream out = OpenForWrite(path);
  WriteSummaryCsv(out, summary, band);
  Finish(out, path);
}

LoadedReport LoadReport(const std::filesystem::path& dir) {
  const std::filesystem::path summary_path = dir / "summary.csv";
  std::ifstream summary_in(summary_path, std::ios::binary);
  if (!summary_in) throw ReportError("cannot read " + summary_path.string());
  SummaryFile file = ReadSummaryCsv(summary_in);
  LoadedReport report;
  for (size_t i = 0; i < file.rows.size(); ++i) {
    const SummaryRow& row = file.rows[i];
    const std::string cell = CellDirectoryFor(row.rate);
    if (!report.cells.count(cell)) {
      const std::filesystem::path path = dir / cell / "windows.csv";
      std::ifstream in(path, std::ios::binary);
      if (!in) throw ReportError("cannot read " + path.string());
      try {
        report.cells[cell] = ReadWindowsCsv(in);
      } catch (const ReportError& e) {
        throw ReportError(path.string() + ": " + e.what());
      }
    }
    const std::vector<WindowRow>& rows = report.cells[cell];
    const int64_t warmup = static_cast<int64_t>(rows.size()) - row.windows;
    if (warmup < 0) {
      throw ReportError("summary for " + cell + " counts more windows than " +
                        "windows.csv holds");
    }
    const SummaryRow again =
        Summarize(rows, row.method, static_cast<int>(warmup), row.capacity_bps,
                  file.bands[i]);
    if (!SameValue(again.mean_measured_bps, row.mean_measured_bps) ||
        !SameValue(again.mean_additional_bps, row.mean_additional_bps) ||
        !SameValue(again.mean_total_bps, row.mean_total_bps) ||
        !SameValue(again.in_band_fraction, row.in_band_fraction)) {
      throw ReportError("summary row for " + cell + "/" +
                        std::string(ToString(row.method)) +
                        " does not match its windows.csv");
    }
  }
  report.summary = std::move(file.rows);
  return report;
}

void WriteComparison(std::ostream& out,
                     const std::vector<ComparisonRow>& rows) {
  auto mbps = [](double bps) {
    std::ostringstream s;
    if (std::isnan(bps)) {
      s << "-";
    } else {
      s << std::fixed << std::setprecision(3) << bps / 1e6;
    }
    return s.str();
  };
  auto fraction = [](double f) {
    std::ostringstream s;
    if (std::isnan(f)) {
      s << "-";
    } else {
      s << std::fixed << std::setprecision(3) << f;
    }
    return s.str();
  };
  out << "rate,method,side,capacity_mbps,measured_mbps,additional_mbps,"
         "total_mbps,in_band\n";
  for (const ComparisonRow& row : rows) {
    for (int side = 0; side < 2; ++side) {
      const SummaryRow& s = side == 0 ? row.left : row.right;
      out << Quote(row.rate) << ',' << ToString(row.method) << ','
          << (side == 0 ? "1" : "2") << ',' << mbps(s.capacity_bps) << ','
          << mbps(s.mean_measured_bps) << ',' << mbps(s.mean_additional_bps)
          << ',' << mbps(s.mean_total_bps) << ','
          << fraction(s.in_band_fraction) << '\n';
    }
  }
}

}  // namespace airtime
