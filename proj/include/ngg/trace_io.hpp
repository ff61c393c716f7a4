#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "ngg/errors.hpp"
#include "ngg/metrics.hpp"

namespace ngg {

inline constexpr std::string_view kTraceHeader = "iteration,n_total,n_diff,sr,group_size,n_transmitted";

/// Shortest decimal text that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline void write_trace_csv(const std::filesystem::path& path, std::span<const TraceRecord> trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << kTraceHeader << '\n';
  for (const TraceRecord& r : trace)
    out << r.iteration << ',' << r.n_total << ',' << r.n_diff << ',' << format_double(r.sr) << ',' << r.group_size
        << ',' << r.n_transmitted << '\n';
}

inline void write_averaged_csv(const std::filesystem::path& path, std::span<const AveragedRecord> trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << kTraceHeader << '\n';
  for (const AveragedRecord& r : trace)
    out << r.iteration << ',' << format_double(r.n_total) << ',' << format_double(r.n_diff) << ','
        << format_double(r.sr) << ',' << format_double(r.group_size) << ',' << format_double(r.n_transmitted) << '\n';
}

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

template <typename T>
T parse_cell(std::string_view cell, const std::string& where) {
  T value{};
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
    throw ParseError(where + ": bad value '" + std::string(cell) + "'");
  return value;
}

template <typename Row>
std::vector<Row> read_rows(const std::filesystem::path& path, Row (*parse)(const std::vector<std::string_view>&,
                                                                           const std::string&)) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) throw ParseError(path.string() + ": header must be '" + std::string(kTraceHeader) + "'");
  std::vector<Row> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (cells.size() != 6) throw ParseError(where + ": expected 6 columns");
    rows.push_back(parse(cells, where));
  }
  return rows;
}

}  // namespace detail

/// Reads a per-run trace written by write_trace_csv. Throws ParseError.
inline MetricsTrace read_trace_csv(const std::filesystem::path& path) {
  return detail::read_rows<TraceRecord>(path, +[](const std::vector<std::string_view>& c, const std::string& where) {
    return TraceRecord{detail::parse_cell<std::uint64_t>(c[0], where), detail::parse_cell<std::size_t>(c[1], where),
                       detail::parse_cell<std::size_t>(c[2], where),   detail::parse_cell<double>(c[3], where),
                       detail::parse_cell<std::size_t>(c[4], where),   detail::parse_cell<std::size_t>(c[5], where)};
  });
}

/// Reads either a per-run or an averaged trace; all columns as doubles.
inline std::vector<AveragedRecord> read_trace_csv_as_doubles(const std::filesystem::path& path) {
  return detail::read_rows<AveragedRecord>(
      path, +[](const std::vector<std::string_view>& c, const std::string& where) {
        return AveragedRecord{detail::parse_cell<std::uint64_t>(c[0], where), detail::parse_cell<double>(c[1], where),
                              detail::parse_cell<double>(c[2], where),        detail::parse_cell<double>(c[3], where),
                              detail::parse_cell<double>(c[4], where),        detail::parse_cell<double>(c[5], where)};
      });
}

}  // namespace ngg
