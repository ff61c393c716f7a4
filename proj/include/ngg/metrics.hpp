#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ngg/engine.hpp"
#include "ngg/errors.hpp"
#include "ngg/population.hpp"

namespace ngg {

/// Population totals after one completed round.
struct TraceRecord {
  std::uint64_t iteration = 0;
  std::size_t n_total = 0;
  std::size_t n_diff = 0;
  double sr = 0.0;
  std::size_t group_size = 0;
  std::size_t n_transmitted = 0;
  bool operator==(const TraceRecord&) const = default;
};

using MetricsTrace = std::vector<TraceRecord>;

struct RunSummary {
  std::size_t n_total_max = 0;
  std::size_t n_diff_max = 0;
  std::optional<std::uint64_t> n_iter_cvg;
  std::optional<WordId> converged_word;
  bool converged = false;
  bool operator==(const RunSummary&) const = default;
};

inline TraceRecord snapshot(const PopulationState& pop, const RoundOutcome& outcome, std::uint64_t iteration) {
  return {iteration, pop.total_words(), pop.distinct_words(), outcome.sr, outcome.group_size,
          outcome.transmitted.size()};
}

/// Trace maxima and the first iteration at which all M memories held one
/// common word (n_diff == 1 and n_total == M). Throws EmptyTrace.
inline RunSummary summarize(std::span<const TraceRecord> trace, std::size_t m) {
  if (trace.empty()) throw EmptyTrace("cannot summarize an empty trace");
  RunSummary s;
  for (const TraceRecord& r : trace) {
    s.n_total_max = std::max(s.n_total_max, r.n_total);
    s.n_diff_max = std::max(s.n_diff_max, r.n_diff);
    if (!s.converged && r.n_diff == 1 && r.n_total == m) {
      s.converged = true;
      s.n_iter_cvg = r.iteration;
    }
  }
  return s;
}

/// Per-iteration means across runs.
struct AveragedRecord {
  std::uint64_t iteration = 0;
  double n_total = 0.0;
  double n_diff = 0.0;
  double sr = 0.0;
  double group_size = 0.0;
  double n_transmitted = 0.0;
};

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for fewer than two values
  std::size_t count = 0;
};

struct SummaryStats {
  MeanStd n_total_max;
  MeanStd n_diff_max;
  MeanStd n_iter_cvg;  // converged runs only
  std::size_t runs = 0;
  std::size_t converged_runs = 0;
  double convergence_rate() const noexcept {
    return runs == 0 ? 0.0 : static_cast<double>(converged_runs) / static_cast<double>(runs);
  }
};

struct AveragedRuns {
  std::vector<AveragedRecord> trace;
  SummaryStats summary;
};

/// Mean and sample standard deviation. Values are summed in sorted order so
/// the result does not depend on the order of the input.
inline MeanStd mean_std(std::vector<double> values) {
  MeanStd out;
  out.count = values.size();
  if (values.empty()) return out;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    std::vector<double> sq;
    sq.reserve(values.size());
    for (double v : values) sq.push_back((v - out.mean) * (v - out.mean));
    std::sort(sq.begin(), sq.end());
    double ss = 0.0;
    for (double v : sq) ss += v;
    out.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

inline SummaryStats summary_stats(std::span<const RunSummary> summaries) {
  SummaryStats st;
  st.runs = summaries.size();
  std::vector<double> totals, diffs, iters;
  for (const RunSummary& s : summaries) {
    totals.push_back(static_cast<double>(s.n_total_max));
    diffs.push_back(static_cast<double>(s.n_diff_max));
    if (s.converged && s.n_iter_cvg) {
      iters.push_back(static_cast<double>(*s.n_iter_cvg));
      ++st.converged_runs;
    }
  }
  st.n_total_max = mean_std(std::move(totals));
  st.n_diff_max = mean_std(std::move(diffs));
  st.n_iter_cvg = mean_std(std::move(iters));
  return st;
}

/// Averages traces of unequal length.
///
/// A run shorter than the longest one is padded: a converged run with its
/// absorbing values (final n_total and n_diff, sr = 1), a run that stopped
/// without converging with its last record. group_size and n_transmitted are
/// padded with the run's last record in both cases.
inline AveragedRuns average_runs(std::span<const MetricsTrace> traces, std::span<const RunSummary> summaries) {
  AveragedRuns out;
  out.summary = summary_stats(summaries);

  std::size_t longest = 0;
  for (const auto& t : traces) longest = std::max(longest, t.size());
  out.trace.resize(longest);

  std::vector<double> sr_column;
  for (std::size_t it = 0; it < longest; ++it) {
    std::uint64_t total = 0, diff = 0, group = 0, transmitted = 0;
    sr_column.clear();
    std::size_t contributing = 0;
    for (std::size_t r = 0; r < traces.size(); ++r) {
      const auto& t = traces[r];
      if (t.empty()) continue;
      ++contributing;
      const bool padded = it >= t.size();
      const TraceRecord& rec = padded ? t.back() : t[it];
      const bool absorbing = padded && r < summaries.size() && summaries[r].converged;
      total += rec.n_total;
      diff += rec.n_diff;
      group += rec.group_size;
      transmitted += rec.n_transmitted;
      sr_column.push_back(absorbing ? 1.0 : rec.sr);
    }
    std::sort(sr_column.begin(), sr_column.end());
    double sr_sum = 0.0;
    for (double v : sr_column) sr_sum += v;
    const auto n = static_cast<double>(contributing);
    out.trace[it] = {it + 1,
                     static_cast<double>(total) / n,
                     static_cast<double>(diff) / n,
                     sr_sum / n,
                     static_cast<double>(group) / n,
                     static_cast<double>(transmitted) / n};
  }
  return out;
}

}  // namespace ngg
