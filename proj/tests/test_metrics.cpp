#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "ngg/metrics.hpp"
#include "ngg/netgen.hpp"
#include "ngg/simulation.hpp"
#include "ngg/trace_io.hpp"
#include "support/oracles.hpp"

namespace ngg {
namespace {

constexpr WordId W(std::uint32_t v) { return WordId{v}; }

RoundOutcome outcome(double sr, std::size_t group = 4, std::size_t words = 2) {
  RoundOutcome o;
  o.group_size = group;
  o.sr = sr;
  o.transmitted.assign(words, {W(0), 0});
  return o;
}

TraceRecord rec(std::uint64_t it, std::size_t total, std::size_t diff, double sr = 0.5) {
  return {it, total, diff, sr, 4, 2};
}

TEST(Snapshot, Examples) {
  const auto converged = PopulationState::from_memories(std::vector<AgentMemory>(1000, AgentMemory{W(8)}));
  TraceRecord r = snapshot(converged, outcome(1.0), 12);
  EXPECT_EQ(r.iteration, 12U);
  EXPECT_EQ(r.n_total, 1000U);
  EXPECT_EQ(r.n_diff, 1U);
  EXPECT_EQ(r.sr, 1.0);
  EXPECT_EQ(r.group_size, 4U);
  EXPECT_EQ(r.n_transmitted, 2U);

  r = snapshot(PopulationState(10), outcome(0.0), 1);
  EXPECT_EQ(r.n_total, 0U);
  EXPECT_EQ(r.n_diff, 0U);

  r = snapshot(PopulationState::from_memories({{W(1)}, {W(1), W(2)}}), outcome(0.25), 1);
  EXPECT_EQ(r.n_total, 3U);
  EXPECT_EQ(r.n_diff, 2U);
}

TEST(Snapshot, CountersMatchRecountDuringRuns) {
  Rng net_rng(2);
  const Network net = gen_random_graph(200, 0.05, net_rng);
  for (GameMode mode : {GameMode::NGG, GameMode::NGMH, GameMode::MinimalNG}) {
    GameParams p;
    p.group_size = 10;
    p.mode = mode;
    PopulationState pop(200);
    Rng rng(3);
    for (std::uint64_t it = 1; it <= 3000; ++it) {
      const TraceRecord r = snapshot(pop, play_round(net, pop, p, rng), it);
      const auto [total, diff] = testing::recount_words(pop);
      ASSERT_EQ(r.n_total, total);
      ASSERT_EQ(r.n_diff, diff);
      std::size_t nonempty = 0, largest = 0;
      for (const auto& mem : pop.memories()) {
        nonempty += !mem.empty();
        largest = std::max(largest, mem.size());
      }
      ASSERT_LE(r.n_diff, r.n_total);
      ASSERT_GE(r.n_total, nonempty);
      ASSERT_LE(r.n_total, 200 * largest);
    }
  }
}

TEST(Summarize, MaximaAndConvergence) {
  const MetricsTrace t{rec(1, 5, 5), rec(2, 9, 7), rec(3, 7, 3), rec(4, 4, 1), rec(5, 4, 1)};
  const RunSummary s = summarize(t, 4);
  EXPECT_EQ(s.n_total_max, 9U);
  EXPECT_EQ(s.n_diff_max, 7U);
  EXPECT_TRUE(s.converged);
  EXPECT_EQ(s.n_iter_cvg, 4U);
}

TEST(Summarize, NeverConverging) {
  const MetricsTrace t{rec(1, 2, 2), rec(2, 3, 2), rec(3, 4, 2)};
  const RunSummary s = summarize(t, 4);
  EXPECT_FALSE(s.converged);
  EXPECT_FALSE(s.n_iter_cvg);
  EXPECT_EQ(s.n_total_max, 4U);
}

TEST(Summarize, OneWordButNotEveryoneIsNotConvergence) {
  const MetricsTrace t{rec(1, 3, 1)};
  EXPECT_FALSE(summarize(t, 4).converged);
}

TEST(Summarize, EmptyTraceThrows) { EXPECT_THROW(summarize(MetricsTrace{}, 3), EmptyTrace); }

TEST(Summarize, TwoNodeReplayMatchesMemoryLog) {
  // Replays each round by hand, logging full memories, then recomputes the
  // summary from the log alone.
  const std::vector<std::pair<NodeId, NodeId>> edge{{0, 1}};
  const Network net = Network::from_edges(2, edge);
  GameParams p;
  p.group_size = 2;
  p.beta = 1.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const RunResult run = run_to_convergence(net, p, seed);

    Rng rng(seed);
    PopulationState pop(2);
    std::vector<std::vector<AgentMemory>> log;
    while (true) {
      play_round(net, pop, p, rng);
      log.emplace_back(pop.memories().begin(), pop.memories().end());
      if (is_converged(pop)) break;
    }
    std::size_t total_max = 0, diff_max = 0;
    for (const auto& mems : log) {
      std::set<WordId> all;
      std::size_t total = 0;
      for (const auto& m : mems) {
        total += m.size();
        all.insert(m.words().begin(), m.words().end());
      }
      total_max = std::max(total_max, total);
      diff_max = std::max(diff_max, all.size());
    }
    EXPECT_EQ(run.summary.n_total_max, total_max);
    EXPECT_EQ(run.summary.n_diff_max, diff_max);
    EXPECT_EQ(run.summary.n_iter_cvg, log.size());
    EXPECT_EQ(run.summary.converged_word, log.back()[0][0]);
  }
}

TEST(MeanStd, SampleStandardDeviation) {
  const MeanStd ms = mean_std({1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(ms.mean, 2.5);
  EXPECT_DOUBLE_EQ(ms.stddev, std::sqrt(5.0 / 3.0));
  EXPECT_EQ(ms.count, 4U);
  EXPECT_EQ(mean_std({7}).stddev, 0.0);
  EXPECT_EQ(mean_std({}).count, 0U);
}

TEST(SummaryStats, IterationsCountConvergedRunsOnly) {
  std::vector<RunSummary> runs(3);
  runs[0] = {10, 4, 100, W(1), true};
  runs[1] = {20, 6, std::nullopt, std::nullopt, false};
  runs[2] = {30, 8, 300, W(2), true};
  const SummaryStats st = summary_stats(runs);
  EXPECT_EQ(st.runs, 3U);
  EXPECT_EQ(st.converged_runs, 2U);
  EXPECT_DOUBLE_EQ(st.convergence_rate(), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(st.n_iter_cvg.mean, 200.0);
  EXPECT_DOUBLE_EQ(st.n_total_max.mean, 20.0);
  EXPECT_DOUBLE_EQ(st.n_diff_max.stddev, 2.0);
}

MetricsTrace converging_trace(std::size_t len, std::size_t m) {
  MetricsTrace t;
  for (std::size_t i = 1; i <= len; ++i) {
    const bool last = i == len;
    t.push_back({i, last ? m : m + len - i, last ? 1 : 1 + len - i, last ? 1.0 : 0.1 * double(i % 7), 3 + i % 2, 2});
  }
  return t;
}

TEST(AverageRuns, IdenticalRunsAverageToThemselves) {
  const MetricsTrace t = converging_trace(15, 6);
  const std::vector<MetricsTrace> traces(20, t);
  const std::vector<RunSummary> sums(20, summarize(t, 6));
  const AveragedRuns avg = average_runs(traces, sums);
  ASSERT_EQ(avg.trace.size(), t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(avg.trace[i].iteration, t[i].iteration);
    EXPECT_DOUBLE_EQ(avg.trace[i].n_total, double(t[i].n_total));
    EXPECT_DOUBLE_EQ(avg.trace[i].n_diff, double(t[i].n_diff));
    EXPECT_DOUBLE_EQ(avg.trace[i].sr, t[i].sr);
    EXPECT_DOUBLE_EQ(avg.trace[i].group_size, double(t[i].group_size));
  }
  EXPECT_EQ(avg.summary.n_iter_cvg.stddev, 0.0);
}

TEST(AverageRuns, ShortConvergedRunIsPaddedWithAbsorbingValues) {
  const MetricsTrace a = converging_trace(10, 6), b = converging_trace(20, 6);
  const std::vector<MetricsTrace> traces{a, b};
  const std::vector<RunSummary> sums{summarize(a, 6), summarize(b, 6)};
  const AveragedRuns avg = average_runs(traces, sums);
  ASSERT_EQ(avg.trace.size(), 20U);
  for (std::size_t i = 10; i < 20; ++i) {
    EXPECT_DOUBLE_EQ(avg.trace[i].n_total, (6.0 + double(b[i].n_total)) / 2);
    EXPECT_DOUBLE_EQ(avg.trace[i].n_diff, (1.0 + double(b[i].n_diff)) / 2);
    EXPECT_DOUBLE_EQ(avg.trace[i].sr, (1.0 + b[i].sr) / 2);
  }
  EXPECT_DOUBLE_EQ(avg.trace.back().n_total, 6.0);
  EXPECT_DOUBLE_EQ(avg.trace.back().n_diff, 1.0);
}

TEST(AverageRuns, StoppedRunIsPaddedWithItsLastRecord) {
  const MetricsTrace a{rec(1, 5, 3, 0.25)};
  const MetricsTrace b{rec(1, 5, 3, 0.5), rec(2, 6, 2, 0.75)};
  const std::vector<MetricsTrace> traces{a, b};
  const std::vector<RunSummary> sums{summarize(a, 6), summarize(b, 6)};
  const AveragedRuns avg = average_runs(traces, sums);
  EXPECT_DOUBLE_EQ(avg.trace[1].n_total, 5.5);
  EXPECT_DOUBLE_EQ(avg.trace[1].sr, 0.5);
}

TEST(AverageRuns, HandComputedMeans) {
  // Three runs on M=2, lengths 1, 2 and 3.
  const MetricsTrace r1{{1, 2, 1, 1.0, 2, 2}};
  const MetricsTrace r2{{1, 4, 2, 0.0, 2, 2}, {2, 2, 1, 1.0, 2, 2}};
  const MetricsTrace r3{{1, 3, 2, 0.5, 2, 1}, {2, 4, 2, 0.0, 2, 1}, {3, 2, 1, 1.0, 2, 1}};
  const std::vector<MetricsTrace> traces{r1, r2, r3};
  const std::vector<RunSummary> sums{summarize(r1, 2), summarize(r2, 2), summarize(r3, 2)};
  const AveragedRuns avg = average_runs(traces, sums);
  ASSERT_EQ(avg.trace.size(), 3U);
  const double n_total[] = {(2 + 4 + 3) / 3.0, (2 + 2 + 4) / 3.0, 2.0};
  const double n_diff[] = {(1 + 2 + 2) / 3.0, (1 + 1 + 2) / 3.0, 1.0};
  const double sr[] = {(1.0 + 0.0 + 0.5) / 3.0, (1.0 + 1.0 + 0.0) / 3.0, 1.0};
  const double transmitted[] = {5 / 3.0, 5 / 3.0, 5 / 3.0};
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(avg.trace[i].n_total, n_total[i], 1e-9);
    EXPECT_NEAR(avg.trace[i].n_diff, n_diff[i], 1e-9);
    EXPECT_NEAR(avg.trace[i].sr, sr[i], 1e-9);
    EXPECT_NEAR(avg.trace[i].n_transmitted, transmitted[i], 1e-9);
  }
  EXPECT_NEAR(avg.summary.n_iter_cvg.mean, 2.0, 1e-9);
  EXPECT_NEAR(avg.summary.n_iter_cvg.stddev, 1.0, 1e-9);
  EXPECT_NEAR(avg.summary.n_total_max.mean, 10.0 / 3.0, 1e-9);
  EXPECT_NEAR(avg.summary.n_total_max.stddev, std::sqrt(((2 - 10 / 3.0) * (2 - 10 / 3.0) + 2 * (4 - 10 / 3.0) * (4 - 10 / 3.0)) / 2), 1e-9);
}

TEST(AverageRuns, PermutationInvariant) {
  Rng net_rng(8);
  const Network net = gen_random_graph(80, 0.1, net_rng);
  GameParams p;
  p.group_size = 8;
  std::vector<MetricsTrace> traces;
  std::vector<RunSummary> sums;
  for (std::uint64_t s = 0; s < 7; ++s) {
    RunResult r = run_to_convergence(net, p, s);
    traces.push_back(std::move(r.trace));
    sums.push_back(r.summary);
  }
  const AveragedRuns base = average_runs(traces, sums);
  std::vector<std::size_t> order(traces.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937 shuffle_rng(5);
  for (int t = 0; t < 10; ++t) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    std::vector<MetricsTrace> tp;
    std::vector<RunSummary> sp;
    for (std::size_t i : order) {
      tp.push_back(traces[i]);
      sp.push_back(sums[i]);
    }
    const AveragedRuns other = average_runs(tp, sp);
    ASSERT_EQ(other.trace.size(), base.trace.size());
    for (std::size_t i = 0; i < base.trace.size(); ++i) {
      ASSERT_EQ(other.trace[i].n_total, base.trace[i].n_total);
      ASSERT_EQ(other.trace[i].n_diff, base.trace[i].n_diff);
      ASSERT_EQ(other.trace[i].sr, base.trace[i].sr);
    }
    EXPECT_EQ(other.summary.n_iter_cvg.mean, base.summary.n_iter_cvg.mean);
    EXPECT_EQ(other.summary.n_iter_cvg.stddev, base.summary.n_iter_cvg.stddev);
  }
}

TEST(ConvergedRecords, StayIdentical) {
  Rng net_rng(4);
  const Network net = gen_random_graph(60, 0.1, net_rng);
  GameParams p;
  p.group_size = 10;
  RunResult r = run_to_convergence(net, p, 11);
  ASSERT_TRUE(r.summary.converged);
  Rng rng(12);
  const TraceRecord last = r.trace.back();
  for (std::uint64_t it = 1; it <= 50; ++it) {
    const TraceRecord next = snapshot(r.final_state, play_round(net, r.final_state, p, rng), last.iteration + it);
    EXPECT_EQ(next.n_total, last.n_total);
    EXPECT_EQ(next.n_diff, last.n_diff);
    EXPECT_EQ(next.sr, 1.0);
  }
}

// --- CSV ----------------------------------------------------------------------------

class TraceCsv : public ::testing::Test {
 protected:
  std::filesystem::path dir = std::filesystem::temp_directory_path() / "ngg_test_metrics";
  void SetUp() override {
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
  }
  void TearDown() override { std::filesystem::remove_all(dir); }
};

TEST_F(TraceCsv, RoundTrip) {
  const MetricsTrace t{{1, 5, 5, 0.1, 20, 10}, {2, 9, 7, 1.0 / 3.0, 20, 10}, {3, 4, 1, 1.0, 4, 10}};
  write_trace_csv(dir / "t.csv", t);
  EXPECT_EQ(read_trace_csv(dir / "t.csv"), t);
  std::ifstream in(dir / "t.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "iteration,n_total,n_diff,sr,group_size,n_transmitted");
}

TEST_F(TraceCsv, AveragedRoundTrip) {
  const std::vector<AveragedRecord> t{{1, 2.5, 1.25, 0.1, 19.5, 10}, {2, 1e-17, 3, 2.0 / 3.0, 4, 1}};
  write_averaged_csv(dir / "a.csv", t);
  const auto back = read_trace_csv_as_doubles(dir / "a.csv");
  ASSERT_EQ(back.size(), 2U);
  EXPECT_EQ(back[1].n_total, 1e-17);
  EXPECT_EQ(back[1].sr, 2.0 / 3.0);
}

TEST_F(TraceCsv, SchemaMismatch) {
  std::ofstream(dir / "bad.csv") << "iteration,total\n1,2\n";
  EXPECT_THROW(read_trace_csv(dir / "bad.csv"), ParseError);
  std::ofstream(dir / "short.csv") << kTraceHeader << "\n1,2,3\n";
  EXPECT_THROW(read_trace_csv(dir / "short.csv"), ParseError);
  std::ofstream(dir / "nan.csv") << kTraceHeader << "\n1,x,3,0.5,2,1\n";
  EXPECT_THROW(read_trace_csv(dir / "nan.csv"), ParseError);
  EXPECT_THROW(read_trace_csv(dir / "missing.csv"), ParseError);
}

}  // namespace
}  // namespace ngg
