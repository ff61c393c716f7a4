#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ngg/harness.hpp"
#include "ngg/netgen.hpp"
#include "ngg/plot.hpp"
#include "ngg/stats.hpp"
#include "ngg/trace_io.hpp"

namespace ngg::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kValidation = 2,        // bad flags, bad config, input schema mismatch
  kGenerationFailure = 3, // network generator could not produce a connected graph
  kNonConvergence = 4,    // at least one run hit its iteration cap (artifacts still written)
};

namespace detail {

inline std::string fixed(double v, int precision) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

struct NetOptions {
  std::string model;
  std::size_t m = 0;
  std::optional<double> p, rp;
  std::optional<std::size_t> k, n0, e;
  std::string attachment = "replacement";
  std::uint64_t seed = 1;
  std::string out = ".";
};

inline NetworkSpec net_spec_from(const NetOptions& o) {
  auto need = [](const auto& opt, const char* flag) {
    if (!opt) throw ValidationError(flag, "required for this model");
    return *opt;
  };
  NetworkSpec spec;
  spec.m = o.m;
  if (o.model == "rg") {
    spec.params = RandomGraphParams{need(o.p, "--p")};
  } else if (o.model == "ws") {
    spec.params = SmallWorldParams{need(o.k, "--k"), need(o.rp, "--rp")};
  } else if (o.model == "ba") {
    ScaleFreeParams sf{need(o.n0, "--n0"), need(o.e, "--e")};
    if (o.attachment == "replacement") sf.attachment = Attachment::WithReplacement;
    else if (o.attachment == "distinct") sf.attachment = Attachment::WithoutReplacement;
    else throw ValidationError("--attachment", "expected replacement or distinct");
    spec.params = sf;
  } else {
    throw ValidationError("--model", "expected rg, ws or ba");
  }
  return spec;
}

inline int cmd_net(const NetOptions& o, std::ostream& out) {
  namespace fs = std::filesystem;
  const NetworkSpec spec = net_spec_from(o);
  Rng rng(o.seed);
  const Network net = generate(spec, rng);
  const NetworkStats st = compute_stats(net);

  fs::create_directories(o.out);
  {
    std::ofstream edges(fs::path(o.out) / "network.edges", std::ios::binary);
    for (auto [u, v] : net.edges()) edges << u << ' ' << v << '\n';
  }
  nlohmann::json params = to_json(spec);
  params.erase("model");
  params.erase("m");
  const nlohmann::json record{{"model", model_name(spec.model())},
                              {"params", params},
                              {"M", spec.m},
                              {"avg_degree", st.avg_degree},
                              {"avg_path_length", st.avg_path_length},
                              {"clustering_coefficient", st.clustering_coefficient},
                              {"seed", o.seed}};
  std::ofstream(fs::path(o.out) / "network.json", std::ios::binary) << record.dump(2) << '\n';

  out << std::left << std::setw(14) << "Network" << std::setw(8) << "#Nodes" << std::setw(10) << "<D>"
      << std::setw(10) << "<PL>" << "CC" << '\n'
      << std::setw(14) << spec_label(spec) << std::setw(8) << spec.m << std::setw(10) << fixed(st.avg_degree, 1)
      << std::setw(10) << fixed(st.avg_path_length, 4) << fixed(st.clustering_coefficient, 4) << '\n';
  return kOk;
}

struct RunOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

inline std::string summary_line(const PointReport& p) {
  const auto& s = p.stats;
  std::ostringstream os;
  os << "N=" << p.point.params.group_size << " beta=" << format_double(p.point.params.beta)
     << " mode=" << mode_name(p.point.params.mode) << " iter_cvg=" << fixed(s.n_iter_cvg.mean, 1) << "±"
     << fixed(s.n_iter_cvg.stddev, 1) << " total_max=" << fixed(s.n_total_max.mean, 1)
     << " diff_max=" << fixed(s.n_diff_max.mean, 1);
  if (p.non_converged > 0) os << " non_converged=" << p.non_converged;
  return os.str();
}

inline int cmd_run(const RunOptions& o, bool sweep, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg = load_config(o.config);
  if (o.seed) cfg.master_seed = *o.seed;
  if (o.out) cfg.output_dir = *o.out;
  if (sweep && !cfg.sweep) throw ValidationError("sweep", "config has no sweep section");
  const ExperimentResult result = run_experiment(cfg, sweep);
  for (const auto& p : result.points) out << summary_line(p) << '\n';
  if (result.any_non_converged()) {
    err << "warning: some runs reached max_iterations without converging; see " << result.report_path.string()
        << '\n';
    return kNonConvergence;
  }
  return kOk;
}

struct PlotOptions {
  std::string kind;
  std::string metric = "n_iter_cvg";
  std::vector<std::string> inputs;
  std::vector<std::string> labels;
  std::optional<std::size_t> filter_n;
  std::optional<std::string> filter_mode;
  std::string out = "plot.svg";
  std::string title;
};

inline constexpr std::string_view kSummaryHeader =
    "point,n,beta,mode,runs,converged_runs,n_total_max_mean,n_total_max_std,n_diff_max_mean,n_diff_max_std,"
    "n_iter_cvg_mean,n_iter_cvg_std";

/// (beta, metric mean) pairs from a harness summary.csv.
inline std::vector<std::pair<double, double>> read_metric_vs_beta(const std::string& path, const std::string& metric,
                                                                  std::optional<std::size_t> filter_n,
                                                                  const std::optional<std::string>& filter_mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSummaryHeader) throw ParseError(path + ": not a sweep summary.csv");
  std::size_t column = 0;
  if (metric == "n_total_max") column = 6;
  else if (metric == "n_diff_max") column = 8;
  else if (metric == "n_iter_cvg") column = 10;
  else throw ValidationError("--metric", "expected n_total_max, n_diff_max or n_iter_cvg");

  std::vector<std::pair<double, double>> pts;
  std::optional<std::pair<std::string, std::string>> group;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (cells.size() != 12) throw ParseError(path + ": expected 12 columns");
    if (filter_n && cells[1] != std::to_string(*filter_n)) continue;
    if (filter_mode && cells[3] != *filter_mode) continue;
    const auto key = std::make_pair(cells[1], cells[3]);
    if (group && *group != key)
      throw ValidationError(path, "rows mix several N/mode values; narrow with --filter-n / --filter-mode");
    group = key;
    try {
      pts.emplace_back(std::stod(cells[2]), std::stod(cells[column]));
    } catch (const std::exception&) {
      throw ParseError(path + ": bad number");
    }
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

inline int cmd_plot(const PlotOptions& o, std::ostream& out) {
  if (o.inputs.empty()) throw ValidationError("--input", "at least one input is required");
  if (!o.labels.empty() && o.labels.size() != o.inputs.size())
    throw ValidationError("--label", "give one label per input");

  std::vector<Series> series;
  ChartOptions chart;
  chart.title = o.title;
  for (std::size_t i = 0; i < o.inputs.size(); ++i) {
    Series s;
    s.label = o.labels.empty() ? std::filesystem::path(o.inputs[i]).stem().string() : o.labels[i];
    if (o.kind == "metric-vs-beta") {
      s.points = read_metric_vs_beta(o.inputs[i], o.metric, o.filter_n, o.filter_mode);
    } else {
      const auto rows = read_trace_csv_as_doubles(o.inputs[i]);
      for (const auto& r : rows) {
        const double y = o.kind == "n-total" ? r.n_total : o.kind == "n-diff" ? r.n_diff : r.sr;
        s.points.emplace_back(static_cast<double>(r.iteration), y);
      }
    }
    series.push_back(std::move(s));
  }

  if (o.kind == "n-total") {
    chart.x_label = "#Iteration";
    chart.y_label = "Number of Total Words";
  } else if (o.kind == "n-diff") {
    chart.x_label = "#Iteration";
    chart.y_label = "Number of Different Words";
  } else if (o.kind == "sr") {
    chart.x_label = "#Iteration";
    chart.y_label = "Success Ratio";
  } else {
    chart.x_label = "beta";
    chart.y_label = o.metric;
    chart.log_y = o.metric == "n_iter_cvg";
  }

  const std::string svg = render_line_chart(series, chart);
  std::ofstream(o.out, std::ios::binary) << svg;
  out << "wrote " << o.out << " (" << series.size() << " series)\n";
  return kOk;
}

}  // namespace detail

/// Entry point shared by the ngg binary and the tests. args excludes argv[0].
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Naming game in groups: network generation, simulation sweeps and plotting", "ngg"};
  app.require_subcommand(1);

  detail::NetOptions net;
  auto* net_cmd = app.add_subcommand("net", "generate a network, write its edge list and statistics");
  net_cmd->add_option("--model", net.model, "rg | ws | ba")->required();
  net_cmd->add_option("--m", net.m, "number of nodes")->required();
  net_cmd->add_option("--p", net.p, "rg: edge probability");
  net_cmd->add_option("--k", net.k, "ws: neighbours on each side of the ring");
  net_cmd->add_option("--rp", net.rp, "ws: rewiring probability");
  net_cmd->add_option("--n0", net.n0, "ba: seed clique size");
  net_cmd->add_option("--e", net.e, "ba: attachment draws per new node");
  net_cmd->add_option("--attachment", net.attachment, "ba: replacement | distinct");
  net_cmd->add_option("--seed", net.seed, "random seed");
  net_cmd->add_option("--out", net.out, "output directory");

  detail::RunOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "run the config's base point with its repetitions");
  auto* sweep_cmd = app.add_subcommand("sweep", "run every point of the config's sweep");
  for (auto* cmd : {run_cmd, sweep_cmd}) {
    cmd->add_option("--config", run_opts.config, "experiment config (JSON)")->required();
    cmd->add_option("--seed", run_opts.seed, "override master_seed");
    cmd->add_option("--out", run_opts.out, "override output_dir");
  }

  detail::PlotOptions plot;
  auto* plot_cmd = app.add_subcommand("plot", "render trace or sweep CSVs as an SVG line chart");
  plot_cmd->add_option("--kind", plot.kind, "n-total | n-diff | sr | metric-vs-beta")
      ->required()
      ->check(CLI::IsMember({"n-total", "n-diff", "sr", "metric-vs-beta"}));
  plot_cmd->add_option("--metric", plot.metric, "metric-vs-beta: n_total_max | n_diff_max | n_iter_cvg")
      ->check(CLI::IsMember({"n_total_max", "n_diff_max", "n_iter_cvg"}));
  plot_cmd->add_option("--input", plot.inputs, "CSV file (repeatable)")->required();
  plot_cmd->add_option("--label", plot.labels, "legend label per input (repeatable)");
  plot_cmd->add_option("--filter-n", plot.filter_n, "metric-vs-beta: keep rows with this N");
  plot_cmd->add_option("--filter-mode", plot.filter_mode, "metric-vs-beta: keep rows with this mode");
  plot_cmd->add_option("--title", plot.title, "chart title");
  plot_cmd->add_option("--out", plot.out, "output SVG path");

  std::vector<std::string> argv_store{"ngg"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }

  try {
    if (net_cmd->parsed()) return detail::cmd_net(net, out);
    if (run_cmd->parsed()) return detail::cmd_run(run_opts, false, out, err);
    if (sweep_cmd->parsed()) return detail::cmd_run(run_opts, true, out, err);
    if (plot_cmd->parsed()) return detail::cmd_plot(plot, out);
  } catch (const ConnectivityFailure& e) {
    err << "error: " << e.what() << '\n';
    return kGenerationFailure;
  } catch (const InvalidParam& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kValidation;
}

}  // namespace ngg::cli
