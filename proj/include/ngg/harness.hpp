#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "ngg/engine.hpp"
#include "ngg/errors.hpp"
#include "ngg/metrics.hpp"
#include "ngg/netgen.hpp"
#include "ngg/network.hpp"
#include "ngg/simulation.hpp"
#include "ngg/trace_io.hpp"

namespace ngg {

inline constexpr const char* kToolVersion = "1.0.0";

struct SweepSpec {
  std::vector<double> betas;
  std::vector<std::size_t> group_sizes;
  std::vector<GameMode> modes;
};

struct ExperimentConfig {
  NetworkSpec network;
  GameParams game;
  std::size_t repetitions = 20;
  std::uint64_t master_seed = 0;
  std::filesystem::path output_dir = "ngg_out";
  std::optional<SweepSpec> sweep;
  bool fixed_network = false;
  std::size_t parallelism = 0;  // 0: one worker per hardware thread
};

// ---------------------------------------------------------------------------
// Seeds

/// Seed of run `run_index` at sweep point `point_index`:
///
///   h = splitmix64(master)
///   h = splitmix64(h ^ point_index)
///   h = splitmix64(h ^ run_index)
///
/// with splitmix64(x) = mix64(x + 0x9E3779B97F4A7C15) and mix64 the SplitMix64
/// finalizer (multipliers 0xBF58476D1CE4E5B9, 0x94D049BB133111EB; shifts 30, 27, 31).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t point_index, std::uint64_t run_index) noexcept {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ point_index);
  return splitmix64(h ^ run_index);
}

/// Sweep-point slot reserved for network generation.
inline constexpr std::uint64_t kNetworkStream = ~std::uint64_t{0};

/// Networks are drawn per repetition and shared by every sweep point, so the
/// points of a sweep are compared on the same graphs.
constexpr std::uint64_t network_seed(std::uint64_t master, std::uint64_t run_index) noexcept {
  return derive_seed(master, kNetworkStream, run_index);
}

// ---------------------------------------------------------------------------
// Config parsing

namespace detail {

using json = nlohmann::json;

inline void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& ctx) {
  if (!obj.is_object()) throw ValidationError(ctx.empty() ? "<root>" : ctx, "must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ValidationError(ctx.empty() ? key : ctx + "." + key, "unknown key");
  }
}

template <typename T>
T get_field(const json& obj, const char* key, const std::string& ctx) {
  const std::string field = ctx.empty() ? key : ctx + "." + key;
  if (!obj.contains(key)) throw ValidationError(field, "missing");
  try {
    const json& v = obj.at(key);
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ValidationError(field, "must be a number");
    } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!v.is_number_integer()) throw ValidationError(field, "must be an integer");
      if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)
        throw ValidationError(field, "must be non-negative");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ValidationError(field, "must be true or false");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ValidationError(field, "must be a string");
    }
    return v.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(field, e.what());
  }
}

template <typename T>
T get_or(const json& obj, const char* key, const std::string& ctx, T fallback) {
  return obj.contains(key) ? get_field<T>(obj, key, ctx) : fallback;
}

inline GameMode parse_mode(const std::string& s, const std::string& field) {
  if (s == "ngg") return GameMode::NGG;
  if (s == "ngmh") return GameMode::NGMH;
  if (s == "minimal") return GameMode::MinimalNG;
  throw ValidationError(field, "unknown mode '" + s + "' (expected ngg, ngmh or minimal)");
}

inline NetworkSpec parse_network(const json& j) {
  const std::string ctx = "network";
  if (!j.is_object()) throw ValidationError(ctx, "must be an object");
  const auto model = get_field<std::string>(j, "model", ctx);
  NetworkSpec spec;
  spec.m = get_field<std::size_t>(j, "m", ctx);
  if (model == "rg") {
    reject_unknown_keys(j, {"model", "m", "p"}, ctx);
    spec.params = RandomGraphParams{get_field<double>(j, "p", ctx)};
  } else if (model == "ws") {
    reject_unknown_keys(j, {"model", "m", "k", "rp"}, ctx);
    spec.params = SmallWorldParams{get_field<std::size_t>(j, "k", ctx), get_field<double>(j, "rp", ctx)};
  } else if (model == "ba") {
    reject_unknown_keys(j, {"model", "m", "n0", "e", "attachment"}, ctx);
    ScaleFreeParams sf{get_field<std::size_t>(j, "n0", ctx), get_field<std::size_t>(j, "e", ctx)};
    const auto att = get_or<std::string>(j, "attachment", ctx, "replacement");
    if (att == "replacement") sf.attachment = Attachment::WithReplacement;
    else if (att == "distinct") sf.attachment = Attachment::WithoutReplacement;
    else throw ValidationError("network.attachment", "expected 'replacement' or 'distinct'");
    spec.params = sf;
  } else {
    throw ValidationError("network.model", "unknown model '" + model + "' (expected rg, ws or ba)");
  }
  try {
    spec.validate();
  } catch (const InvalidParam& e) {
    throw ValidationError("network", e.what());
  }
  return spec;
}

inline GameParams parse_game(const json& j) {
  const std::string ctx = "game";
  reject_unknown_keys(j, {"n", "beta", "mode", "max_iterations", "vocabulary", "vocabulary_size", "group_size_basis"},
                      ctx);
  GameParams g;
  g.group_size = get_field<std::size_t>(j, "n", ctx);
  g.beta = get_field<double>(j, "beta", ctx);
  g.mode = parse_mode(get_or<std::string>(j, "mode", ctx, "ngg"), "game.mode");
  g.max_iterations = get_or<std::uint64_t>(j, "max_iterations", ctx, g.max_iterations);
  const auto vocab = get_or<std::string>(j, "vocabulary", ctx, "fresh");
  if (vocab == "fresh") {
    if (j.contains("vocabulary_size")) throw ValidationError("game.vocabulary_size", "only valid with 'finite'");
  } else if (vocab == "finite") {
    g.vocabulary = Vocabulary::finite(get_field<std::uint32_t>(j, "vocabulary_size", ctx));
  } else {
    throw ValidationError("game.vocabulary", "expected 'fresh' or 'finite'");
  }
  const auto basis = get_or<std::string>(j, "group_size_basis", ctx, "nominal");
  if (basis == "nominal") g.basis = GroupSizeBasis::Nominal;
  else if (basis == "actual") g.basis = GroupSizeBasis::Actual;
  else throw ValidationError("game.group_size_basis", "expected 'nominal' or 'actual'");
  return g;
}

inline void check_game(const GameParams& g, std::size_t m, const std::string& where) {
  if (g.group_size < 2) throw ValidationError(where + ".n", "group size must be >= 2");
  if (g.group_size > m) throw ValidationError(where + ".n", "group size must not exceed network size m");
  if (!(g.beta > 0.0 && g.beta <= 1.0)) throw ValidationError(where + ".beta", "must lie in (0, 1]");
  if (g.max_iterations < 1) throw ValidationError(where + ".max_iterations", "must be >= 1");
  if (g.vocabulary.kind == Vocabulary::Kind::Finite && g.vocabulary.size < 1)
    throw ValidationError(where + ".vocabulary_size", "must be >= 1");
}

}  // namespace detail

/// Checks every field constraint; throws ValidationError naming the field.
inline void validate(const ExperimentConfig& cfg) {
  try {
    cfg.network.validate();
  } catch (const InvalidParam& e) {
    throw ValidationError("network", e.what());
  }
  detail::check_game(cfg.game, cfg.network.m, "game");
  if (cfg.repetitions < 1) throw ValidationError("repetitions", "must be >= 1");
  if (cfg.sweep) {
    const auto& s = *cfg.sweep;
    if (s.betas.empty()) throw ValidationError("sweep.betas", "must not be empty");
    if (s.group_sizes.empty()) throw ValidationError("sweep.group_sizes", "must not be empty");
    if (s.modes.empty()) throw ValidationError("sweep.modes", "must not be empty");
    for (double b : s.betas)
      if (!(b > 0.0 && b <= 1.0)) throw ValidationError("sweep.betas", "every beta must lie in (0, 1]");
    for (std::size_t n : s.group_sizes)
      if (n < 2 || n > cfg.network.m) throw ValidationError("sweep.group_sizes", "every N must lie in [2, m]");
  }
}

/// Parses a config document. Throws ValidationError.
inline ExperimentConfig parse_config(const nlohmann::json& j) {
  detail::reject_unknown_keys(
      j, {"network", "game", "repetitions", "master_seed", "output_dir", "sweep", "fixed_network", "parallelism"}, "");
  ExperimentConfig cfg;
  if (!j.contains("network")) throw ValidationError("network", "missing");
  if (!j.contains("game")) throw ValidationError("game", "missing");
  cfg.network = detail::parse_network(j.at("network"));
  cfg.game = detail::parse_game(j.at("game"));
  cfg.repetitions = detail::get_or<std::size_t>(j, "repetitions", "", cfg.repetitions);
  cfg.master_seed = detail::get_or<std::uint64_t>(j, "master_seed", "", cfg.master_seed);
  cfg.output_dir = detail::get_or<std::string>(j, "output_dir", "", cfg.output_dir.string());
  cfg.fixed_network = detail::get_or<bool>(j, "fixed_network", "", false);
  cfg.parallelism = detail::get_or<std::size_t>(j, "parallelism", "", 0);
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    detail::reject_unknown_keys(s, {"betas", "group_sizes", "modes"}, "sweep");
    SweepSpec sweep;
    try {
      sweep.betas = s.contains("betas") ? s.at("betas").get<std::vector<double>>() : std::vector<double>{cfg.game.beta};
      sweep.group_sizes = s.contains("group_sizes") ? s.at("group_sizes").get<std::vector<std::size_t>>()
                                                    : std::vector<std::size_t>{cfg.game.group_size};
      if (s.contains("modes")) {
        for (const auto& m : s.at("modes")) sweep.modes.push_back(detail::parse_mode(m.get<std::string>(), "sweep.modes"));
      } else {
        sweep.modes = {cfg.game.mode};
      }
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("sweep", e.what());
    }
    cfg.sweep = std::move(sweep);
  }
  validate(cfg);
  return cfg;
}

/// Reads and parses a JSON config file. Throws ParseError or ValidationError.
inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return parse_config(j);
}

inline nlohmann::json to_json(const NetworkSpec& spec) {
  nlohmann::json j{{"model", model_name(spec.model())}, {"m", spec.m}};
  if (const auto* rg = std::get_if<RandomGraphParams>(&spec.params)) {
    j["p"] = rg->p;
  } else if (const auto* ws = std::get_if<SmallWorldParams>(&spec.params)) {
    j["k"] = ws->k;
    j["rp"] = ws->rp;
  } else {
    const auto& sf = std::get<ScaleFreeParams>(spec.params);
    j["n0"] = sf.n0;
    j["e"] = sf.e;
    j["attachment"] = sf.attachment == Attachment::WithReplacement ? "replacement" : "distinct";
  }
  return j;
}

inline nlohmann::json to_json(const GameParams& g) {
  nlohmann::json j{{"n", g.group_size},
                   {"beta", g.beta},
                   {"mode", mode_name(g.mode)},
                   {"max_iterations", g.max_iterations},
                   {"group_size_basis", g.basis == GroupSizeBasis::Nominal ? "nominal" : "actual"}};
  if (g.vocabulary.kind == Vocabulary::Kind::Finite) {
    j["vocabulary"] = "finite";
    j["vocabulary_size"] = g.vocabulary.size;
  } else {
    j["vocabulary"] = "fresh";
  }
  return j;
}

/// Config echo; parse_config(to_json(cfg)) reproduces cfg.
inline nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json j{{"network", to_json(cfg.network)},
                   {"game", to_json(cfg.game)},
                   {"repetitions", cfg.repetitions},
                   {"master_seed", cfg.master_seed},
                   {"output_dir", cfg.output_dir.string()},
                   {"fixed_network", cfg.fixed_network},
                   {"parallelism", cfg.parallelism}};
  if (cfg.sweep) {
    nlohmann::json modes = nlohmann::json::array();
    for (GameMode m : cfg.sweep->modes) modes.push_back(mode_name(m));
    j["sweep"] = {{"betas", cfg.sweep->betas}, {"group_sizes", cfg.sweep->group_sizes}, {"modes", modes}};
  }
  return j;
}

// ---------------------------------------------------------------------------
// Execution

struct SweepPoint {
  std::size_t index = 0;
  GameParams params;
};

/// Cartesian product modes x group_sizes x betas (betas vary fastest). Without
/// a sweep, or with use_sweep false, the single point is cfg.game.
inline std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg, bool use_sweep = true) {
  if (!use_sweep || !cfg.sweep) return {{0, cfg.game}};
  std::vector<SweepPoint> points;
  for (GameMode mode : cfg.sweep->modes)
    for (std::size_t n : cfg.sweep->group_sizes)
      for (double beta : cfg.sweep->betas) {
        GameParams p = cfg.game;
        p.mode = mode;
        p.group_size = n;
        p.beta = beta;
        points.push_back({points.size(), p});
      }
  return points;
}

struct RunArtifact {
  std::size_t point = 0;
  std::size_t run = 0;
  std::uint64_t derived_seed = 0;
  std::uint64_t network_seed = 0;
  std::filesystem::path trace_path;
  RunSummary summary;
};

struct PointReport {
  SweepPoint point;
  SummaryStats stats;
  std::size_t non_converged = 0;
  std::filesystem::path averaged_path;
};

struct ExperimentResult {
  std::vector<RunArtifact> runs;
  std::vector<PointReport> points;
  std::filesystem::path report_path;
  bool any_non_converged() const {
    for (const auto& p : points)
      if (p.non_converged > 0) return true;
    return false;
  }
};

/// Worker count: NGG_PARALLELISM if set, else cfg.parallelism, else hardware threads.
inline std::size_t resolve_parallelism(const ExperimentConfig& cfg) {
  if (const char* env = std::getenv("NGG_PARALLELISM")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  if (cfg.parallelism > 0) return cfg.parallelism;
  return std::max(1U, std::thread::hardware_concurrency());
}

namespace detail {

/// Runs job(i) for i in [0, count) on up to `workers` threads; rethrows the
/// first exception after all workers stop.
template <typename Job>
void parallel_for(std::size_t count, std::size_t workers, Job&& job) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

inline std::string indexed_name(const char* prefix, std::size_t i, const char* suffix = "") {
  std::ostringstream os;
  os << prefix << std::setw(3) << std::setfill('0') << i << suffix;
  return os.str();
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

inline nlohmann::json mean_std_json(const MeanStd& ms) {
  return {{"mean", ms.mean}, {"std", ms.stddev}, {"count", ms.count}};
}

}  // namespace detail

/// Executes every (sweep point, repetition) pair and persists:
///
///   <out>/point_PPP/run_RRR.csv   per-run trace
///   <out>/point_PPP_avg.csv       averaged trace of the point
///   <out>/runs.csv                one row per run (non-converged runs carry the cap)
///   <out>/summary.csv             one row per point
///   <out>/report.json             config echo, per-point rows, version, seed
///
/// Everything except report.json's "metadata" block is a pure function of the config.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, bool use_sweep = true) {
  validate(cfg);
  namespace fs = std::filesystem;
  const auto points = sweep_points(cfg, use_sweep);
  const std::size_t reps = cfg.repetitions;
  const std::size_t workers = resolve_parallelism(cfg);
  fs::create_directories(cfg.output_dir);

  const std::size_t distinct_networks = cfg.fixed_network ? 1 : reps;
  std::vector<Network> networks(distinct_networks);
  std::vector<std::uint64_t> net_seeds(distinct_networks);
  detail::parallel_for(distinct_networks, workers, [&](std::size_t r) {
    net_seeds[r] = network_seed(cfg.master_seed, r);
    Rng rng(net_seeds[r]);
    networks[r] = generate(cfg.network, rng);
  });

  ExperimentResult result;
  result.runs.resize(points.size() * reps);
  std::vector<MetricsTrace> traces(points.size() * reps);
  for (const auto& p : points) fs::create_directories(cfg.output_dir / detail::indexed_name("point_", p.index));

  detail::parallel_for(points.size() * reps, workers, [&](std::size_t job) {
    const std::size_t pi = job / reps;
    const std::size_t r = job % reps;
    const std::size_t net_index = cfg.fixed_network ? 0 : r;
    RunArtifact& art = result.runs[job];
    art.point = pi;
    art.run = r;
    art.derived_seed = derive_seed(cfg.master_seed, pi, r);
    art.network_seed = net_seeds[net_index];
    art.trace_path = cfg.output_dir / detail::indexed_name("point_", pi) / detail::indexed_name("run_", r, ".csv");
    RunResult run = run_to_convergence(networks[net_index], points[pi].params, art.derived_seed);
    write_trace_csv(art.trace_path, run.trace);
    art.summary = run.summary;
    traces[job] = std::move(run.trace);
  });

  nlohmann::json rows = nlohmann::json::array();
  std::ofstream summary_csv(cfg.output_dir / "summary.csv", std::ios::binary);
  summary_csv << "point,n,beta,mode,runs,converged_runs,n_total_max_mean,n_total_max_std,n_diff_max_mean,"
                 "n_diff_max_std,n_iter_cvg_mean,n_iter_cvg_std\n";
  for (const auto& p : points) {
    const auto first = static_cast<std::ptrdiff_t>(p.index * reps);
    std::vector<RunSummary> summaries;
    for (std::size_t r = 0; r < reps; ++r) summaries.push_back(result.runs[p.index * reps + r].summary);
    const AveragedRuns avg = average_runs(std::span(traces).subspan(static_cast<std::size_t>(first), reps), summaries);

    PointReport pr;
    pr.point = p;
    pr.stats = avg.summary;
    pr.non_converged = reps - avg.summary.converged_runs;
    pr.averaged_path = cfg.output_dir / detail::indexed_name("point_", p.index, "_avg.csv");
    write_averaged_csv(pr.averaged_path, avg.trace);

    rows.push_back({{"point", p.index},
                    {"N", p.params.group_size},
                    {"beta", p.params.beta},
                    {"mode", mode_name(p.params.mode)},
                    {"runs", avg.summary.runs},
                    {"converged_runs", avg.summary.converged_runs},
                    {"convergence_rate", avg.summary.convergence_rate()},
                    {"n_total_max", detail::mean_std_json(avg.summary.n_total_max)},
                    {"n_diff_max", detail::mean_std_json(avg.summary.n_diff_max)},
                    {"n_iter_cvg", detail::mean_std_json(avg.summary.n_iter_cvg)},
                    {"non_converged", {{"count", pr.non_converged}, {"cap", p.params.max_iterations}}}});
    summary_csv << p.index << ',' << p.params.group_size << ',' << format_double(p.params.beta) << ','
                << mode_name(p.params.mode) << ',' << avg.summary.runs << ',' << avg.summary.converged_runs << ','
                << format_double(avg.summary.n_total_max.mean) << ',' << format_double(avg.summary.n_total_max.stddev)
                << ',' << format_double(avg.summary.n_diff_max.mean) << ','
                << format_double(avg.summary.n_diff_max.stddev) << ',' << format_double(avg.summary.n_iter_cvg.mean)
                << ',' << format_double(avg.summary.n_iter_cvg.stddev) << '\n';
    result.points.push_back(std::move(pr));
  }

  std::ofstream runs_csv(cfg.output_dir / "runs.csv", std::ios::binary);
  runs_csv << "point,run,seed,network_seed,converged,n_total_max,n_diff_max,n_iter_cvg\n";
  for (const auto& a : result.runs) {
    const std::uint64_t cap = points[a.point].params.max_iterations;
    runs_csv << a.point << ',' << a.run << ',' << a.derived_seed << ',' << a.network_seed << ','
             << (a.summary.converged ? 1 : 0) << ',' << a.summary.n_total_max << ',' << a.summary.n_diff_max << ','
             << a.summary.n_iter_cvg.value_or(cap) << '\n';
  }

  nlohmann::json report{{"tool", "ngg"},
                        {"version", kToolVersion},
                        {"master_seed", cfg.master_seed},
                        {"config", to_json(cfg)},
                        {"points", rows},
                        {"metadata", {{"generated_at", detail::utc_timestamp()}}}};
  result.report_path = cfg.output_dir / "report.json";
  std::ofstream(result.report_path, std::ios::binary) << report.dump(2) << '\n';
  return result;
}

}  // namespace ngg
