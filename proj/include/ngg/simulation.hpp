#pragma once

#include <cstdint>

#include "ngg/engine.hpp"
#include "ngg/metrics.hpp"
#include "ngg/network.hpp"
#include "ngg/population.hpp"
#include "ngg/random.hpp"

namespace ngg {

struct RunResult {
  MetricsTrace trace;
  RunSummary summary;
  PopulationState final_state;
};

/// Plays rounds from empty memories until global agreement or the iteration
/// cap, recording one trace record per round. A run that hits the cap comes
/// back with summary.converged == false.
template <RandomSource R>
RunResult run_to_convergence(const Network& net, const GameParams& params, R& rng) {
  params.validate(net.node_count());
  RunResult result;
  result.final_state = PopulationState(net.node_count());
  PopulationState& pop = result.final_state;
  for (std::uint64_t it = 1; it <= params.max_iterations; ++it) {
    const RoundOutcome outcome = play_round(net, pop, params, rng);
    result.trace.push_back(snapshot(pop, outcome, it));
    if (pop.converged_fast()) break;
  }
  result.summary = summarize(result.trace, net.node_count());
  if (result.summary.converged) result.summary.converged_word = is_converged(pop);
  return result;
}

inline RunResult run_to_convergence(const Network& net, const GameParams& params, std::uint64_t seed) {
  Rng rng(seed);
  return run_to_convergence(net, params, rng);
}

}  // namespace ngg
