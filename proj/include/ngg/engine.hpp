#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ngg/errors.hpp"
#include "ngg/network.hpp"
#include "ngg/population.hpp"
#include "ngg/random.hpp"

namespace ngg {

enum class GameMode {
  NGG,        // every group member speaks; several words broadcast per round
  NGMH,       // only the group seed speaks, one word per round
  MinimalNG,  // one speaker, one adjacent hearer
};

/// Which size stands for N in the transmitting-word count and feedback denominator.
enum class GroupSizeBasis {
  Nominal,  // the group_size parameter
  Actual,   // the formed group's member count
};

struct Vocabulary {
  enum class Kind { FreshUnbounded, Finite };
  Kind kind = Kind::FreshUnbounded;
  std::uint32_t size = 0;  // only meaningful for Finite

  static Vocabulary fresh() { return {}; }
  static Vocabulary finite(std::uint32_t size) { return {Kind::Finite, size}; }
  bool operator==(const Vocabulary&) const = default;
};

inline std::string mode_name(GameMode mode) {
  switch (mode) {
    case GameMode::NGG: return "ngg";
    case GameMode::NGMH: return "ngmh";
    case GameMode::MinimalNG: return "minimal";
  }
  return "?";
}

struct GameParams {
  std::size_t group_size = 20;  // N
  double beta = 0.5;            // transmitting proportion
  GameMode mode = GameMode::NGG;
  std::uint64_t max_iterations = 1'000'000;
  Vocabulary vocabulary;
  GroupSizeBasis basis = GroupSizeBasis::Nominal;

  /// Throws InvalidParam. Pass m = 0 to skip the check against network size.
  void validate(std::size_t m = 0) const {
    if (group_size < 2) throw InvalidParam("game: group size N must be >= 2");
    if (m != 0 && group_size > m) throw InvalidParam("game: group size N must be <= network size");
    if (!(beta > 0.0 && beta <= 1.0)) throw InvalidParam("game: beta must lie in (0, 1]");
    if (max_iterations < 1) throw InvalidParam("game: max_iterations must be >= 1");
    if (vocabulary.kind == Vocabulary::Kind::Finite && vocabulary.size < 1)
      throw InvalidParam("game: finite vocabulary needs size >= 1");
  }

  bool operator==(const GameParams&) const = default;
};

/// Seed node followed by the neighbours drawn into the group.
struct Group {
  NodeId seed = 0;
  std::vector<NodeId> members;  // members[0] == seed
  std::size_t size() const noexcept { return members.size(); }
};

/// Uniform seed, then a uniform subset of min(deg, N-1) of its neighbours
/// (partial Fisher–Yates over the neighbour list).
template <RandomSource R>
Group form_group(const Network& net, std::size_t n, R& rng) {
  Group g;
  g.seed = static_cast<NodeId>(rng.uniform_index(net.node_count()));
  const auto nbrs = net.neighbors(g.seed);
  std::vector<NodeId> pool(nbrs.begin(), nbrs.end());
  const std::size_t take = std::min(pool.size(), n - 1);
  for (std::size_t t = 0; t < take; ++t) {
    const std::size_t j = t + rng.uniform_index(pool.size() - t);
    std::swap(pool[t], pool[j]);
  }
  g.members.reserve(take + 1);
  g.members.push_back(g.seed);
  g.members.insert(g.members.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
  return g;
}

/// Word uttered by `agent`: uniform over its memory, or a new word from the
/// vocabulary when the memory is empty. An invented word is stored in the
/// speaker's memory.
template <RandomSource R>
WordId speak(PopulationState& pop, NodeId agent, const Vocabulary& vocabulary, R& rng) {
  const AgentMemory& mem = pop.memory(agent);
  if (!mem.empty()) return mem[rng.uniform_index(mem.size())];
  const WordId w = vocabulary.kind == Vocabulary::Kind::FreshUnbounded
                       ? pop.issue_fresh_word()
                       : WordId{static_cast<std::uint32_t>(rng.uniform_index(vocabulary.size))};
  pop.learn(agent, w);
  return w;
}

/// 0 on the diagonal, 1 for adjacent nodes, 0.5 for two-hop group pairs.
inline double pair_weight(NodeId i, NodeId j, const Network& net) noexcept {
  if (i == j) return 0.0;
  return net.adjacent(i, j) ? 1.0 : 0.5;
}

/// Sum of pair weights between i and every group member.
inline double node_weight(NodeId i, const Group& g, const Network& net) noexcept {
  double sum = 0.0;
  for (NodeId j : g.members) sum += pair_weight(i, j, net);
  return sum;
}

/// One member's spoken word; `member` indexes Group::members.
struct Utterance {
  std::size_t member = 0;
  WordId word;
};

/// Group-local weights for one round.
///
/// ip is row-major over member indices. candidates holds the distinct spoken
/// words in first-spoken order; iw and pw are aligned with it.
struct WeightTable {
  std::size_t group_size = 0;
  std::vector<double> ip;
  std::vector<double> in;
  std::vector<WordId> candidates;
  std::vector<double> iw;
  std::vector<double> pw;

  double pair(std::size_t a, std::size_t b) const noexcept { return ip[a * group_size + b]; }
};

inline WeightTable word_weights(std::span<const Utterance> utterances, const Group& g, const Network& net) {
  WeightTable wt;
  const std::size_t n = g.size();
  wt.group_size = n;
  wt.ip.assign(n * n, 0.0);
  wt.in.assign(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const double w = pair_weight(g.members[a], g.members[b], net);
      wt.ip[a * n + b] = w;
      wt.in[a] += w;
    }
  }
  for (const Utterance& u : utterances) {
    const auto it = std::find(wt.candidates.begin(), wt.candidates.end(), u.word);
    if (it == wt.candidates.end()) {
      wt.candidates.push_back(u.word);
      wt.iw.push_back(wt.in[u.member]);
    } else {
      wt.iw[static_cast<std::size_t>(it - wt.candidates.begin())] += wt.in[u.member];
    }
  }
  double total = 0.0;
  for (double v : wt.iw) total += v;
  wt.pw.reserve(wt.iw.size());
  for (double v : wt.iw) wt.pw.push_back(v / total);
  return wt;
}

/// Weights when every member spoke; spoken[k] is the word of g.members[k].
inline WeightTable word_weights(std::span<const WordId> spoken, const Group& g, const Network& net) {
  std::vector<Utterance> utterances;
  utterances.reserve(spoken.size());
  for (std::size_t k = 0; k < spoken.size(); ++k) utterances.push_back({k, spoken[k]});
  return word_weights(utterances, g, net);
}

/// max(1, round(beta * n)), rounding halves away from zero.
inline std::size_t transmitting_word_count(double n, double beta) noexcept {
  return static_cast<std::size_t>(std::max(1L, std::lround(beta * n)));
}

/// `count` independent draws from the candidates by pw, in draw order.
template <RandomSource R>
std::vector<WordId> select_transmitting_words(const WeightTable& wt, std::size_t count, R& rng) {
  std::vector<WordId> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(wt.candidates[rng.weighted_index(wt.pw)]);
  return out;
}

/// Probability that i hears a word from `sources`: the largest pair weight to any source.
inline double hearing_prob(NodeId i, std::span<const NodeId> sources, const Network& net) noexcept {
  double p = 0.0;
  for (NodeId j : sources) {
    p = std::max(p, pair_weight(i, j, net));
    if (p == 1.0) break;
  }
  return p;
}

/// How a still-unsuccessful source resolves after a broadcast.
enum class FeedbackRule {
  Probabilistic,  // succeeds with probability n_succ / N
  Threshold,      // succeeds iff floor(n_succ / N) >= 1
};

/// Broadcasts w from its sources to the members still in `unsuccessful`, then
/// applies feedback to the sources.
///
/// `sources` and `unsuccessful` are indexed by member position in g. Hearers
/// that already hold w collapse to {w} and leave the unsuccessful set; other
/// hearers append w. Returns n_succ, the number of broadcast successes.
template <RandomSource R>
std::size_t transmit_word(WordId w, std::span<const std::size_t> sources, const Group& g, const Network& net,
                          PopulationState& pop, std::vector<bool>& unsuccessful, double feedback_denominator,
                          FeedbackRule feedback, R& rng) {
  if (sources.empty()) throw UnknownSource("transmitted word " + std::to_string(w.value) + " has no source");

  std::vector<NodeId> source_nodes;
  source_nodes.reserve(sources.size());
  for (std::size_t s : sources) source_nodes.push_back(g.members[s]);

  std::vector<std::size_t> heard;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!unsuccessful[k]) continue;
    if (rng.bernoulli(hearing_prob(g.members[k], source_nodes, net))) heard.push_back(k);
  }

  std::size_t n_succ = 0;
  for (std::size_t k : heard) {
    const NodeId node = g.members[k];
    if (pop.memory(node).contains(w)) {
      pop.agree(node, w);
      unsuccessful[k] = false;
      ++n_succ;
    } else {
      pop.learn(node, w);
    }
  }

  const double ratio = static_cast<double>(n_succ) / feedback_denominator;
  for (std::size_t s : sources) {
    if (!unsuccessful[s]) continue;
    const bool success = feedback == FeedbackRule::Probabilistic ? rng.bernoulli(ratio) : std::floor(ratio) >= 1.0;
    if (success) {
      pop.agree(g.members[s], w);
      unsuccessful[s] = false;
    }
  }
  return n_succ;
}

struct TransmittedWord {
  WordId word;
  std::size_t n_succ = 0;
  bool operator==(const TransmittedWord&) const = default;
};

struct RoundOutcome {
  std::size_t group_size = 0;
  std::vector<TransmittedWord> transmitted;
  std::size_t successful_members = 0;
  double sr = 0.0;  // successful_members / group_size
  bool operator==(const RoundOutcome&) const = default;
};

enum class SpeakerRule { AllMembers, SeedOnly };

/// Round variants. The defaults are the full group game; SeedOnly + Threshold
/// is the multiple-hearer special case.
struct RoundRules {
  SpeakerRule speakers = SpeakerRule::AllMembers;
  FeedbackRule feedback = FeedbackRule::Probabilistic;
};

/// Hooks for tests and instrumentation; all no-ops.
struct NoObserver {
  void on_weights(const Group&, const WeightTable&) {}
  void on_transmit(const Group&, WordId, std::size_t /*n_succ*/, const std::vector<bool>& /*unsuccessful*/,
                   const PopulationState&) {}
};

namespace detail {

inline double basis_size(const GameParams& params, std::size_t actual) {
  return params.basis == GroupSizeBasis::Nominal ? static_cast<double>(params.group_size)
                                                 : static_cast<double>(actual);
}

inline RoundOutcome finish_outcome(std::size_t group_size, std::vector<TransmittedWord> transmitted,
                                   std::size_t successful) {
  RoundOutcome out;
  out.group_size = group_size;
  out.transmitted = std::move(transmitted);
  out.successful_members = successful;
  out.sr = static_cast<double>(successful) / static_cast<double>(group_size);
  return out;
}

}  // namespace detail

/// One group conversation: form a group, let the speakers talk, pick the
/// transmitting words by weight, and broadcast them in draw order while
/// threading the unsuccessful set through every broadcast.
template <RandomSource R, typename Observer = NoObserver>
RoundOutcome run_group_round(const Network& net, PopulationState& pop, const GameParams& params, R& rng,
                             RoundRules rules = {}, Observer&& observer = Observer{}) {
  const Group g = form_group(net, params.group_size, rng);
  const double n_basis = detail::basis_size(params, g.size());

  std::vector<Utterance> utterances;
  if (rules.speakers == SpeakerRule::AllMembers) {
    utterances.reserve(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) utterances.push_back({k, speak(pop, g.members[k], params.vocabulary, rng)});
  } else {
    utterances.push_back({0, speak(pop, g.seed, params.vocabulary, rng)});
  }

  const WeightTable wt = word_weights(utterances, g, net);
  observer.on_weights(g, wt);

  const std::size_t count =
      rules.speakers == SpeakerRule::SeedOnly ? 1 : transmitting_word_count(n_basis, params.beta);
  const std::vector<WordId> words = select_transmitting_words(wt, count, rng);

  std::vector<bool> unsuccessful(g.size(), true);
  std::vector<TransmittedWord> transmitted;
  transmitted.reserve(words.size());
  std::vector<std::size_t> sources;
  for (WordId w : words) {
    sources.clear();
    for (const Utterance& u : utterances)
      if (u.word == w) sources.push_back(u.member);
    const std::size_t n_succ = transmit_word(w, sources, g, net, pop, unsuccessful, n_basis, rules.feedback, rng);
    transmitted.push_back({w, n_succ});
    observer.on_transmit(g, w, n_succ, unsuccessful, pop);
  }

  const auto remaining = static_cast<std::size_t>(std::count(unsuccessful.begin(), unsuccessful.end(), true));
  return detail::finish_outcome(g.size(), std::move(transmitted), g.size() - remaining);
}

/// Multiple-hearer round: the seed is the only speaker and broadcasts one word
/// to the rest of its group; the seed itself succeeds iff floor(n_succ / N) >= 1.
template <RandomSource R>
RoundOutcome ngmh_round(const Network& net, PopulationState& pop, const GameParams& params, R& rng) {
  const Group g = form_group(net, params.group_size, rng);
  const WordId w = speak(pop, g.seed, params.vocabulary, rng);
  const NodeId seed_only[] = {g.seed};

  std::vector<NodeId> hearers;
  for (std::size_t k = 1; k < g.size(); ++k)
    if (rng.bernoulli(hearing_prob(g.members[k], seed_only, net))) hearers.push_back(g.members[k]);

  std::size_t n_succ = 0;
  for (NodeId h : hearers) {
    if (pop.memory(h).contains(w)) {
      pop.agree(h, w);
      ++n_succ;
    } else {
      pop.learn(h, w);
    }
  }

  std::size_t successful = n_succ;
  if (std::floor(static_cast<double>(n_succ) / detail::basis_size(params, g.size())) >= 1.0) {
    pop.agree(g.seed, w);
    ++successful;
  }
  return detail::finish_outcome(g.size(), {{w, n_succ}}, successful);
}

/// Pairwise game: uniform speaker, uniform neighbour as hearer. On success both
/// keep only the word; on failure the hearer learns it.
template <RandomSource R>
RoundOutcome minimal_ng_round(const Network& net, PopulationState& pop, const GameParams& params, R& rng) {
  const auto speaker = static_cast<NodeId>(rng.uniform_index(net.node_count()));
  const auto nbrs = net.neighbors(speaker);
  const NodeId hearer = nbrs[rng.uniform_index(nbrs.size())];
  const WordId w = speak(pop, speaker, params.vocabulary, rng);
  const bool success = pop.memory(hearer).contains(w);
  if (success) {
    pop.agree(hearer, w);
    pop.agree(speaker, w);
  } else {
    pop.learn(hearer, w);
  }
  return detail::finish_outcome(2, {{w, success ? 1U : 0U}}, success ? 2 : 0);
}

/// One iteration of whichever game params.mode selects.
template <RandomSource R>
RoundOutcome play_round(const Network& net, PopulationState& pop, const GameParams& params, R& rng) {
  switch (params.mode) {
    case GameMode::NGG: return run_group_round(net, pop, params, rng);
    case GameMode::NGMH: return ngmh_round(net, pop, params, rng);
    case GameMode::MinimalNG: return minimal_ng_round(net, pop, params, rng);
  }
  throw InvalidParam("unknown game mode");
}

}  // namespace ngg
