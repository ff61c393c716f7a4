#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "ngg/network.hpp"

namespace ngg {

/// Opaque word identifier. Fresh words are issued from a counter, so ids are
/// unique within a run and never reused.
struct WordId {
  std::uint32_t value = 0;
  auto operator<=>(const WordId&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, WordId w) { return os << 'w' << w.value; }

/// Unbounded word inventory of one agent, in insertion order, without duplicates.
class AgentMemory {
 public:
  AgentMemory() = default;
  AgentMemory(std::initializer_list<WordId> words) : words_(words) {}
  explicit AgentMemory(std::vector<WordId> words) : words_(std::move(words)) {}

  bool empty() const noexcept { return words_.empty(); }
  std::size_t size() const noexcept { return words_.size(); }
  std::span<const WordId> words() const noexcept { return words_; }
  WordId operator[](std::size_t i) const noexcept { return words_[i]; }

  bool contains(WordId w) const noexcept { return std::find(words_.begin(), words_.end(), w) != words_.end(); }

  bool operator==(const AgentMemory&) const = default;

 private:
  friend class PopulationState;
  std::vector<WordId> words_;
};

/// Memories of all M agents plus the fresh-word counter.
///
/// All mutation goes through learn() and agree(), which keep the population-wide
/// totals (N_total, N_diff) current in O(memory size).
class PopulationState {
 public:
  PopulationState() = default;
  explicit PopulationState(std::size_t m) : memories_(m) {}

  /// Builds a state from explicit memories. Used by tests and replay tools.
  static PopulationState from_memories(std::vector<AgentMemory> memories, std::uint32_t next_fresh_word = 0) {
    PopulationState pop;
    pop.memories_ = std::move(memories);
    std::uint32_t max_seen = 0;
    bool any = false;
    for (const auto& mem : pop.memories_) {
      for (WordId w : mem.words()) {
        pop.count_in(w);
        max_seen = std::max(max_seen, w.value);
        any = true;
      }
    }
    pop.next_fresh_word_ = std::max(next_fresh_word, any ? max_seen + 1 : 0U);
    return pop;
  }

  std::size_t size() const noexcept { return memories_.size(); }
  const AgentMemory& memory(NodeId i) const noexcept { return memories_[i]; }
  std::span<const AgentMemory> memories() const noexcept { return memories_; }

  std::uint32_t next_fresh_word() const noexcept { return next_fresh_word_; }

  /// Issues a never-before-used word id.
  WordId issue_fresh_word() noexcept { return WordId{next_fresh_word_++}; }

  /// Failure update: append w to agent i's memory (no-op if already present).
  void learn(NodeId i, WordId w) {
    auto& words = memories_[i].words_;
    if (std::find(words.begin(), words.end(), w) != words.end()) return;
    words.push_back(w);
    count_in(w);
  }

  /// Success update: agent i keeps only w.
  void agree(NodeId i, WordId w) {
    auto& words = memories_[i].words_;
    if (words.size() == 1 && words.front() == w) return;
    for (WordId x : words) count_out(x);
    words.assign(1, w);
    count_in(w);
  }

  /// Sum of memory sizes.
  std::size_t total_words() const noexcept { return total_words_; }
  /// Number of distinct words across all memories.
  std::size_t distinct_words() const noexcept { return distinct_words_; }

  /// O(1) equivalent of is_converged(): every memory equals the same single word.
  bool converged_fast() const noexcept {
    return !memories_.empty() && distinct_words_ == 1 && total_words_ == memories_.size();
  }

  /// Memories and counter only; the bookkeeping totals follow from them.
  bool operator==(const PopulationState& other) const {
    return memories_ == other.memories_ && next_fresh_word_ == other.next_fresh_word_;
  }

 private:
  void count_in(WordId w) {
    if (w.value >= holders_.size()) holders_.resize(std::size_t{w.value} + 1, 0);
    if (holders_[w.value]++ == 0) ++distinct_words_;
    ++total_words_;
  }
  void count_out(WordId w) {
    if (--holders_[w.value] == 0) --distinct_words_;
    --total_words_;
  }

  std::vector<AgentMemory> memories_;
  std::uint32_t next_fresh_word_ = 0;
  std::vector<std::uint32_t> holders_;  // memories containing each word id
  std::size_t total_words_ = 0;
  std::size_t distinct_words_ = 0;
};

/// The common word, if every memory is exactly {w}.
inline std::optional<WordId> is_converged(const PopulationState& pop) {
  if (pop.size() == 0) return std::nullopt;
  const auto& first = pop.memory(0);
  if (first.size() != 1) return std::nullopt;
  const WordId w = first[0];
  for (const auto& mem : pop.memories())
    if (mem.size() != 1 || mem[0] != w) return std::nullopt;
  return w;
}

}  // namespace ngg
