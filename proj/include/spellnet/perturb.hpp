#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "spellnet/confusion.hpp"

namespace spellnet {

struct PerturbConfig {
  double p_err = 0.05;        // per-word corruption probability
  uint64_t seed = 1;
  int max_errors_per_word = 1;
  bool allow_identity = false;
};

// Draws a substitute for `unit` from its confusion row. By default the
// identity outcome is excluded and the row renormalized; a row with no
// non-identity mass is unusable.
std::string sample_substitute(const std::string& unit, const ConfusionMatrix& m,
                              std::mt19937_64& rng, bool allow_identity = false);

// Corpus corruptor with the confusion rows preprocessed for sampling.
class Perturber {
 public:
  Perturber(const ConfusionMatrix& m, PerturbConfig cfg);

  struct WordResult {
    std::string word;
    bool changed = false;
    bool matchable = true;  // false when no unit of the word is in the matrix
  };

  // Picks one occurrence of a usable unit uniformly over all (position,
  // unit) occurrences and splices in a sampled substitute. Longer or shorter
  // substitutes realize insertions and deletions.
  WordResult perturb_word(const std::string& word, std::mt19937_64& rng) const;

  struct CorpusStats {
    long lines = 0;
    long tokens = 0;
    long selected = 0;      // tokens that drew below p_err
    long changed = 0;
    long unmatchable = 0;   // selected but containing no usable unit
  };

  // Corrupts each token independently with probability p_err. Line i uses an
  // RNG seeded from (seed, i), so output is byte-stable regardless of
  // processing order. Emits `corrupted<TAB>clean` lines into `out`.
  CorpusStats perturb_corpus(const std::vector<std::string>& clean_lines,
                             std::vector<std::string>& out) const;

  const PerturbConfig& config() const { return cfg_; }

 private:
  struct Row {
    std::vector<std::pair<std::string, double>> alts;  // cumulative-ready, renormalized
  };
  PerturbConfig cfg_;
  std::unordered_map<std::string, Row> rows_;
  int max_unit_cps_ = 0;

  const Row* usable_row(const std::string& unit) const;
};

}  // namespace spellnet
