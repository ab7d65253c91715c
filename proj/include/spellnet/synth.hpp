#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spellnet/g2p.hpp"

namespace spellnet::synth {

// Synthetic phonetic language: a unit inventory (single letters and
// digraphs) mapped to phonemes, with homophone groups (c/k/ck, ea/ee/y, ...)
// so alignment extraction yields a non-trivial confusion matrix. Spelling to
// pronunciation is the greedy longest-match parse, which makes it a
// deterministic function a G2P model can learn exactly.
struct Rule {
  std::string unit;
  std::string phoneme;
};

struct Language {
  std::vector<Rule> rules;

  // Greedy longest-match decomposition into (unit, phoneme) steps.
  std::vector<Rule> parse(const std::string& word) const;
  std::vector<std::string> pronounce(const std::string& word) const;
  int max_unit_len() const;
};

// Letters plus digraphs with eight homophone groups.
Language homophone_language();

// One letter, one unique phoneme; used for monotone-alignment oracles.
Language monotone_language();

struct DictOptions {
  int num_words = 500;
  int min_units = 2;
  int max_units = 5;
  uint64_t seed = 1;
};

// Random unit-sequence words, deduplicated, pronounced by the canonical
// parse.
PronunciationDictionary make_dictionary(const Language& lang, const DictOptions& opt);

struct CorpusOptions {
  int num_sentences = 1000;
  int min_len = 4;
  int max_len = 10;
  uint64_t seed = 1;
  bool with_period = true;  // terminal "." token on every sentence
};

// Sentences sampled from the given word list with a skewed (rank-weighted)
// unigram distribution, one per line.
std::vector<std::string> make_corpus(const std::vector<std::string>& words,
                                     const CorpusOptions& opt);

std::vector<std::string> dictionary_words(const PronunciationDictionary& dict);

}  // namespace spellnet::synth
