#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "spellnet/g2p.hpp"

namespace spellnet {

// A character unit (single character or merged adjacent characters) aligned
// to one phonetic symbol within one word.
struct AlignmentPair {
  std::string unit;
  std::string phoneme;

  bool operator==(const AlignmentPair& o) const {
    return unit == o.unit && phoneme == o.phoneme;
  }
};

// Thresholded attention selection: (char l, phoneme k) is aligned iff
// A[k][l] > theta; per phoneme, maximal runs of adjacent selected characters
// merge into one unit.
std::vector<AlignmentPair> extract_alignments(const AttentionMatrix& att, double theta);

struct CountTable {
  std::map<std::pair<std::string, std::string>, long> counts;  // (unit, phoneme) -> N
  double theta = 0.0;
  long total = 0;  // equals the number of alignment pairs accumulated
};

void accumulate_counts(CountTable& table, const std::vector<AlignmentPair>& pairs);

// Row-stochastic phonetic confusion coefficients:
//   M(c1, c2) = sum_p N(c1,p) N(c2,p) / sum_{c} sum_p N(c1,p) N(c,p)
// normalized over the unit alphabet, identity entries retained.
struct ConfusionMatrix {
  double theta = 0.0;
  uint64_t dict_hash = 0;
  std::map<std::string, std::map<std::string, double>> rows;  // only nonzero entries

  std::vector<std::string> units() const;
  double coef(const std::string& c1, const std::string& c2) const;
  bool has_unit(const std::string& c) const { return rows.count(c) > 0; }

  std::string serialize() const;
  static ConfusionMatrix deserialize(const std::string& text);
  void save(const std::string& path) const;
  static ConfusionMatrix load(const std::string& path);
};

ConfusionMatrix confusion_from_counts(const CountTable& counts);

// Full pipeline over a dictionary: attention extraction, counting, Eq-style
// normalization. dict_hash goes into the serialized header.
ConfusionMatrix build_confusion(const G2pModel& model, const PronunciationDictionary& dict,
                                double theta, uint64_t dict_hash);

}  // namespace spellnet
