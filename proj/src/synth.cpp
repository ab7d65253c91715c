#include "spellnet/synth.hpp"

#include <algorithm>
#include <set>

#include "spellnet/error.hpp"
#include "spellnet/tensor.hpp"

namespace spellnet::synth {

std::vector<Rule> Language::parse(const std::string& word) const {
  std::vector<Rule> out;
  size_t pos = 0;
  while (pos < word.size()) {
    const Rule* best = nullptr;
    for (const auto& r : rules) {
      if (word.compare(pos, r.unit.size(), r.unit) != 0) continue;
      if (!best || r.unit.size() > best->unit.size()) best = &r;
    }
    if (!best)
      throw DataError("synthetic language: cannot parse '" + word + "' at offset " +
                      std::to_string(pos));
    out.push_back(*best);
    pos += best->unit.size();
  }
  return out;
}

std::vector<std::string> Language::pronounce(const std::string& word) const {
  std::vector<std::string> out;
  for (const auto& r : parse(word)) out.push_back(r.phoneme);
  return out;
}

int Language::max_unit_len() const {
  int n = 0;
  for (const auto& r : rules) n = std::max(n, static_cast<int>(r.unit.size()));
  return n;
}

Language homophone_language() {
  return Language{{
      {"a", "AH"}, {"b", "B"},  {"c", "K"},  {"d", "D"},  {"e", "EH"}, {"f", "F"},
      {"g", "G"},  {"h", "HH"}, {"i", "IH"}, {"k", "K"},  {"l", "L"},  {"m", "M"},
      {"n", "N"},  {"o", "OW"}, {"p", "P"},  {"r", "R"},  {"s", "S"},  {"t", "T"},
      {"u", "UW"}, {"v", "V"},  {"y", "IY"}, {"z", "Z"},
      // digraphs; most share a phoneme with a single-letter spelling
      {"sh", "SH"}, {"ch", "CH"}, {"ph", "F"}, {"ck", "K"}, {"ea", "IY"}, {"ee", "IY"},
      {"oa", "OW"}, {"oo", "UW"}, {"mm", "M"}, {"tt", "T"}, {"ss", "S"},
  }};
}

Language monotone_language() {
  Language lang;
  for (char c = 'a'; c <= 'z'; ++c) {
    std::string unit(1, c);
    std::string ph(1, static_cast<char>(c - 'a' + 'A'));
    lang.rules.push_back({unit, ph + "_"});  // distinct symbol per letter
  }
  return lang;
}

PronunciationDictionary make_dictionary(const Language& lang, const DictOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  std::set<std::string> words;
  // single letters are more frequent than digraphs, like real orthography
  std::vector<const Rule*> pool;
  for (const auto& r : lang.rules)
    for (int k = 0; k < (r.unit.size() == 1 ? 3 : 1); ++k) pool.push_back(&r);

  long guard = 0;
  while (static_cast<int>(words.size()) < opt.num_words) {
    if (++guard > 200L * opt.num_words)
      throw std::logic_error("make_dictionary: cannot reach requested word count");
    const int units = opt.min_units +
                      static_cast<int>(rng_below(rng, opt.max_units - opt.min_units + 1));
    std::string w;
    for (int i = 0; i < units; ++i) w += pool[rng_below(rng, pool.size())]->unit;
    words.insert(w);
  }

  std::vector<std::string> lines;
  for (const auto& w : words) {
    std::string line = w + "\t";
    const auto pron = lang.pronounce(w);
    for (size_t i = 0; i < pron.size(); ++i) {
      if (i) line += " ";
      line += pron[i];
    }
    lines.push_back(line);
  }
  return parse_dictionary(lines, false);
}

std::vector<std::string> make_corpus(const std::vector<std::string>& words,
                                     const CorpusOptions& opt) {
  if (words.empty()) throw std::invalid_argument("make_corpus: empty word list");
  std::mt19937_64 rng(opt.seed);
  // rank-weighted sampling: weight 1/(1+rank/8) gives a mild Zipf-like skew
  std::vector<double> cum;
  double total = 0;
  for (size_t i = 0; i < words.size(); ++i) {
    total += 1.0 / (1.0 + static_cast<double>(i) / 8.0);
    cum.push_back(total);
  }
  auto draw_word = [&]() -> const std::string& {
    const double u = rng_unit(rng) * total;
    const size_t i = std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
    return words[std::min(i, words.size() - 1)];
  };

  std::vector<std::string> lines;
  lines.reserve(opt.num_sentences);
  for (int s = 0; s < opt.num_sentences; ++s) {
    const int len =
        opt.min_len + static_cast<int>(rng_below(rng, opt.max_len - opt.min_len + 1));
    std::string line;
    for (int i = 0; i < len; ++i) {
      if (i) line += " ";
      line += draw_word();
    }
    if (opt.with_period) line += " .";
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> dictionary_words(const PronunciationDictionary& dict) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& e : dict.entries)
    if (seen.insert(e.word).second) out.push_back(e.word);
  return out;
}

}  // namespace spellnet::synth
