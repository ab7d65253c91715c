#include "spellnet/vocab.hpp"

#include <algorithm>

#include "spellnet/error.hpp"
#include "spellnet/text.hpp"

namespace spellnet {

int Vocabulary::add(const std::string& symbol) {
  auto it = index_.find(symbol);
  if (it != index_.end()) return it->second;
  const int id = static_cast<int>(symbols_.size());
  symbols_.push_back(symbol);
  index_.emplace(symbol, id);
  return id;
}

int Vocabulary::find(const std::string& symbol) const {
  auto it = index_.find(symbol);
  return it == index_.end() ? -1 : it->second;
}

int Vocabulary::find_or_unk(const std::string& symbol) const {
  const int id = find(symbol);
  if (id >= 0) return id;
  const int unk = unk_id();
  if (unk < 0) throw std::logic_error("vocabulary has no <unk> entry");
  return unk;
}

std::string Vocabulary::serialize() const {
  std::string out;
  for (const auto& s : symbols_) {
    out += s;
    out.push_back('\n');
  }
  return out;
}

Vocabulary Vocabulary::deserialize(const std::string& text) {
  Vocabulary v;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string sym = text.substr(start, end - start);
    if (!sym.empty() && sym.back() == '\r') sym.pop_back();
    if (!sym.empty()) {
      if (v.has(sym)) throw DataError("duplicate vocabulary symbol: " + sym);
      v.add(sym);
    }
    start = end + 1;
  }
  return v;
}

void Vocabulary::save(const std::string& path) const { atomic_write_file(path, serialize()); }

Vocabulary Vocabulary::load(const std::string& path) { return deserialize(read_file(path)); }

Vocabulary build_ranked_vocab(const std::unordered_map<std::string, long>& counts, int limit,
                              const std::vector<std::string>& specials) {
  std::vector<std::pair<std::string, long>> ranked;
  ranked.reserve(counts.size());
  for (const auto& [sym, n] : counts) {
    if (std::find(specials.begin(), specials.end(), sym) == specials.end())
      ranked.emplace_back(sym, n);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (static_cast<int>(ranked.size()) > limit) ranked.resize(limit);

  Vocabulary v;
  for (const auto& [sym, n] : ranked) v.add(sym);
  for (const auto& s : specials) v.add(s);
  return v;
}

CorpusVocabs build_vocab(const std::vector<std::string>& lines, int word_limit, int char_limit) {
  if (word_limit <= 0 || char_limit <= 0)
    throw std::invalid_argument("build_vocab: limits must be positive");
  std::unordered_map<std::string, long> word_counts;
  std::unordered_map<std::string, long> char_counts;
  long total_tokens = 0;
  for (const auto& line : lines) {
    for (const auto& tok : split_tokens(line)) {
      ++word_counts[tok];
      ++total_tokens;
      for (const auto& ch : utf8_chars(tok)) ++char_counts[ch];
    }
  }
  if (total_tokens == 0) throw DataError("build_vocab: corpus contains no tokens");

  CorpusVocabs out;
  out.words = build_ranked_vocab(word_counts, word_limit,
                                 {Vocabulary::kUnk, Vocabulary::kPad});
  out.chars = build_ranked_vocab(char_counts, char_limit,
                                 {Vocabulary::kUnk, Vocabulary::kPad});
  return out;
}

}  // namespace spellnet
