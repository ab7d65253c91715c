#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace spellnet {

// Bijective symbol <-> index map. Frequency-ranked symbols first, specials
// appended at the end, so ids of regular symbols are stable under truncation.
class Vocabulary {
 public:
  static constexpr const char* kUnk = "<unk>";
  static constexpr const char* kPad = "<pad>";
  static constexpr const char* kBos = "<s>";
  static constexpr const char* kEos = "</s>";

  int add(const std::string& symbol);        // idempotent, returns index
  int find(const std::string& symbol) const; // -1 when absent
  int find_or_unk(const std::string& symbol) const;

  const std::string& symbol(int id) const { return symbols_.at(id); }
  int size() const { return static_cast<int>(symbols_.size()); }
  const std::vector<std::string>& symbols() const { return symbols_; }

  bool has(const std::string& symbol) const { return find(symbol) >= 0; }
  int unk_id() const { return find(kUnk); }
  int pad_id() const { return find(kPad); }
  int bos_id() const { return find(kBos); }
  int eos_id() const { return find(kEos); }

  std::string serialize() const;  // one symbol per line
  static Vocabulary deserialize(const std::string& text);
  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

  bool operator==(const Vocabulary& o) const { return symbols_ == o.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> index_;
};

// Most frequent symbols up to `limit`, ties broken lexicographically,
// then the given specials. Symbols equal to a special are dropped from the
// ranked part so every entry appears exactly once.
Vocabulary build_ranked_vocab(const std::unordered_map<std::string, long>& counts, int limit,
                              const std::vector<std::string>& specials);

struct CorpusVocabs {
  Vocabulary words;
  Vocabulary chars;
};

// Scans a tokenized corpus (one sentence per line) and builds the word and
// character vocabularies. Characters are Unicode code points.
CorpusVocabs build_vocab(const std::vector<std::string>& lines, int word_limit, int char_limit);

}  // namespace spellnet
