#include "spellnet/confusion.hpp"

#include <cmath>
#include <sstream>

#include "spellnet/error.hpp"
#include "spellnet/text.hpp"

namespace spellnet {

std::vector<AlignmentPair> extract_alignments(const AttentionMatrix& att, double theta) {
  if (theta <= 0.0 || theta >= 1.0)
    throw std::invalid_argument("extract_alignments: theta must be in (0,1)");
  std::vector<AlignmentPair> out;
  const int K = att.a.rows;
  const int L = att.a.cols;
  for (int k = 0; k < K; ++k) {
    int l = 0;
    while (l < L) {
      if (att.a.at(k, l) <= theta) {
        ++l;
        continue;
      }
      int end = l;
      while (end + 1 < L && att.a.at(k, end + 1) > theta) ++end;
      std::string unit;
      for (int i = l; i <= end; ++i) unit += att.chars[i];
      out.push_back({std::move(unit), att.phonemes[k]});
      l = end + 1;
    }
  }
  return out;
}

void accumulate_counts(CountTable& table, const std::vector<AlignmentPair>& pairs) {
  for (const auto& p : pairs) {
    ++table.counts[{p.unit, p.phoneme}];
    ++table.total;
  }
}

std::vector<std::string> ConfusionMatrix::units() const {
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto& [c, row] : rows) out.push_back(c);
  return out;
}

double ConfusionMatrix::coef(const std::string& c1, const std::string& c2) const {
  auto it = rows.find(c1);
  if (it == rows.end()) return 0.0;
  auto jt = it->second.find(c2);
  return jt == it->second.end() ? 0.0 : jt->second;
}

ConfusionMatrix confusion_from_counts(const CountTable& counts) {
  if (counts.counts.empty()) throw DataError("confusion matrix: empty count table");

  // regroup counts unit-major and phoneme-major
  std::map<std::string, std::map<std::string, long>> by_unit;
  std::map<std::string, std::map<std::string, long>> by_phoneme;
  for (const auto& [key, n] : counts.counts) {
    if (n <= 0) continue;
    by_unit[key.first][key.second] += n;
    by_phoneme[key.second][key.first] += n;
  }

  ConfusionMatrix m;
  m.theta = counts.theta;
  for (const auto& [c1, phones] : by_unit) {
    std::map<std::string, double> numer;
    for (const auto& [p, n1] : phones)
      for (const auto& [c2, n2] : by_phoneme.at(p))
        numer[c2] += static_cast<double>(n1) * static_cast<double>(n2);
    double denom = 0.0;
    for (const auto& [c2, v] : numer) denom += v;
    // denom >= N(c1,p)^2 > 0 because c1 itself shares every one of its phonemes
    auto& row = m.rows[c1];
    for (const auto& [c2, v] : numer) row[c2] = v / denom;
  }
  return m;
}

ConfusionMatrix build_confusion(const G2pModel& model, const PronunciationDictionary& dict,
                                double theta, uint64_t dict_hash) {
  CountTable table;
  table.theta = theta;
  for (const auto& e : dict.entries) {
    const AttentionMatrix att = attention_matrix(model, e.word, e.pron);
    accumulate_counts(table, extract_alignments(att, theta));
  }
  ConfusionMatrix m = confusion_from_counts(table);
  m.dict_hash = dict_hash;
  return m;
}

namespace {

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string ConfusionMatrix::serialize() const {
  std::string out;
  out += "# spellnet confusion matrix v1\n";
  out += "# theta_att=" + format_double(theta) + "\n";
  out += "# dict_fnv64=" + hex64(dict_hash) + "\n";
  for (const auto& [c1, row] : rows)
    for (const auto& [c2, v] : row) out += c1 + "\t" + c2 + "\t" + format_double(v) + "\n";
  return out;
}

ConfusionMatrix ConfusionMatrix::deserialize(const std::string& text) {
  ConfusionMatrix m;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# theta_att=", 0) == 0) {
        m.theta = std::stod(line.substr(12));
        saw_header = true;
      } else if (line.rfind("# dict_fnv64=", 0) == 0) {
        m.dict_hash = std::stoull(line.substr(13), nullptr, 16);
      }
      continue;
    }
    const size_t t1 = line.find('\t');
    const size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      throw DataError("confusion matrix line " + std::to_string(lineno) +
                      ": expected c1<TAB>c2<TAB>coefficient");
    const std::string c1 = line.substr(0, t1);
    const std::string c2 = line.substr(t1 + 1, t2 - t1 - 1);
    double v = 0.0;
    try {
      v = std::stod(line.substr(t2 + 1));
    } catch (const std::exception&) {
      throw DataError("confusion matrix line " + std::to_string(lineno) + ": bad coefficient");
    }
    if (c1.empty() || c2.empty())
      throw DataError("confusion matrix line " + std::to_string(lineno) + ": empty unit");
    if (c1.find(' ') != std::string::npos || c2.find(' ') != std::string::npos)
      throw DataError("confusion matrix line " + std::to_string(lineno) +
                      ": units must not contain whitespace");
    if (!(v >= 0.0) || !std::isfinite(v))
      throw DataError("confusion matrix line " + std::to_string(lineno) +
                      ": coefficient must be finite and non-negative");
    if (m.rows[c1].count(c2))
      throw DataError("confusion matrix line " + std::to_string(lineno) + ": duplicate pair " +
                      c1 + "," + c2);
    m.rows[c1][c2] = v;
  }
  if (m.rows.empty()) throw DataError("confusion matrix: no entries");
  (void)saw_header;
  return m;
}

void ConfusionMatrix::save(const std::string& path) const {
  atomic_write_file(path, serialize());
}

ConfusionMatrix ConfusionMatrix::load(const std::string& path) {
  return deserialize(read_file(path));
}

}  // namespace spellnet
