#include "spellnet/perturb.hpp"

#include <algorithm>

#include "spellnet/error.hpp"
#include "spellnet/text.hpp"

namespace spellnet {

namespace {

std::vector<std::pair<std::string, double>> row_alternatives(const std::string& unit,
                                                             const ConfusionMatrix& m,
                                                             bool allow_identity) {
  auto it = m.rows.find(unit);
  if (it == m.rows.end())
    throw DataError("sample_substitute: unit '" + unit + "' not in the confusion matrix");
  std::vector<std::pair<std::string, double>> alts;
  double mass = 0.0;
  for (const auto& [c2, v] : it->second) {
    if (v <= 0.0) continue;
    if (!allow_identity && c2 == unit) continue;
    alts.emplace_back(c2, v);
    mass += v;
  }
  if (alts.empty() || mass <= 0.0)
    throw DataError("sample_substitute: unit '" + unit + "' has no non-identity mass");
  for (auto& [c2, v] : alts) v /= mass;
  return alts;
}

std::string draw(const std::vector<std::pair<std::string, double>>& alts,
                 std::mt19937_64& rng) {
  const double u = rng_unit(rng);
  double cum = 0.0;
  for (const auto& [c2, v] : alts) {
    cum += v;
    if (u < cum) return c2;
  }
  return alts.back().first;  // guard against rounding at u ~ 1
}

}  // namespace

std::string sample_substitute(const std::string& unit, const ConfusionMatrix& m,
                              std::mt19937_64& rng, bool allow_identity) {
  return draw(row_alternatives(unit, m, allow_identity), rng);
}

Perturber::Perturber(const ConfusionMatrix& m, PerturbConfig cfg) : cfg_(cfg) {
  if (cfg_.p_err < 0.0 || cfg_.p_err > 1.0)
    throw std::invalid_argument("perturb: p_err must be in [0,1]");
  if (cfg_.max_errors_per_word < 1)
    throw std::invalid_argument("perturb: max_errors_per_word must be >= 1");
  for (const auto& [unit, row] : m.rows) {
    try {
      Row r{row_alternatives(unit, m, cfg_.allow_identity)};
      max_unit_cps_ = std::max(max_unit_cps_, static_cast<int>(utf8_decode(unit).size()));
      rows_.emplace(unit, std::move(r));
    } catch (const DataError&) {
      // identity-only row: the unit can never produce a visible edit
    }
  }
}

const Perturber::Row* Perturber::usable_row(const std::string& unit) const {
  auto it = rows_.find(unit);
  return it == rows_.end() ? nullptr : &it->second;
}

Perturber::WordResult Perturber::perturb_word(const std::string& word,
                                              std::mt19937_64& rng) const {
  if (word.empty()) throw std::invalid_argument("perturb_word: empty word");
  std::string current = word;
  bool edited = false;
  for (int round = 0; round < cfg_.max_errors_per_word; ++round) {
    const std::vector<uint32_t> cps = utf8_decode(current);
    const int n = static_cast<int>(cps.size());

    struct Occurrence {
      int pos, len;
      const Row* row;
    };
    std::vector<Occurrence> occ;
    for (int pos = 0; pos < n; ++pos) {
      std::string unit;
      for (int len = 1; len <= max_unit_cps_ && pos + len <= n; ++len) {
        unit += utf8_encode_one(cps[pos + len - 1]);
        if (const Row* row = usable_row(unit)) occ.push_back({pos, len, row});
      }
    }
    if (occ.empty()) {
      if (!edited) return {current, false, false};
      break;
    }

    const Occurrence& pick = occ[rng_below(rng, occ.size())];
    const std::string sub = draw(pick.row->alts, rng);
    std::string next;
    for (int i = 0; i < pick.pos; ++i) next += utf8_encode_one(cps[i]);
    next += sub;
    for (int i = pick.pos + pick.len; i < n; ++i) next += utf8_encode_one(cps[i]);
    current = std::move(next);
    edited = true;
  }
  return {current, current != word, edited};
}

Perturber::CorpusStats Perturber::perturb_corpus(const std::vector<std::string>& clean_lines,
                                                 std::vector<std::string>& out) const {
  CorpusStats stats;
  out.clear();
  out.reserve(clean_lines.size());
  for (size_t i = 0; i < clean_lines.size(); ++i) {
    std::mt19937_64 rng(mix_seed(cfg_.seed, i));
    std::vector<std::string> tokens = split_tokens(clean_lines[i]);
    std::vector<std::string> corrupted;
    corrupted.reserve(tokens.size());
    for (const auto& tok : tokens) {
      ++stats.tokens;
      if (rng_unit(rng) < cfg_.p_err) {
        ++stats.selected;
        WordResult r = perturb_word(tok, rng);
        if (!r.matchable) ++stats.unmatchable;
        if (r.changed) ++stats.changed;
        corrupted.push_back(std::move(r.word));
      } else {
        corrupted.push_back(tok);
      }
    }
    ++stats.lines;
    out.push_back(join_tokens(corrupted) + "\t" + join_tokens(tokens));
  }
  return stats;
}

}  // namespace spellnet
