#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace spellnet {

// Half-open replacement span over source tokens. start == end is an
// insertion point; an empty replacement deletes the span.
struct Edit {
  int start = 0;
  int end = 0;
  std::string replacement;  // space-joined tokens, possibly empty

  bool operator==(const Edit& o) const {
    return start == o.start && end == o.end && replacement == o.replacement;
  }
  bool operator<(const Edit& o) const {
    if (start != o.start) return start < o.start;
    if (end != o.end) return end < o.end;
    return replacement < o.replacement;
  }
};

struct AnnotatedSentence {
  std::vector<std::string> tokens;
  std::map<int, std::vector<Edit>> annotations;  // annotator id -> edits
  std::set<int> noop_annotators;                 // annotators with explicit noop lines

  const std::vector<Edit>& edits(int annotator = 0) const;
};

struct ScoreReport {
  long tp = 0, fp = 0, fn = 0;
  double p = 1.0, r = 1.0, f05 = 1.0;
};

// .m2 blocks: `S tok tok ...` then zero or more
// `A start end|||type|||replacement|||REQUIRED|||-NONE-|||annotator` lines,
// blocks separated by blank lines. Noop lines use span -1 -1 and type noop.
std::vector<AnnotatedSentence> parse_m2(const std::string& text);
std::string emit_m2(const std::vector<AnnotatedSentence>& sentences);

// Token-level Levenshtein diff (match 0; substitute/insert/delete 1; ties
// prefer substitution, then deletion, then insertion), with maximal runs of
// non-match operations merged into single edits.
std::vector<Edit> extract_edits(const std::vector<std::string>& source,
                                const std::vector<std::string>& hypothesis);

std::vector<std::string> apply_edits(const std::vector<std::string>& source,
                                     const std::vector<Edit>& edits);

double f_beta(double p, double r, double beta);

// Micro-averaged exact-match scoring: an edit is a true positive iff the
// identical (start, end, replacement) triple is in that sentence's gold set.
ScoreReport score_edits(const std::vector<std::vector<Edit>>& hypothesis,
                        const std::vector<std::vector<Edit>>& gold);

}  // namespace spellnet
