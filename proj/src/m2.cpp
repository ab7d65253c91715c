#include "spellnet/m2.hpp"

#include <algorithm>
#include <sstream>

#include "spellnet/error.hpp"
#include "spellnet/text.hpp"

namespace spellnet {

const std::vector<Edit>& AnnotatedSentence::edits(int annotator) const {
  static const std::vector<Edit> empty;
  auto it = annotations.find(annotator);
  return it == annotations.end() ? empty : it->second;
}

namespace {

std::vector<std::string> split_fields(const std::string& s) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t pos = s.find("|||", start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 3;
  }
  return out;
}

[[noreturn]] void parse_fail(size_t lineno, const std::string& msg) {
  throw DataError(".m2 parse error at line " + std::to_string(lineno) + ": " + msg);
}

}  // namespace

std::vector<AnnotatedSentence> parse_m2(const std::string& text) {
  std::vector<AnnotatedSentence> out;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  bool in_block = false;
  AnnotatedSentence cur;

  auto flush = [&]() {
    if (in_block) out.push_back(std::move(cur));
    cur = AnnotatedSentence{};
    in_block = false;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line[0] == 'S' && (line.size() == 1 || line[1] == ' ')) {
      if (in_block) parse_fail(lineno, "S line inside an open block (missing blank separator)");
      cur.tokens = split_tokens(line.size() > 1 ? line.substr(2) : "");
      in_block = true;
      continue;
    }
    if (line.rfind("A ", 0) == 0) {
      if (!in_block) parse_fail(lineno, "A line before any S line");
      const auto fields = split_fields(line.substr(2));
      if (fields.size() != 6)
        parse_fail(lineno, "expected 6 |||-separated fields, got " +
                               std::to_string(fields.size()));
      const auto span = split_tokens(fields[0]);
      if (span.size() != 2) parse_fail(lineno, "span must be two integers");
      int start = 0, end = 0;
      try {
        start = std::stoi(span[0]);
        end = std::stoi(span[1]);
      } catch (const std::exception&) {
        parse_fail(lineno, "bad span integers '" + fields[0] + "'");
      }
      int annotator = 0;
      try {
        annotator = std::stoi(fields[5]);
      } catch (const std::exception&) {
        parse_fail(lineno, "bad annotator id '" + fields[5] + "'");
      }
      if (fields[1] == "noop") {
        if (start != -1 || end != -1) parse_fail(lineno, "noop requires span -1 -1");
        cur.noop_annotators.insert(annotator);
        cur.annotations.emplace(annotator, std::vector<Edit>{});
        continue;
      }
      if (start < 0 || end < start || end > static_cast<int>(cur.tokens.size()))
        throw DataError(".m2 validation error at line " + std::to_string(lineno) + ": span " +
                        std::to_string(start) + " " + std::to_string(end) +
                        " outside sentence of " + std::to_string(cur.tokens.size()) + " tokens");
      Edit e;
      e.start = start;
      e.end = end;
      e.replacement = fields[2];
      if (e.replacement.find('\t') != std::string::npos)
        parse_fail(lineno, "replacement contains a tab");
      cur.annotations[annotator].push_back(e);
      continue;
    }
    parse_fail(lineno, "unrecognized line '" + line + "'");
  }
  flush();
  return out;
}

std::string emit_m2(const std::vector<AnnotatedSentence>& sentences) {
  std::string out;
  for (size_t i = 0; i < sentences.size(); ++i) {
    const auto& s = sentences[i];
    if (i) out.push_back('\n');
    out += "S " + join_tokens(s.tokens) + "\n";
    for (const auto& [annotator, edits] : s.annotations) {
      if (edits.empty() && s.noop_annotators.count(annotator)) {
        out += "A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||" + std::to_string(annotator) +
               "\n";
        continue;
      }
      for (const auto& e : edits)
        out += "A " + std::to_string(e.start) + " " + std::to_string(e.end) + "|||Mec|||" +
               e.replacement + "|||REQUIRED|||-NONE-|||" + std::to_string(annotator) + "\n";
    }
  }
  return out;
}

std::vector<Edit> extract_edits(const std::vector<std::string>& source,
                                const std::vector<std::string>& hypothesis) {
  const int n = static_cast<int>(source.size());
  const int m = static_cast<int>(hypothesis.size());
  std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1, 0));
  for (int i = 0; i <= n; ++i) d[i][0] = i;
  for (int j = 0; j <= m; ++j) d[0][j] = j;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= m; ++j) {
      if (source[i - 1] == hypothesis[j - 1]) {
        d[i][j] = d[i - 1][j - 1];
      } else {
        d[i][j] = 1 + std::min({d[i - 1][j - 1], d[i - 1][j], d[i][j - 1]});
      }
    }

  // Backtrace mirrors the tie order: match, substitution, deletion, insertion.
  enum class Op { Match, Sub, Del, Ins };
  std::vector<Op> ops;
  int i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && source[i - 1] == hypothesis[j - 1] && d[i][j] == d[i - 1][j - 1]) {
      ops.push_back(Op::Match);
      --i;
      --j;
    } else if (i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + 1) {
      ops.push_back(Op::Sub);
      --i;
      --j;
    } else if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      ops.push_back(Op::Del);
      --i;
    } else {
      ops.push_back(Op::Ins);
      --j;
    }
  }
  std::reverse(ops.begin(), ops.end());

  std::vector<Edit> edits;
  int si = 0, hj = 0;
  size_t k = 0;
  while (k < ops.size()) {
    if (ops[k] == Op::Match) {
      ++si;
      ++hj;
      ++k;
      continue;
    }
    const int s0 = si, h0 = hj;
    while (k < ops.size() && ops[k] != Op::Match) {
      if (ops[k] == Op::Sub) {
        ++si;
        ++hj;
      } else if (ops[k] == Op::Del) {
        ++si;
      } else {
        ++hj;
      }
      ++k;
    }
    Edit e;
    e.start = s0;
    e.end = si;
    std::vector<std::string> repl(hypothesis.begin() + h0, hypothesis.begin() + hj);
    e.replacement = join_tokens(repl);
    edits.push_back(std::move(e));
  }
  return edits;
}

std::vector<std::string> apply_edits(const std::vector<std::string>& source,
                                     const std::vector<Edit>& edits) {
  std::vector<Edit> sorted = edits;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::string> out;
  int pos = 0;
  for (const auto& e : sorted) {
    if (e.start < pos || e.end > static_cast<int>(source.size()))
      throw std::invalid_argument("apply_edits: overlapping or out-of-range edit at " +
                                  std::to_string(e.start));
    for (; pos < e.start; ++pos) out.push_back(source[pos]);
    for (const auto& t : split_tokens(e.replacement)) out.push_back(t);
    pos = e.end;
  }
  for (; pos < static_cast<int>(source.size()); ++pos) out.push_back(source[pos]);
  return out;
}

double f_beta(double p, double r, double beta) {
  const double b2 = beta * beta;
  const double denom = b2 * p + r;
  if (denom == 0.0) return 0.0;
  return (1.0 + b2) * p * r / denom;
}

ScoreReport score_edits(const std::vector<std::vector<Edit>>& hypothesis,
                        const std::vector<std::vector<Edit>>& gold) {
  if (hypothesis.size() != gold.size())
    throw std::invalid_argument("score_edits: sentence counts differ: " +
                                std::to_string(hypothesis.size()) + " vs " +
                                std::to_string(gold.size()));
  ScoreReport rep;
  for (size_t i = 0; i < hypothesis.size(); ++i) {
    for (const auto& e : hypothesis[i]) {
      if (std::find(gold[i].begin(), gold[i].end(), e) != gold[i].end())
        ++rep.tp;
      else
        ++rep.fp;
    }
    for (const auto& e : gold[i])
      if (std::find(hypothesis[i].begin(), hypothesis[i].end(), e) == hypothesis[i].end())
        ++rep.fn;
  }
  rep.p = (rep.tp + rep.fp) == 0 ? 1.0 : static_cast<double>(rep.tp) / (rep.tp + rep.fp);
  rep.r = (rep.tp + rep.fn) == 0 ? 1.0 : static_cast<double>(rep.tp) / (rep.tp + rep.fn);
  rep.f05 = f_beta(rep.p, rep.r, 0.5);
  return rep;
}

}  // namespace spellnet
