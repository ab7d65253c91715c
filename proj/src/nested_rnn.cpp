#include "spellnet/nested_rnn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "spellnet/error.hpp"
#include "spellnet/m2.hpp"
#include "spellnet/text.hpp"

namespace spellnet {

NestedRnnModel NestedRnnModel::create(const Vocabulary& words, const Vocabulary& chars,
                                      int char_emb_dim, int char_hidden, int word_hidden,
                                      double init_range, uint64_t seed) {
  if (words.unk_id() < 0 || words.pad_id() < 0 || chars.unk_id() < 0 || chars.pad_id() < 0)
    throw DataError("nested rnn: vocabularies must contain <unk> and <pad>");
  NestedRnnModel m;
  m.words = words;
  m.chars = chars;
  m.d_char_emb = char_emb_dim;
  m.d_char_hidden = char_hidden;
  m.d_word_hidden = word_hidden;
  m.char_emb = Mat(chars.size(), char_emb_dim);
  m.char_gru = GruParams(char_emb_dim, char_hidden);
  m.word_fwd = GruParams(char_hidden, word_hidden);
  m.word_bwd = GruParams(char_hidden, word_hidden);
  m.proj_w = Mat(2 * word_hidden, words.size());
  m.proj_b = Mat(1, words.size());

  std::mt19937_64 rng(seed);
  const float r = static_cast<float>(init_range);
  fill_uniform(m.char_emb, r, rng);
  m.char_gru.init(r, rng);
  m.word_fwd.init(r, rng);
  m.word_bwd.init(r, rng);
  fill_uniform(m.proj_w, r, rng);
  return m;
}

NamedParams NestedRnnModel::parameters() {
  NamedParams out;
  out.emplace_back("char_emb", &char_emb);
  char_gru.collect("char_gru", out);
  word_fwd.collect("word_fwd", out);
  word_bwd.collect("word_bwd", out);
  out.emplace_back("proj_w", &proj_w);
  out.emplace_back("proj_b", &proj_b);
  return out;
}

std::vector<int> word_char_ids(const Vocabulary& chars, const std::string& word) {
  std::vector<int> ids;
  for (const auto& ch : utf8_chars(word)) ids.push_back(chars.find_or_unk(ch));
  return ids;
}

RnnBatch encode_batch(const NestedRnnModel& model,
                      const std::vector<std::vector<std::string>>& sentences) {
  RnnBatch b;
  b.batch = static_cast<int>(sentences.size());
  if (b.batch == 0) throw std::invalid_argument("encode_batch: empty batch");
  for (const auto& s : sentences) {
    b.lengths.push_back(static_cast<int>(s.size()));
    b.max_len = std::max(b.max_len, static_cast<int>(s.size()));
  }
  if (b.max_len == 0) throw std::invalid_argument("encode_batch: all sentences empty");

  const int rows = b.batch * b.max_len;
  std::vector<std::vector<int>> word_ids(rows);
  for (int i = 0; i < b.batch; ++i)
    for (int n = 0; n < b.lengths[i]; ++n) {
      word_ids[i * b.max_len + n] = word_char_ids(model.chars, sentences[i][n]);
      b.max_chars = std::max(b.max_chars, static_cast<int>(word_ids[i * b.max_len + n].size()));
    }
  b.max_chars = std::max(b.max_chars, 1);

  const int char_pad = model.chars.pad_id();
  b.char_ids.assign(static_cast<size_t>(rows) * b.max_chars, char_pad);
  b.char_mask.assign(b.max_chars, std::vector<float>(rows, 0.0f));
  for (int r = 0; r < rows; ++r)
    for (size_t l = 0; l < word_ids[r].size(); ++l) {
      b.char_ids[static_cast<size_t>(r) * b.max_chars + l] = word_ids[r][l];
      b.char_mask[l][r] = 1.0f;
    }

  b.word_mask.assign(b.max_len, std::vector<float>(b.batch, 0.0f));
  for (int i = 0; i < b.batch; ++i)
    for (int n = 0; n < b.lengths[i]; ++n) b.word_mask[n][i] = 1.0f;
  return b;
}

NestedRefs register_model(Graph& g, NestedRnnModel& m) {
  NestedRefs r;
  r.emb = g.param(m.char_emb);
  r.char_gru = register_gru(g, m.char_gru);
  r.word_fwd = register_gru(g, m.word_fwd);
  r.word_bwd = register_gru(g, m.word_bwd);
  r.proj_w = g.param(m.proj_w);
  r.proj_b = g.param(m.proj_b);
  return r;
}

NestedRefs register_model(Graph& g, const NestedRnnModel& m) {
  NestedRefs r;
  r.emb = g.view(m.char_emb);
  r.char_gru = register_gru(g, m.char_gru);
  r.word_fwd = register_gru(g, m.word_fwd);
  r.word_bwd = register_gru(g, m.word_bwd);
  r.proj_w = g.view(m.proj_w);
  r.proj_b = g.view(m.proj_b);
  return r;
}

// Masked state update: rows still inside their sequence take the new state,
// finished rows carry the old one forward.
static Graph::Ref masked_step(Graph& g, Graph::Ref h_new, Graph::Ref h_old,
                              const std::vector<float>& mask) {
  const int rows = h_new.rows;
  auto m = g.constant(rows, 1, std::vector<float>(mask));
  std::vector<float> inv(mask.size());
  for (size_t i = 0; i < mask.size(); ++i) inv[i] = 1.0f - mask[i];
  auto mi = g.constant(rows, 1, std::move(inv));
  return g.add(g.mul_colvec(h_new, m), g.mul_colvec(h_old, mi));
}

Graph::Ref nested_logits(Graph& g, const NestedRefs& refs, const RnnBatch& batch) {
  const int rows = batch.batch * batch.max_len;
  const int ch = refs.char_gru.Uz.rows;  // d_char_hidden

  // char-level encoder over all words at once
  auto s = g.zeros(rows, ch);
  for (int l = 0; l < batch.max_chars; ++l) {
    std::vector<int> ids(rows);
    for (int r = 0; r < rows; ++r) ids[r] = batch.char_ids[static_cast<size_t>(r) * batch.max_chars + l];
    auto x = g.gather_rows(refs.emb, std::move(ids));
    auto s_new = gru_cell(g, refs.char_gru, x, s);
    s = masked_step(g, s_new, s, batch.char_mask[l]);
  }

  // word-level bidirectional context
  const int wh = refs.word_fwd.Uz.rows;
  std::vector<Graph::Ref> word_in(batch.max_len);
  for (int n = 0; n < batch.max_len; ++n) {
    std::vector<int> idx(batch.batch);
    for (int i = 0; i < batch.batch; ++i) idx[i] = i * batch.max_len + n;
    word_in[n] = g.gather_rows(s, std::move(idx));
  }

  std::vector<Graph::Ref> fwd(batch.max_len), bwd(batch.max_len);
  auto hf = g.zeros(batch.batch, wh);
  for (int n = 0; n < batch.max_len; ++n) {
    auto h_new = gru_cell(g, refs.word_fwd, word_in[n], hf);
    hf = masked_step(g, h_new, hf, batch.word_mask[n]);
    fwd[n] = hf;
  }
  auto hb = g.zeros(batch.batch, wh);
  for (int n = batch.max_len - 1; n >= 0; --n) {
    auto h_new = gru_cell(g, refs.word_bwd, word_in[n], hb);
    hb = masked_step(g, h_new, hb, batch.word_mask[n]);
    bwd[n] = hb;
  }

  std::vector<Graph::Ref> context(batch.max_len);
  for (int n = 0; n < batch.max_len; ++n) context[n] = g.concat_cols(fwd[n], bwd[n]);
  auto h_all = g.concat_rows(context);  // step-major rows
  return g.add_rowvec(g.matmul(h_all, refs.proj_w), refs.proj_b);
}

Mat char_encode_word(const NestedRnnModel& model, const std::vector<int>& char_ids) {
  if (char_ids.empty()) throw std::invalid_argument("char_encode_word: empty character sequence");
  for (int id : char_ids)
    if (id < 0 || id >= model.chars.size())
      throw std::invalid_argument("char_encode_word: char id out of range: " + std::to_string(id));
  Graph g;
  auto emb = g.view(model.char_emb);
  auto gru = register_gru(g, model.char_gru);
  auto h = g.zeros(1, model.d_char_hidden);
  for (int id : char_ids) h = gru_cell(g, gru, g.gather_rows(emb, {id}), h);
  return g.materialize(h);
}

std::vector<Mat> word_context_encode(const NestedRnnModel& model,
                                     const std::vector<Mat>& word_vectors) {
  if (word_vectors.empty()) throw std::invalid_argument("word_context_encode: empty sentence");
  const int n = static_cast<int>(word_vectors.size());
  Graph g;
  auto fwd_p = register_gru(g, model.word_fwd);
  auto bwd_p = register_gru(g, model.word_bwd);
  std::vector<Graph::Ref> in(n);
  for (int i = 0; i < n; ++i) in[i] = g.input(word_vectors[i]);

  std::vector<Graph::Ref> fwd(n), bwd(n);
  auto hf = g.zeros(1, model.d_word_hidden);
  for (int i = 0; i < n; ++i) fwd[i] = hf = gru_cell(g, fwd_p, in[i], hf);
  auto hb = g.zeros(1, model.d_word_hidden);
  for (int i = n - 1; i >= 0; --i) bwd[i] = hb = gru_cell(g, bwd_p, in[i], hb);

  std::vector<Mat> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(g.materialize(g.concat_cols(fwd[i], bwd[i])));
  return out;
}

Mat predict_tokens(const NestedRnnModel& model, const std::vector<Mat>& hidden_seq) {
  if (hidden_seq.empty()) throw std::invalid_argument("predict_tokens: empty hidden sequence");
  Graph g;
  std::vector<Graph::Ref> rows(hidden_seq.size());
  for (size_t i = 0; i < hidden_seq.size(); ++i) rows[i] = g.input(hidden_seq[i]);
  auto h = g.concat_rows(rows);
  auto logits = g.add_rowvec(g.matmul(h, g.view(model.proj_w)), g.view(model.proj_b));
  return g.materialize(g.softmax_rows(logits));
}

double sentence_loss(const Mat& distributions, const std::vector<int>& targets) {
  if (static_cast<size_t>(distributions.rows) != targets.size())
    throw std::invalid_argument("sentence_loss: " + std::to_string(distributions.rows) +
                                " distributions vs " + std::to_string(targets.size()) +
                                " targets");
  double loss = 0;
  for (size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0 || targets[i] >= distributions.cols)
      throw std::invalid_argument("sentence_loss: target out of vocabulary: " +
                                  std::to_string(targets[i]));
    loss -= std::log(static_cast<double>(distributions.at(static_cast<int>(i), targets[i])));
  }
  return loss;
}

static int argmax_row(const float* row, int n) {
  int best = 0;
  for (int j = 1; j < n; ++j)
    if (row[j] > row[best]) best = j;  // ties keep the lowest index
  return best;
}

std::vector<std::vector<std::string>> correct_batch(
    const NestedRnnModel& model, const std::vector<std::vector<std::string>>& sentences) {
  std::vector<std::vector<std::string>> out(sentences.size());
  std::vector<size_t> nonempty;
  std::vector<std::vector<std::string>> work;
  for (size_t i = 0; i < sentences.size(); ++i)
    if (!sentences[i].empty()) {
      nonempty.push_back(i);
      work.push_back(sentences[i]);
    }
  if (work.empty()) return out;

  RnnBatch batch = encode_batch(model, work);
  Graph g;
  NestedRefs refs = register_model(g, model);
  auto logits = nested_logits(g, refs, batch);
  const float* lv = g.value(logits);

  const int unk = model.words.unk_id();
  const int pad = model.words.pad_id();
  for (size_t w = 0; w < work.size(); ++w) {
    std::vector<std::string> corrected;
    for (int n = 0; n < batch.lengths[w]; ++n) {
      const float* row = lv + (static_cast<size_t>(n) * batch.batch + w) * model.words.size();
      const int pred = argmax_row(row, model.words.size());
      if (pred == unk || pred == pad)
        corrected.push_back(work[w][n]);  // copy the source token through
      else
        corrected.push_back(model.words.symbol(pred));
    }
    out[nonempty[w]] = std::move(corrected);
  }
  return out;
}

std::vector<std::string> correct_sentence(const NestedRnnModel& model,
                                          const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw std::invalid_argument("correct_sentence: empty token sequence");
  return correct_batch(model, {tokens})[0];
}

ParallelCorpus make_parallel(const std::vector<std::string>& src_lines,
                             const std::vector<std::string>& tgt_lines) {
  if (src_lines.size() != tgt_lines.size())
    throw DataError("parallel corpus: line counts differ: " + std::to_string(src_lines.size()) +
                    " vs " + std::to_string(tgt_lines.size()));
  ParallelCorpus c;
  for (size_t i = 0; i < src_lines.size(); ++i) {
    auto s = split_tokens(src_lines[i]);
    auto t = split_tokens(tgt_lines[i]);
    if (s.size() != t.size())
      throw DataError("parallel corpus: token count mismatch at line " + std::to_string(i + 1) +
                      ": " + std::to_string(s.size()) + " vs " + std::to_string(t.size()));
    if (s.empty()) continue;
    c.source.push_back(std::move(s));
    c.target.push_back(std::move(t));
  }
  return c;
}

ParallelCorpus load_pairs_tsv(const std::string& path) {
  ParallelCorpus c;
  const auto lines = read_lines(path);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const size_t tab = lines[i].find('\t');
    if (tab == std::string::npos)
      throw DataError(path + ": line " + std::to_string(i + 1) + " has no tab separator");
    auto s = split_tokens(std::string_view(lines[i]).substr(0, tab));
    auto t = split_tokens(std::string_view(lines[i]).substr(tab + 1));
    if (s.size() != t.size())
      throw DataError(path + ": token count mismatch at line " + std::to_string(i + 1) + ": " +
                      std::to_string(s.size()) + " vs " + std::to_string(t.size()));
    if (s.empty()) continue;
    c.source.push_back(std::move(s));
    c.target.push_back(std::move(t));
  }
  return c;
}

namespace {

struct PreparedBatch {
  RnnBatch enc;
  std::vector<float> weights;
};

// Length-sorted fixed batches; the step loop visits them in an order shuffled
// per epoch so padding stays small without sacrificing determinism.
std::vector<PreparedBatch> prepare_batches(const NestedRnnModel& model, const ParallelCorpus& data,
                                           int batch_size) {
  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return data.source[a].size() < data.source[b].size();
  });

  std::vector<PreparedBatch> batches;
  for (size_t start = 0; start < order.size(); start += batch_size) {
    const size_t end = std::min(order.size(), start + batch_size);
    std::vector<std::vector<std::string>> src;
    std::vector<const std::vector<std::string>*> tgt;
    for (size_t k = start; k < end; ++k) {
      src.push_back(data.source[order[k]]);
      tgt.push_back(&data.target[order[k]]);
    }
    PreparedBatch pb;
    pb.enc = encode_batch(model, src);
    const int bsz = pb.enc.batch;
    pb.enc.targets.assign(static_cast<size_t>(bsz) * pb.enc.max_len, -1);
    for (int i = 0; i < bsz; ++i)
      for (size_t n = 0; n < tgt[i]->size(); ++n)
        pb.enc.targets[n * bsz + i] = model.words.find_or_unk((*tgt[i])[n]);
    pb.enc.real_tokens = 0;
    for (int t : pb.enc.targets)
      if (t >= 0) ++pb.enc.real_tokens;
    pb.weights.assign(pb.enc.targets.size(), 0.0f);
    for (size_t k = 0; k < pb.enc.targets.size(); ++k)
      if (pb.enc.targets[k] >= 0)
        pb.weights[k] = 1.0f / static_cast<float>(pb.enc.real_tokens);
    batches.push_back(std::move(pb));
  }
  return batches;
}

double dev_f05(const NestedRnnModel& model, const ParallelCorpus& dev) {
  auto hyp = correct_batch(model, dev.source);
  std::vector<std::vector<Edit>> hyp_edits, gold_edits;
  for (size_t i = 0; i < dev.size(); ++i) {
    hyp_edits.push_back(extract_edits(dev.source[i], hyp[i]));
    gold_edits.push_back(extract_edits(dev.source[i], dev.target[i]));
  }
  return score_edits(hyp_edits, gold_edits).f05;
}

}  // namespace

TrainResult train_corrector(const ParallelCorpus& data, const Vocabulary& words,
                            const Vocabulary& chars, const PipelineConfig& cfg,
                            const ParallelCorpus* dev, std::ostream* log,
                            const std::function<void(NestedRnnModel&, long)>& on_eval) {
  cfg.validate();
  if (data.size() == 0) throw DataError("train_corrector: empty training corpus");

  TrainResult result;
  result.model = NestedRnnModel::create(words, chars, cfg.char_emb, cfg.char_hidden,
                                        cfg.word_hidden, cfg.init_range, cfg.seed);
  NestedRnnModel& model = result.model;
  auto named = model.parameters();
  auto params = pointers(named);

  auto batches = prepare_batches(model, data, cfg.batch_size);
  std::mt19937_64 shuffle_rng(mix_seed(cfg.seed, 0x5bdb));

  AdamState adam;
  adam.lr = static_cast<float>(cfg.lr_adam);
  adam.beta1 = static_cast<float>(cfg.adam_beta1);
  adam.beta2 = static_cast<float>(cfg.adam_beta2);
  adam.eps = static_cast<float>(cfg.adam_eps);
  SgdSchedule sgd;
  sgd.lr0 = static_cast<float>(cfg.lr_sgd);
  sgd.halve_every = cfg.sgd_halve_every;

  std::vector<size_t> visit;
  size_t visit_pos = 0;
  auto next_batch = [&]() -> PreparedBatch& {
    if (visit_pos >= visit.size()) {
      visit.resize(batches.size());
      std::iota(visit.begin(), visit.end(), size_t{0});
      for (size_t i = visit.size(); i > 1; --i)
        std::swap(visit[i - 1], visit[rng_below(shuffle_rng, i)]);
      visit_pos = 0;
    }
    return batches[visit[visit_pos++]];
  };

  const long total_steps = cfg.adam_steps + cfg.sgd_steps;
  std::vector<Mat> best_snapshot;
  double best = -1.0;
  long best_step = 0;
  double loss_acc = 0;
  long loss_count = 0;

  auto evaluate = [&](long step) {
    TrainLogEntry entry;
    entry.step = step;
    entry.loss = loss_count ? loss_acc / loss_count : 0.0;
    entry.lr = step <= cfg.adam_steps ? cfg.lr_adam : sgd.effective_lr();
    loss_acc = 0;
    loss_count = 0;
    if (dev) {
      entry.dev_f05 = dev_f05(model, *dev);
      if (*entry.dev_f05 > best) {
        best = *entry.dev_f05;
        best_step = step;
        best_snapshot.clear();
        for (Mat* p : params) best_snapshot.push_back(*p);
      }
    }
    if (on_eval) on_eval(model, step);
    if (log) {
      *log << "step " << entry.step << " loss " << entry.loss << " lr " << entry.lr;
      if (entry.dev_f05) *log << " dev_f0.5 " << *entry.dev_f05;
      *log << "\n";
    }
    result.log.push_back(entry);
  };

  for (long step = 1; step <= total_steps; ++step) {
    PreparedBatch& pb = next_batch();
    zero_grads(params);
    Graph g;
    NestedRefs refs = register_model(g, model);
    auto logits = nested_logits(g, refs, pb.enc);
    auto loss = g.cross_entropy(logits, pb.enc.targets, pb.weights);
    loss_acc += g.value(loss)[0];
    ++loss_count;
    g.backward(loss);
    clip_global_norm(params, cfg.clip_norm);
    if (step <= cfg.adam_steps)
      adam_step(params, adam);
    else
      sgd_step(params, sgd);
    if (step % cfg.eval_interval == 0 || step == total_steps) evaluate(step);
  }
  if (total_steps == 0 && (dev || log)) evaluate(0);

  if (dev && !best_snapshot.empty()) {
    for (size_t i = 0; i < params.size(); ++i) *params[i] = best_snapshot[i];
    result.best_step = best_step;
    result.best_dev_f05 = best;
  } else {
    result.best_step = total_steps;
  }
  return result;
}

double token_accuracy(const NestedRnnModel& model, const ParallelCorpus& data) {
  auto hyp = correct_batch(model, data.source);
  long correct = 0, total = 0;
  for (size_t i = 0; i < data.size(); ++i)
    for (size_t n = 0; n < data.target[i].size(); ++n) {
      ++total;
      if (hyp[i][n] == data.target[i][n]) ++correct;
    }
  return total ? static_cast<double>(correct) / total : 0.0;
}

}  // namespace spellnet
