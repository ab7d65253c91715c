#include "spellnet/g2p.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <set>

#include "spellnet/error.hpp"
#include "spellnet/text.hpp"

namespace spellnet {

namespace {
constexpr float kAttMaskOff = -1e9f;
}

PronunciationDictionary parse_dictionary(const std::vector<std::string>& lines,
                                         bool strip_stress) {
  PronunciationDictionary dict;
  std::set<std::string> seen;
  std::set<std::string> chars, phones;
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() || line.rfind(";;;", 0) == 0) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError("dictionary line " + std::to_string(i + 1) + " has no tab separator");
    std::string word = line.substr(0, tab);
    for (char& c : word)
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    std::vector<std::string> pron = split_tokens(line.substr(tab + 1));
    if (strip_stress)
      for (auto& p : pron)
        while (p.size() > 1 && p.back() >= '0' && p.back() <= '9') p.pop_back();
    if (word.empty() || pron.empty())
      throw DataError("dictionary line " + std::to_string(i + 1) +
                      " has an empty word or pronunciation");
    std::string key = word + "\t" + join_tokens(pron);
    if (!seen.insert(key).second) continue;
    for (const auto& c : utf8_chars(word)) chars.insert(c);
    for (const auto& p : pron) phones.insert(p);
    dict.entries.push_back({std::move(word), std::move(pron)});
  }
  dict.char_alphabet.assign(chars.begin(), chars.end());
  dict.phoneme_alphabet.assign(phones.begin(), phones.end());
  return dict;
}

PronunciationDictionary load_dictionary(const std::string& path, bool strip_stress) {
  return parse_dictionary(read_lines(path), strip_stress);
}

std::string serialize_dictionary(const PronunciationDictionary& dict) {
  std::string out;
  for (const auto& e : dict.entries) out += e.word + "\t" + join_tokens(e.pron) + "\n";
  return out;
}

G2pModel G2pModel::create(const PronunciationDictionary& dict, const PipelineConfig& cfg) {
  if (dict.entries.empty()) throw DataError("g2p: empty pronunciation dictionary");
  G2pModel m;
  for (const auto& c : dict.char_alphabet) m.graphemes.add(c);
  m.graphemes.add(Vocabulary::kPad);
  for (const auto& p : dict.phoneme_alphabet) m.phonemes.add(p);
  m.phonemes.add(Vocabulary::kBos);
  m.phonemes.add(Vocabulary::kEos);
  m.phonemes.add(Vocabulary::kPad);

  m.d_char_emb = cfg.g2p_char_emb;
  m.d_ph_emb = cfg.g2p_ph_emb;
  m.d_enc_hidden = cfg.g2p_enc_hidden;
  m.d_dec_hidden = cfg.g2p_dec_hidden;
  m.d_att = cfg.g2p_att_dim;

  m.char_emb = Mat(m.graphemes.size(), m.d_char_emb);
  m.enc_fwd = GruParams(m.d_char_emb, m.d_enc_hidden);
  m.enc_bwd = GruParams(m.d_char_emb, m.d_enc_hidden);
  m.ph_emb = Mat(m.phonemes.size(), m.d_ph_emb);
  m.dec = GruParams(m.d_ph_emb + 2 * m.d_enc_hidden, m.d_dec_hidden);
  m.att_q = Mat(m.d_dec_hidden, m.d_att);
  m.att_k = Mat(2 * m.d_enc_hidden, m.d_att);
  m.att_v = Mat(m.d_att, 1);
  m.proj_w = Mat(m.d_dec_hidden, m.phonemes.size());
  m.proj_b = Mat(1, m.phonemes.size());

  std::mt19937_64 rng(cfg.seed);
  const float r = static_cast<float>(cfg.init_range);
  fill_uniform(m.char_emb, r, rng);
  m.enc_fwd.init(r, rng);
  m.enc_bwd.init(r, rng);
  fill_uniform(m.ph_emb, r, rng);
  m.dec.init(r, rng);
  fill_uniform(m.att_q, r, rng);
  fill_uniform(m.att_k, r, rng);
  fill_uniform(m.att_v, r, rng);
  fill_uniform(m.proj_w, r, rng);
  return m;
}

NamedParams G2pModel::parameters() {
  NamedParams out;
  out.emplace_back("char_emb", &char_emb);
  enc_fwd.collect("enc_fwd", out);
  enc_bwd.collect("enc_bwd", out);
  out.emplace_back("ph_emb", &ph_emb);
  dec.collect("dec", out);
  out.emplace_back("att_q", &att_q);
  out.emplace_back("att_k", &att_k);
  out.emplace_back("att_v", &att_v);
  out.emplace_back("proj_w", &proj_w);
  out.emplace_back("proj_b", &proj_b);
  return out;
}

namespace {

struct G2pRefs {
  Graph::Ref char_emb, ph_emb;
  GruRefsT<float> enc_fwd, enc_bwd, dec;
  Graph::Ref att_q, att_k, att_v, proj_w, proj_b;
};

G2pRefs register_g2p(Graph& g, G2pModel& m) {
  G2pRefs r;
  r.char_emb = g.param(m.char_emb);
  r.enc_fwd = register_gru(g, m.enc_fwd);
  r.enc_bwd = register_gru(g, m.enc_bwd);
  r.ph_emb = g.param(m.ph_emb);
  r.dec = register_gru(g, m.dec);
  r.att_q = g.param(m.att_q);
  r.att_k = g.param(m.att_k);
  r.att_v = g.param(m.att_v);
  r.proj_w = g.param(m.proj_w);
  r.proj_b = g.param(m.proj_b);
  return r;
}

G2pRefs register_g2p(Graph& g, const G2pModel& m) {
  G2pRefs r;
  r.char_emb = g.view(m.char_emb);
  r.enc_fwd = register_gru(g, m.enc_fwd);
  r.enc_bwd = register_gru(g, m.enc_bwd);
  r.ph_emb = g.view(m.ph_emb);
  r.dec = register_gru(g, m.dec);
  r.att_q = g.view(m.att_q);
  r.att_k = g.view(m.att_k);
  r.att_v = g.view(m.att_v);
  r.proj_w = g.view(m.proj_w);
  r.proj_b = g.view(m.proj_b);
  return r;
}

Graph::Ref masked_step(Graph& g, Graph::Ref h_new, Graph::Ref h_old,
                       const std::vector<float>& mask) {
  auto m = g.constant(h_new.rows, 1, std::vector<float>(mask));
  std::vector<float> inv(mask.size());
  for (size_t i = 0; i < mask.size(); ++i) inv[i] = 1.0f - mask[i];
  auto mi = g.constant(h_new.rows, 1, std::move(inv));
  return g.add(g.mul_colvec(h_new, m), g.mul_colvec(h_old, mi));
}

// Encoder pass plus one-step attention decoding over a padded word batch.
// Encoder rows end up word-major ((b*L + l) x 2eh) so attention contexts can
// be reduced per word with a grouped row sum.
struct G2pForward {
  Graph& g;
  const G2pRefs& refs;
  int batch = 0;
  int max_chars = 0;
  Graph::Ref enc_states;  // (batch*max_chars) x 2eh, word-major
  Graph::Ref keys;        // (batch*max_chars) x d_att
  Graph::Ref att_mask;    // batch x max_chars additive mask
  std::vector<int> rep;   // row -> word index map for query broadcast
  Graph::Ref state;       // decoder state, batch x dh

  G2pForward(Graph& graph, const G2pRefs& r, const std::vector<std::vector<int>>& words,
             int dec_hidden, int char_pad)
      : g(graph), refs(r) {
    batch = static_cast<int>(words.size());
    for (const auto& w : words) max_chars = std::max(max_chars, static_cast<int>(w.size()));

    std::vector<std::vector<int>> step_ids(max_chars, std::vector<int>(batch, 0));
    std::vector<std::vector<float>> step_mask(max_chars, std::vector<float>(batch, 0.0f));
    const int pad = char_pad;
    std::vector<float> amask(static_cast<size_t>(batch) * max_chars, kAttMaskOff);
    for (int b = 0; b < batch; ++b)
      for (int l = 0; l < max_chars; ++l) {
        const bool real = l < static_cast<int>(words[b].size());
        step_ids[l][b] = real ? words[b][l] : pad;
        step_mask[l][b] = real ? 1.0f : 0.0f;
        if (real) amask[static_cast<size_t>(b) * max_chars + l] = 0.0f;
      }

    const int eh = refs.enc_fwd.Uz.rows;
    std::vector<Graph::Ref> fwd(max_chars), bwd(max_chars);
    auto hf = g.zeros(batch, eh);
    for (int l = 0; l < max_chars; ++l) {
      auto x = g.gather_rows(refs.char_emb, std::vector<int>(step_ids[l]));
      hf = masked_step(g, gru_cell(g, refs.enc_fwd, x, hf), hf, step_mask[l]);
      fwd[l] = hf;
    }
    auto hb = g.zeros(batch, eh);
    for (int l = max_chars - 1; l >= 0; --l) {
      auto x = g.gather_rows(refs.char_emb, std::vector<int>(step_ids[l]));
      hb = masked_step(g, gru_cell(g, refs.enc_bwd, x, hb), hb, step_mask[l]);
      bwd[l] = hb;
    }
    std::vector<Graph::Ref> per_step(max_chars);
    for (int l = 0; l < max_chars; ++l) per_step[l] = g.concat_cols(fwd[l], bwd[l]);
    auto step_major = g.concat_rows(per_step);  // row l*batch + b
    std::vector<int> perm(static_cast<size_t>(batch) * max_chars);
    for (int b = 0; b < batch; ++b)
      for (int l = 0; l < max_chars; ++l) perm[static_cast<size_t>(b) * max_chars + l] = l * batch + b;
    enc_states = g.gather_rows(step_major, std::move(perm));
    keys = g.matmul(enc_states, refs.att_k);
    att_mask = g.constant(batch, max_chars, std::move(amask));
    rep.resize(static_cast<size_t>(batch) * max_chars);
    for (size_t i = 0; i < rep.size(); ++i) rep[i] = static_cast<int>(i) / max_chars;
    state = g.zeros(batch, dec_hidden);
  }

  struct StepOut {
    Graph::Ref logits;  // batch x |phonemes|
    Graph::Ref alpha;   // batch x max_chars
  };

  // One teacher-forced decoder step. state_mask (optional) freezes rows whose
  // target sequence already ended.
  StepOut step(const std::vector<int>& prev_ids, const std::vector<float>* state_mask) {
    auto q = g.matmul(state, refs.att_q);
    auto q_rep = g.gather_rows(q, std::vector<int>(rep));
    auto scores = g.matmul(g.tanh(g.add(keys, q_rep)), refs.att_v);
    auto alpha = g.softmax_rows(g.add(g.reshape(scores, batch, max_chars), att_mask));
    auto weighted = g.mul_colvec(enc_states, g.reshape(alpha, batch * max_chars, 1));
    auto ctx = g.sum_row_groups(weighted, max_chars);
    auto x = g.concat_cols(g.gather_rows(refs.ph_emb, std::vector<int>(prev_ids)), ctx);
    auto s_new = gru_cell(g, refs.dec, x, state);
    state = state_mask ? masked_step(g, s_new, state, *state_mask) : s_new;
    auto logits = g.add_rowvec(g.matmul(state, refs.proj_w), refs.proj_b);
    return {logits, alpha};
  }
};

std::vector<int> word_ids_checked(const G2pModel& m, const std::string& word) {
  std::vector<int> ids;
  for (const auto& c : utf8_chars(word)) {
    const int id = m.graphemes.find(c);
    if (id < 0) throw DataError("g2p: character '" + c + "' not in the grapheme alphabet");
    ids.push_back(id);
  }
  if (ids.empty()) throw std::invalid_argument("g2p: empty word");
  return ids;
}

}  // namespace

AttentionMatrix attention_matrix(const G2pModel& model, const std::string& word,
                                 const std::vector<std::string>& pron) {
  if (pron.empty()) throw std::invalid_argument("attention_matrix: empty pronunciation");
  const auto char_ids = word_ids_checked(model, word);
  std::vector<int> ph_ids;
  for (const auto& p : pron) {
    const int id = model.phonemes.find(p);
    if (id < 0) throw DataError("g2p: phoneme '" + p + "' not in the phonetic alphabet");
    ph_ids.push_back(id);
  }

  const int L = static_cast<int>(char_ids.size());
  const int K = static_cast<int>(ph_ids.size());
  Graph g;
  G2pRefs refs = register_g2p(g, model);
  G2pForward fwd(g, refs, {char_ids}, model.d_dec_hidden, model.graphemes.pad_id());

  AttentionMatrix out;
  out.word = word;
  out.chars = utf8_chars(word);
  out.phonemes = pron;
  out.a = Mat(K, L);
  int prev = model.phonemes.bos_id();
  for (int k = 0; k < K; ++k) {
    auto so = fwd.step({prev}, nullptr);
    const float* row = g.value(so.alpha);
    for (int l = 0; l < L; ++l) out.a.at(k, l) = row[l];
    prev = ph_ids[k];
  }
  return out;
}

std::vector<std::string> g2p_decode(const G2pModel& model, const std::string& word) {
  const auto char_ids = word_ids_checked(model, word);
  Graph g;
  G2pRefs refs = register_g2p(g, model);
  G2pForward fwd(g, refs, {char_ids}, model.d_dec_hidden, model.graphemes.pad_id());

  std::vector<std::string> out;
  const int eos = model.phonemes.eos_id();
  const int max_steps = 2 * static_cast<int>(char_ids.size()) + 5;
  int prev = model.phonemes.bos_id();
  for (int t = 0; t < max_steps; ++t) {
    auto so = fwd.step({prev}, nullptr);
    const float* row = g.value(so.logits);
    int best = 0;
    for (int j = 1; j < model.phonemes.size(); ++j)
      if (row[j] > row[best]) best = j;
    if (best == eos) break;
    out.push_back(model.phonemes.symbol(best));
    prev = best;
  }
  return out;
}

namespace {

struct G2pPrepared {
  std::vector<std::vector<int>> words;       // char ids per word
  std::vector<std::vector<int>> prev_ids;    // [step][b]
  std::vector<std::vector<float>> dec_mask;  // [step][b]
  std::vector<int> targets;                  // step-major
  std::vector<float> weights;
  int steps = 0;
};

G2pPrepared prepare(const G2pModel& m, const std::vector<const DictEntry*>& entries) {
  G2pPrepared p;
  const int B = static_cast<int>(entries.size());
  int max_k = 0;
  for (const auto* e : entries) max_k = std::max(max_k, static_cast<int>(e->pron.size()));
  p.steps = max_k + 1;  // + </s>

  for (const auto* e : entries) p.words.push_back(word_ids_checked(m, e->word));

  const int bos = m.phonemes.bos_id(), eos = m.phonemes.eos_id(), pad = m.phonemes.pad_id();
  p.prev_ids.assign(p.steps, std::vector<int>(B, pad));
  p.dec_mask.assign(p.steps, std::vector<float>(B, 0.0f));
  p.targets.assign(static_cast<size_t>(p.steps) * B, -1);
  long real = 0;
  for (int b = 0; b < B; ++b) {
    const auto& pron = entries[b]->pron;
    const int K = static_cast<int>(pron.size());
    for (int t = 0; t <= K; ++t) {
      const int prev = t == 0 ? bos : m.phonemes.find(pron[t - 1]);
      const int tgt = t == K ? eos : m.phonemes.find(pron[t]);
      if (prev < 0 || tgt < 0)
        throw DataError("g2p: phoneme '" + pron[t == 0 ? 0 : t - 1] +
                        "' not in the model's phonetic alphabet");
      p.prev_ids[t][b] = prev;
      p.dec_mask[t][b] = 1.0f;
      p.targets[static_cast<size_t>(t) * B + b] = tgt;
      ++real;
    }
  }
  p.weights.assign(p.targets.size(), 0.0f);
  for (size_t i = 0; i < p.targets.size(); ++i)
    if (p.targets[i] >= 0) p.weights[i] = 1.0f / static_cast<float>(real);
  return p;
}

}  // namespace

G2pTrainResult train_g2p(const PronunciationDictionary& dict, const PipelineConfig& cfg,
                         std::ostream* log) {
  cfg.validate();
  G2pTrainResult result{G2pModel::create(dict, cfg), {}};
  G2pModel& model = result.model;
  auto named = model.parameters();
  auto params = pointers(named);

  // fixed length-sorted batches, shuffled visiting order per epoch
  std::vector<size_t> order(dict.entries.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return dict.entries[a].word.size() < dict.entries[b].word.size();
  });
  std::vector<G2pPrepared> batches;
  for (size_t start = 0; start < order.size(); start += cfg.g2p_batch) {
    const size_t end = std::min(order.size(), start + cfg.g2p_batch);
    std::vector<const DictEntry*> chunk;
    for (size_t k = start; k < end; ++k) chunk.push_back(&dict.entries[order[k]]);
    batches.push_back(prepare(model, chunk));
  }

  AdamState adam;
  adam.lr = static_cast<float>(cfg.g2p_lr);
  adam.beta1 = static_cast<float>(cfg.adam_beta1);
  adam.beta2 = static_cast<float>(cfg.adam_beta2);
  adam.eps = static_cast<float>(cfg.adam_eps);

  std::mt19937_64 shuffle_rng(mix_seed(cfg.seed, 0x62d7));
  std::vector<size_t> visit;
  size_t visit_pos = 0;
  double loss_acc = 0;
  long loss_n = 0;
  const long report_every = std::max<long>(1, cfg.g2p_steps / 10);

  for (long step = 1; step <= cfg.g2p_steps; ++step) {
    if (visit_pos >= visit.size()) {
      visit.resize(batches.size());
      std::iota(visit.begin(), visit.end(), size_t{0});
      for (size_t i = visit.size(); i > 1; --i)
        std::swap(visit[i - 1], visit[rng_below(shuffle_rng, i)]);
      visit_pos = 0;
    }
    const G2pPrepared& pb = batches[visit[visit_pos++]];

    zero_grads(params);
    Graph g;
    G2pRefs refs = register_g2p(g, model);
    G2pForward fwd(g, refs, pb.words, model.d_dec_hidden, model.graphemes.pad_id());
    std::vector<Graph::Ref> step_logits(pb.steps);
    for (int t = 0; t < pb.steps; ++t)
      step_logits[t] = fwd.step(pb.prev_ids[t], &pb.dec_mask[t]).logits;
    auto loss = g.cross_entropy(g.concat_rows(step_logits), pb.targets, pb.weights);
    loss_acc += g.value(loss)[0];
    ++loss_n;
    g.backward(loss);
    clip_global_norm(params, cfg.clip_norm);
    adam_step(params, adam);

    if (step % report_every == 0 || step == cfg.g2p_steps) {
      result.loss_log.emplace_back(step, loss_acc / loss_n);
      if (log) *log << "g2p step " << step << " loss " << loss_acc / loss_n << "\n";
      loss_acc = 0;
      loss_n = 0;
    }
  }
  return result;
}

double g2p_exact_match(const G2pModel& model, const PronunciationDictionary& dict) {
  if (dict.entries.empty()) return 0.0;
  long hit = 0;
  for (const auto& e : dict.entries)
    if (g2p_decode(model, e.word) == e.pron) ++hit;
  return static_cast<double>(hit) / dict.entries.size();
}

}  // namespace spellnet
