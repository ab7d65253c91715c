#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spellnet/config.hpp"
#include "spellnet/gru.hpp"
#include "spellnet/optim.hpp"
#include "spellnet/tensor.hpp"
#include "spellnet/vocab.hpp"

namespace spellnet {

// Character-over-word sequence labeler: a char-level GRU reads each token
// into a word vector, a bidirectional word-level GRU adds sentence context,
// and a linear projection scores the output vocabulary per position.
struct NestedRnnModel {
  Vocabulary words;
  Vocabulary chars;
  int d_char_emb = 0;
  int d_char_hidden = 0;
  int d_word_hidden = 0;  // per direction

  Mat char_emb;            // |chars| x d_char_emb
  GruParams char_gru;      // d_char_emb -> d_char_hidden
  GruParams word_fwd;      // d_char_hidden -> d_word_hidden
  GruParams word_bwd;      // d_char_hidden -> d_word_hidden
  Mat proj_w;              // 2*d_word_hidden x |words|
  Mat proj_b;              // 1 x |words|

  static NestedRnnModel create(const Vocabulary& words, const Vocabulary& chars, int char_emb,
                               int char_hidden, int word_hidden, double init_range,
                               uint64_t seed);

  NamedParams parameters();
  int context_width() const { return 2 * d_word_hidden; }
};

std::vector<int> word_char_ids(const Vocabulary& chars, const std::string& word);

// Padded minibatch of sentences. Word rows are laid out sentence-major
// (b * max_len + n); logits and targets are step-major (n * batch + b).
struct RnnBatch {
  int batch = 0;
  int max_len = 0;
  int max_chars = 0;
  std::vector<int> lengths;                     // per sentence
  std::vector<int> char_ids;                    // (batch*max_len) x max_chars, flattened
  std::vector<std::vector<float>> char_mask;    // per char step: (batch*max_len) x 1
  std::vector<std::vector<float>> word_mask;    // per word step: batch x 1
  std::vector<int> targets;                     // step-major; -1 at padding (training only)
  long real_tokens = 0;
};

RnnBatch encode_batch(const NestedRnnModel& model,
                      const std::vector<std::vector<std::string>>& sentences);

// Registered graph handles for the full model.
struct NestedRefs {
  Graph::Ref emb;
  GruRefsT<float> char_gru, word_fwd, word_bwd;
  Graph::Ref proj_w, proj_b;
};
NestedRefs register_model(Graph& g, NestedRnnModel& m);        // trainable
NestedRefs register_model(Graph& g, const NestedRnnModel& m);  // frozen

// Builds the full forward pass; returns step-major logits ((max_len*batch) x |words|).
Graph::Ref nested_logits(Graph& g, const NestedRefs& refs, const RnnBatch& batch);

// --- single-sentence operations ---

// Final char-GRU hidden state over the word's characters, from a zero state.
Mat char_encode_word(const NestedRnnModel& model, const std::vector<int>& char_ids);

// Bidirectional context states h_n = [forward; backward], one per word vector.
std::vector<Mat> word_context_encode(const NestedRnnModel& model,
                                     const std::vector<Mat>& word_vectors);

// Per-position output distributions softmax(g(h_n)), rows sum to 1.
Mat predict_tokens(const NestedRnnModel& model, const std::vector<Mat>& hidden_seq);

// Negative sum of natural-log target probabilities.
double sentence_loss(const Mat& distributions, const std::vector<int>& targets);

// Argmax labeling with copy-through: positions predicting a special symbol
// (<unk>, or degenerately <pad>) emit the source token unchanged.
std::vector<std::string> correct_sentence(const NestedRnnModel& model,
                                          const std::vector<std::string>& tokens);
std::vector<std::vector<std::string>> correct_batch(
    const NestedRnnModel& model, const std::vector<std::vector<std::string>>& sentences);

// --- training ---

struct ParallelCorpus {
  std::vector<std::vector<std::string>> source;  // corrupted
  std::vector<std::vector<std::string>> target;  // clean
  size_t size() const { return source.size(); }
};

// Reads `corrupted<TAB>clean` lines; rejects token-count mismatches with the
// offending line number. Blank pairs are dropped.
ParallelCorpus load_pairs_tsv(const std::string& path);
ParallelCorpus make_parallel(const std::vector<std::string>& src_lines,
                             const std::vector<std::string>& tgt_lines);

struct TrainLogEntry {
  long step = 0;
  double loss = 0;      // mean per-token loss since the previous entry
  double lr = 0;
  std::optional<double> dev_f05;
};

struct TrainResult {
  NestedRnnModel model;
  std::vector<TrainLogEntry> log;
  long best_step = 0;
  std::optional<double> best_dev_f05;
};

// Two-phase schedule from the config: adam_steps of Adam, then sgd_steps of
// SGD with periodic halving. Deterministic given cfg.seed. When a dev corpus
// is given, the model scoring the best dev F0.5 is returned; otherwise the
// final parameters are.
TrainResult train_corrector(const ParallelCorpus& data, const Vocabulary& words,
                            const Vocabulary& chars, const PipelineConfig& cfg,
                            const ParallelCorpus* dev = nullptr, std::ostream* log = nullptr,
                            const std::function<void(NestedRnnModel&, long)>& on_eval = {});

// Fraction of positions whose argmax label equals the target.
double token_accuracy(const NestedRnnModel& model, const ParallelCorpus& data);

}  // namespace spellnet
