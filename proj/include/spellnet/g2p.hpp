#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "spellnet/config.hpp"
#include "spellnet/gru.hpp"
#include "spellnet/optim.hpp"
#include "spellnet/tensor.hpp"
#include "spellnet/vocab.hpp"

namespace spellnet {

struct DictEntry {
  std::string word;                 // lowercased spelling
  std::vector<std::string> pron;    // phoneme symbols
};

// Word list with pronunciations; the alphabets are exactly the symbols that
// occur in the entries.
struct PronunciationDictionary {
  std::vector<DictEntry> entries;
  std::vector<std::string> char_alphabet;     // sorted unique code points
  std::vector<std::string> phoneme_alphabet;  // sorted unique symbols
};

// Parses `WORD<TAB>PH1 PH2 ...` lines. Words are lowercased (ASCII);
// trailing stress digits are stripped from phonemes when strip_stress is set;
// duplicate (word, pronunciation) pairs collapse to one entry.
PronunciationDictionary parse_dictionary(const std::vector<std::string>& lines,
                                         bool strip_stress = true);
PronunciationDictionary load_dictionary(const std::string& path, bool strip_stress = true);
std::string serialize_dictionary(const PronunciationDictionary& dict);

// Attention encoder-decoder from character sequences to phoneme sequences.
// Encoder is a bidirectional GRU over character embeddings; the decoder GRU
// consumes [previous-phoneme embedding; attention context] and the additive
// attention score is v . tanh(W_q d + W_k enc).
struct G2pModel {
  Vocabulary graphemes;  // alphabet chars + <pad>
  Vocabulary phonemes;   // alphabet symbols + <s>, </s>, <pad>
  int d_char_emb = 0;
  int d_ph_emb = 0;
  int d_enc_hidden = 0;  // per direction
  int d_dec_hidden = 0;
  int d_att = 0;

  Mat char_emb;          // |graphemes| x d_char_emb
  GruParams enc_fwd;     // d_char_emb -> d_enc_hidden
  GruParams enc_bwd;
  Mat ph_emb;            // |phonemes| x d_ph_emb
  GruParams dec;         // (d_ph_emb + 2*d_enc_hidden) -> d_dec_hidden
  Mat att_q;             // d_dec_hidden x d_att
  Mat att_k;             // 2*d_enc_hidden x d_att
  Mat att_v;             // d_att x 1
  Mat proj_w;            // d_dec_hidden x |phonemes|
  Mat proj_b;            // 1 x |phonemes|

  static G2pModel create(const PronunciationDictionary& dict, const PipelineConfig& cfg);
  NamedParams parameters();
};

// Per-word normalized attention: row k is the attention distribution over the
// word's characters at the decoder step that outputs phoneme k, under teacher
// forcing of the given pronunciation.
struct AttentionMatrix {
  std::string word;
  std::vector<std::string> chars;     // per code point, length L
  std::vector<std::string> phonemes;  // length K
  Mat a;                              // K x L, rows sum to 1
};

AttentionMatrix attention_matrix(const G2pModel& model, const std::string& word,
                                 const std::vector<std::string>& pron);

// Greedy decode until </s> or 2L+5 steps.
std::vector<std::string> g2p_decode(const G2pModel& model, const std::string& word);

struct G2pTrainResult {
  G2pModel model;
  std::vector<std::pair<long, double>> loss_log;  // (step, mean per-symbol loss)
};

// Adam with teacher forcing; deterministic given cfg.seed.
G2pTrainResult train_g2p(const PronunciationDictionary& dict, const PipelineConfig& cfg,
                         std::ostream* log = nullptr);

// Fraction of entries whose greedy decode reproduces the reference.
double g2p_exact_match(const G2pModel& model, const PronunciationDictionary& dict);

}  // namespace spellnet
