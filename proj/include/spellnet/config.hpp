#pragma once

#include <cstdint>
#include <string>

namespace spellnet {

// Every run-affecting knob in one flat struct. Serialized as sorted
// `key=value` lines; that text is what gets hashed for reproducibility
// headers and embedded in checkpoints.
struct PipelineConfig {
  std::string profile = "paper";

  uint64_t seed = 1;

  // corrector dimensions
  int char_emb = 64;
  int char_hidden = 256;
  int word_hidden = 512;  // per direction; the word context vector is twice this

  // vocabulary limits
  int word_limit = 30000;
  int char_limit = 84;

  // optimizer schedule: Adam phase, then SGD with periodic halving
  long adam_steps = 50000;
  long sgd_steps = 150000;
  long sgd_halve_every = 50000;
  int batch_size = 96;
  double lr_adam = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double lr_sgd = 0.2;
  double clip_norm = 5.0;  // <= 0 disables
  double init_range = 0.08;
  long eval_interval = 10000;

  // pseudo-data generation
  double theta_att = 0.2;
  double p_err = 0.05;
  int max_errors_per_word = 1;
  bool allow_identity = false;  // keep identity draws in substitution sampling

  // g2p model
  int g2p_char_emb = 32;
  int g2p_ph_emb = 32;
  int g2p_enc_hidden = 64;  // per direction
  int g2p_dec_hidden = 128;
  int g2p_att_dim = 64;
  long g2p_steps = 8000;
  int g2p_batch = 32;
  double g2p_lr = 1e-3;
  bool g2p_strip_stress = true;

  void apply_profile(const std::string& name);
  void set(const std::string& key, const std::string& value);  // throws DataError on unknown key
  void validate() const;

  std::string serialize() const;
  static PipelineConfig parse(const std::string& text);
  static PipelineConfig load(const std::string& path);

  uint64_t hash() const;
};

}  // namespace spellnet
