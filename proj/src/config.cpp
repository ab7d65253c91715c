#include "spellnet/config.hpp"

#include <functional>
#include <map>
#include <sstream>

#include "spellnet/error.hpp"
#include "spellnet/text.hpp"

namespace spellnet {

namespace {

struct Field {
  std::function<std::string(const PipelineConfig&)> get;
  std::function<void(PipelineConfig&, const std::string&)> set;
};

long parse_long(const std::string& key, const std::string& s) {
  try {
    size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("config: bad integer for " + key + ": '" + s + "'");
  }
}

double parse_dbl(const std::string& key, const std::string& s) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("config: bad number for " + key + ": '" + s + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw DataError("config: bad boolean for " + key + ": '" + s + "'");
}

#define INT_FIELD(name)                                                                \
  {#name, Field{[](const PipelineConfig& c) { return std::to_string(c.name); },        \
                [](PipelineConfig& c, const std::string& s) {                          \
                  c.name = static_cast<decltype(c.name)>(parse_long(#name, s));        \
                }}}
#define DBL_FIELD(name)                                                                \
  {#name, Field{[](const PipelineConfig& c) { return format_double(c.name); },         \
                [](PipelineConfig& c, const std::string& s) {                          \
                  c.name = parse_dbl(#name, s);                                        \
                }}}
#define BOOL_FIELD(name)                                                               \
  {#name, Field{[](const PipelineConfig& c) { return c.name ? "true" : "false"; },     \
                [](PipelineConfig& c, const std::string& s) {                          \
                  c.name = parse_bool(#name, s);                                       \
                }}}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> f = {
      {"profile", Field{[](const PipelineConfig& c) { return c.profile; },
                        [](PipelineConfig& c, const std::string& s) { c.apply_profile(s); }}},
      {"seed", Field{[](const PipelineConfig& c) { return std::to_string(c.seed); },
                     [](PipelineConfig& c, const std::string& s) {
                       c.seed = static_cast<uint64_t>(parse_long("seed", s));
                     }}},
      INT_FIELD(char_emb),
      INT_FIELD(char_hidden),
      INT_FIELD(word_hidden),
      INT_FIELD(word_limit),
      INT_FIELD(char_limit),
      INT_FIELD(adam_steps),
      INT_FIELD(sgd_steps),
      INT_FIELD(sgd_halve_every),
      INT_FIELD(batch_size),
      DBL_FIELD(lr_adam),
      DBL_FIELD(adam_beta1),
      DBL_FIELD(adam_beta2),
      DBL_FIELD(adam_eps),
      DBL_FIELD(lr_sgd),
      DBL_FIELD(clip_norm),
      DBL_FIELD(init_range),
      INT_FIELD(eval_interval),
      DBL_FIELD(theta_att),
      DBL_FIELD(p_err),
      INT_FIELD(max_errors_per_word),
      BOOL_FIELD(allow_identity),
      INT_FIELD(g2p_char_emb),
      INT_FIELD(g2p_ph_emb),
      INT_FIELD(g2p_enc_hidden),
      INT_FIELD(g2p_dec_hidden),
      INT_FIELD(g2p_att_dim),
      INT_FIELD(g2p_steps),
      INT_FIELD(g2p_batch),
      DBL_FIELD(g2p_lr),
      BOOL_FIELD(g2p_strip_stress),
  };
  return f;
}

#undef INT_FIELD
#undef DBL_FIELD
#undef BOOL_FIELD

}  // namespace

void PipelineConfig::apply_profile(const std::string& name) {
  if (name == "paper") {
    profile = "paper";
    return;  // struct defaults are the paper-scale settings
  }
  if (name == "desk") {
    profile = "desk";
    char_emb = 16;
    char_hidden = 32;
    word_hidden = 64;
    batch_size = 32;
    adam_steps = 4000;
    sgd_steps = 2000;
    sgd_halve_every = 1000;
    eval_interval = 500;
    g2p_steps = 4000;
    return;
  }
  throw DataError("config: unknown profile '" + name + "' (expected paper or desk)");
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
  auto it = fields().find(key);
  if (it == fields().end()) throw DataError("config: unknown key '" + key + "'");
  it->second.set(*this, value);
}

void PipelineConfig::validate() const {
  auto positive = [](long v, const char* what) {
    if (v <= 0) throw DataError(std::string("config: ") + what + " must be positive");
  };
  positive(char_emb, "char_emb");
  positive(char_hidden, "char_hidden");
  positive(word_hidden, "word_hidden");
  positive(word_limit, "word_limit");
  positive(char_limit, "char_limit");
  positive(batch_size, "batch_size");
  positive(sgd_halve_every, "sgd_halve_every");
  positive(eval_interval, "eval_interval");
  positive(max_errors_per_word, "max_errors_per_word");
  positive(g2p_char_emb, "g2p_char_emb");
  positive(g2p_ph_emb, "g2p_ph_emb");
  positive(g2p_enc_hidden, "g2p_enc_hidden");
  positive(g2p_dec_hidden, "g2p_dec_hidden");
  positive(g2p_att_dim, "g2p_att_dim");
  positive(g2p_batch, "g2p_batch");
  if (adam_steps < 0 || sgd_steps < 0 || g2p_steps < 0)
    throw DataError("config: step counts must be non-negative");
  if (p_err < 0.0 || p_err > 1.0) throw DataError("config: p_err must be in [0,1]");
  if (theta_att <= 0.0 || theta_att >= 1.0) throw DataError("config: theta_att must be in (0,1)");
  if (lr_adam <= 0.0 || lr_sgd <= 0.0 || g2p_lr <= 0.0)
    throw DataError("config: learning rates must be positive");
}

std::string PipelineConfig::serialize() const {
  std::ostringstream out;
  for (const auto& [key, field] : fields()) out << key << "=" << field.get(*this) << "\n";
  return out.str();
}

PipelineConfig PipelineConfig::parse(const std::string& text) {
  PipelineConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  // apply profile first so explicit keys override it regardless of file order
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string profile_value;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError("config: line " + std::to_string(lineno) + " is not key=value: '" + line +
                      "'");
    auto trim = [](std::string s) {
      const size_t a = s.find_first_not_of(" \t");
      const size_t b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "profile")
      profile_value = value;
    else
      pairs.emplace_back(std::move(key), std::move(value));
  }
  if (!profile_value.empty()) c.apply_profile(profile_value);
  for (const auto& [key, value] : pairs) c.set(key, value);
  return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  return parse(read_file(path));
}

uint64_t PipelineConfig::hash() const { return fnv1a64(serialize()); }

}  // namespace spellnet
