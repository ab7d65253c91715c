#include "spellnet/checkpoint.hpp"

#include <cstring>
#include <map>

#include "spellnet/error.hpp"
#include "spellnet/text.hpp"

namespace spellnet {

namespace {

constexpr char kMagic[] = "SPELLNET\n";
constexpr size_t kMagicLen = sizeof(kMagic) - 1;

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_str(std::string& out, const std::string& s) {
  put_u32(out, static_cast<uint32_t>(s.size()));
  out += s;
}

void put_f32(std::string& out, float f) {
  uint32_t bits;
  std::memcpy(&bits, &f, 4);
  put_u32(out, bits);
}

struct Reader {
  const std::string& b;
  size_t pos = 0;

  void need(size_t n) const {
    if (pos + n > b.size()) throw DataError("checkpoint: truncated file");
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<unsigned char>(b[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<unsigned char>(b[pos + i])) << (8 * i);
    pos += 8;
    return v;
  }
  std::string str() {
    const uint32_t n = u32();
    need(n);
    std::string s = b.substr(pos, n);
    pos += n;
    return s;
  }
  float f32() {
    const uint32_t bits = u32();
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
  }
};

}  // namespace

std::string serialize_checkpoint(const Checkpoint& c) {
  std::string out;
  out += kMagic;
  put_u32(out, c.version);
  put_str(out, c.kind);
  put_str(out, c.config_text);
  put_u64(out, static_cast<uint64_t>(c.step));
  put_u32(out, static_cast<uint32_t>(c.vocabs.size()));
  for (const auto& [name, text] : c.vocabs) {
    put_str(out, name);
    put_str(out, text);
  }
  put_u32(out, static_cast<uint32_t>(c.tensors.size()));
  for (const auto& [name, m] : c.tensors) {
    put_str(out, name);
    put_u32(out, static_cast<uint32_t>(m.rows));
    put_u32(out, static_cast<uint32_t>(m.cols));
    for (float f : m.v) put_f32(out, f);
  }
  return out;
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  if (bytes.size() < kMagicLen || bytes.compare(0, kMagicLen, kMagic) != 0)
    throw DataError("checkpoint: bad magic (not a spellnet checkpoint)");
  Reader r{bytes, kMagicLen};
  Checkpoint c;
  c.version = r.u32();
  if (c.version != 1)
    throw DataError("checkpoint: unsupported version " + std::to_string(c.version));
  c.kind = r.str();
  c.config_text = r.str();
  c.step = static_cast<long>(r.u64());
  const uint32_t nv = r.u32();
  for (uint32_t i = 0; i < nv; ++i) {
    std::string name = r.str();
    std::string text = r.str();
    c.vocabs.emplace_back(std::move(name), std::move(text));
  }
  const uint32_t nt = r.u32();
  for (uint32_t i = 0; i < nt; ++i) {
    std::string name = r.str();
    const uint32_t rows = r.u32();
    const uint32_t cols = r.u32();
    if (rows == 0 || cols == 0) throw DataError("checkpoint: zero-sized tensor " + name);
    Mat m(static_cast<int>(rows), static_cast<int>(cols));
    for (auto& f : m.v) f = r.f32();
    c.tensors.emplace_back(std::move(name), std::move(m));
  }
  if (r.pos != bytes.size()) throw DataError("checkpoint: trailing bytes");
  return c;
}

void save_checkpoint(const std::string& path, const Checkpoint& c) {
  atomic_write_file(path, serialize_checkpoint(c));
}

Checkpoint load_checkpoint(const std::string& path) {
  return deserialize_checkpoint(read_file(path));
}

PipelineConfig config_from_checkpoint(const Checkpoint& c) {
  return PipelineConfig::parse(c.config_text);
}

namespace {

// Moves checkpoint tensors into the model's named parameters, requiring an
// exact one-to-one cover.
void fill_params(const Checkpoint& c, NamedParams params, const std::string& what) {
  std::map<std::string, Mat*> by_name;
  for (auto& [name, p] : params)
    if (!by_name.emplace(name, p).second)
      throw std::logic_error(what + ": duplicate parameter name " + name);
  std::map<std::string, const Mat*> given;
  for (const auto& [name, m] : c.tensors)
    if (!given.emplace(name, &m).second)
      throw DataError(what + ": duplicate tensor " + name + " in checkpoint");
  for (const auto& [name, p] : by_name) {
    auto it = given.find(name);
    if (it == given.end()) throw DataError(what + ": checkpoint is missing tensor " + name);
    if (it->second->rows != p->rows || it->second->cols != p->cols)
      throw DataError(what + ": tensor " + name + " has shape " +
                      shape_str(it->second->rows, it->second->cols) + ", model expects " +
                      shape_str(p->rows, p->cols));
    p->v = it->second->v;
  }
  for (const auto& [name, m] : given)
    if (!by_name.count(name))
      throw DataError(what + ": checkpoint has extra tensor " + name);
}

Vocabulary vocab_from(const Checkpoint& c, const std::string& name) {
  for (const auto& [n, text] : c.vocabs)
    if (n == name) return Vocabulary::deserialize(text);
  throw DataError("checkpoint: missing vocabulary " + name);
}

}  // namespace

Checkpoint checkpoint_of(NestedRnnModel& model, const PipelineConfig& cfg, long step) {
  Checkpoint c;
  c.kind = "nested_rnn";
  c.config_text = cfg.serialize();
  c.step = step;
  c.vocabs.emplace_back("words", model.words.serialize());
  c.vocabs.emplace_back("chars", model.chars.serialize());
  for (auto& [name, p] : model.parameters()) c.tensors.emplace_back(name, *p);
  return c;
}

NestedRnnModel nested_from_checkpoint(const Checkpoint& c) {
  if (c.kind != "nested_rnn")
    throw DataError("checkpoint: expected kind nested_rnn, found '" + c.kind + "'");
  const PipelineConfig cfg = config_from_checkpoint(c);
  NestedRnnModel m = NestedRnnModel::create(vocab_from(c, "words"), vocab_from(c, "chars"),
                                            cfg.char_emb, cfg.char_hidden, cfg.word_hidden,
                                            0.0, 0);
  fill_params(c, m.parameters(), "nested_rnn");
  return m;
}

Checkpoint checkpoint_of(G2pModel& model, const PipelineConfig& cfg, long step) {
  Checkpoint c;
  c.kind = "g2p";
  c.config_text = cfg.serialize();
  c.step = step;
  c.vocabs.emplace_back("graphemes", model.graphemes.serialize());
  c.vocabs.emplace_back("phonemes", model.phonemes.serialize());
  for (auto& [name, p] : model.parameters()) c.tensors.emplace_back(name, *p);
  return c;
}

G2pModel g2p_from_checkpoint(const Checkpoint& c) {
  if (c.kind != "g2p")
    throw DataError("checkpoint: expected kind g2p, found '" + c.kind + "'");
  const PipelineConfig cfg = config_from_checkpoint(c);
  G2pModel m;
  m.graphemes = vocab_from(c, "graphemes");
  m.phonemes = vocab_from(c, "phonemes");
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
  fill_params(c, m.parameters(), "g2p");
  return m;
}

}  // namespace spellnet
