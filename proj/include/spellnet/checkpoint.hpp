#pragma once

#include <string>
#include <utility>
#include <vector>

#include "spellnet/g2p.hpp"
#include "spellnet/nested_rnn.hpp"
#include "spellnet/tensor.hpp"
#include "spellnet/vocab.hpp"

namespace spellnet {

// Binary model container: magic, version, resolved config text, step count,
// named vocabularies, then named float32 tensors (row-major, little-endian).
// save(load(x)) reproduces x byte for byte.
struct Checkpoint {
  uint32_t version = 1;
  std::string kind;         // "nested_rnn" or "g2p"
  std::string config_text;  // PipelineConfig::serialize() at save time
  long step = 0;
  std::vector<std::pair<std::string, std::string>> vocabs;  // (name, serialized text)
  std::vector<std::pair<std::string, Mat>> tensors;
};

std::string serialize_checkpoint(const Checkpoint& c);
Checkpoint deserialize_checkpoint(const std::string& bytes);
void save_checkpoint(const std::string& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::string& path);

// Model <-> checkpoint bridges. Loading validates that the named tensors
// cover the model's parameter set exactly.
Checkpoint checkpoint_of(NestedRnnModel& model, const PipelineConfig& cfg, long step);
NestedRnnModel nested_from_checkpoint(const Checkpoint& c);

Checkpoint checkpoint_of(G2pModel& model, const PipelineConfig& cfg, long step);
G2pModel g2p_from_checkpoint(const Checkpoint& c);

PipelineConfig config_from_checkpoint(const Checkpoint& c);

}  // namespace spellnet
