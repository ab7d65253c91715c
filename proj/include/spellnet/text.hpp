#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace spellnet {

// Whitespace tokenization (space/tab); corpora are expected pre-tokenized,
// one sentence per line.
std::vector<std::string> split_tokens(std::string_view line);
std::string join_tokens(const std::vector<std::string>& tokens);

// UTF-8 <-> code points. Invalid bytes decode as U+FFFD so coverage over
// arbitrary input is total.
std::vector<uint32_t> utf8_decode(std::string_view s);
std::string utf8_encode(const std::vector<uint32_t>& cps);
std::string utf8_encode_one(uint32_t cp);

// Splits a UTF-8 string into per-code-point strings.
std::vector<std::string> utf8_chars(std::string_view s);

// FNV-1a, used for reproducibility headers and derived seeds.
uint64_t fnv1a64(std::string_view bytes);
uint64_t fnv1a64_file(const std::string& path);

// splitmix64; mixes a base seed with a stream index into an RNG seed.
uint64_t mix_seed(uint64_t seed, uint64_t stream);

std::string read_file(const std::string& path);
std::vector<std::string> read_lines(const std::string& path);

// Writes to a temp file in the same directory, then renames over the target.
void atomic_write_file(const std::string& path, std::string_view content);

std::string format_double(double x);  // shortest round-trip decimal

}  // namespace spellnet
