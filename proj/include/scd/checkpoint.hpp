#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "scd/model.hpp"
#include "scd/optimizer.hpp"
#include "scd/vocab.hpp"

namespace scd {

/// On-disk training snapshot. The binary layout is: magic, format version,
/// the resolved config as embedded UTF-8 text, the vocabulary text, step
/// and seed counters, named little-endian float64 tensors (model state plus
/// optimizer moments), and a trailing FNV-1a checksum over everything
/// before it.
struct CheckpointData {
  std::uint32_t version = 1;
  std::string config_text;
  std::string vocab_text;
  std::uint64_t step = 0;
  std::uint64_t seed = 0;
  std::uint64_t opt_steps = 0;
  std::vector<std::pair<std::string, Matrix>> tensors;
};

void save_checkpoint(const CheckpointData& ck, const std::string& path);

/// Verifies magic, version, and checksum before touching any tensor bytes;
/// truncation or corruption surfaces as data_error, never as garbage
/// parameters.
CheckpointData load_checkpoint(const std::string& path);

/// Packs model state (running statistics included) and, when present, the
/// optimizer's Adam moments under "opt.m.<name>" / "opt.v.<name>".
CheckpointData make_checkpoint(const std::string& config_text,
                               const Vocab& vocab, ModelParams& params,
                               const Optimizer* opt, std::uint64_t step,
                               std::uint64_t seed);

/// Fills `params` (already shaped from the config) by tensor name, and the
/// optimizer moments when `opt` is given. Missing tensors or shape
/// mismatches are data errors.
void restore_from_checkpoint(const CheckpointData& ck, ModelParams& params,
                             Optimizer* opt);

}  // namespace scd
