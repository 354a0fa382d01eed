#pragma once

#include <string>

#include "itpnet/adam.hpp"
#include "itpnet/model.hpp"

namespace itpnet {

/// Everything needed to resume or evaluate a run.
struct Checkpoint {
    Model model;
    Adam opt;     // moments aligned with the model's parameter order
    long step = 0;
};

/// Binary layout, little-endian throughout:
///   "ITPN" | u32 version (= 1) | u64 config bytes | canonical config JSON |
///   u64 record count | records... | u32 CRC32 of everything before it.
/// One record: u32 name bytes | name | u32 rank (= 2) | u64 rows | u64 cols
/// | rows*cols f64 values. Records hold the model tensors in parameter
/// order, then the Adam moments as adam.m.<name> / adam.v.<name>, then
/// meta.step and meta.adam_t. Saving is byte-deterministic.
void save_checkpoint(const Checkpoint& ck, const std::string& path);

/// Rejects bad magic, unknown versions, truncation and checksum mismatches
/// with distinct DataErrors; every model parameter must be present with the
/// exact shape the embedded config dictates.
Checkpoint load_checkpoint(const std::string& path);

/// Architecture fields (T, N, M, K, C, L, d, heads, family, nrrformer,
/// activation) must match to reuse a checkpoint under another config;
/// throws ConfigError naming the first mismatch.
void require_compatible(const TrainConfig& have, const TrainConfig& want);

} // namespace itpnet
