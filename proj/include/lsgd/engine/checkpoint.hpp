// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0
//
// Checkpoint container (little-endian):
//   0   8  magic "LSGDCKPT"
//   8   4  format version (1)
//   12  8  header length H
//   20  H  JSON header: model, policy, seeds, m, step, round, stream
//          position, inner step counts, segment table, payload order
//   ..     payload: f64 arrays in header order (global, outer velocity,
//          then per replica params [, first moment, second moment])
//   end 8  FNV-1a 64 over the payload

#pragma once

#include <cstdint>
#include <filesystem>

#include "lsgd/engine/run_state.hpp"

namespace lsgd::engine {

struct Checkpoint {
  RunState run;
  std::uint64_t stream_position = 0;
};

void save_checkpoint(const std::filesystem::path& path, const RunState& run, std::uint64_t stream_position);

// Throws IoError when unreadable, IntegrityError on a bad magic, version,
// checksum or layout.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace lsgd::engine
