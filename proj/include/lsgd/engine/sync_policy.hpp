// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

#include "lsgd/optim/adamw.hpp"
#include "lsgd/optim/nesterov.hpp"

namespace lsgd::engine {

enum class SyncMode { local_sgd, ddp_baseline };
enum class InnerKind { adamw, sgd };

std::string_view to_string(SyncMode mode);
std::string_view to_string(InnerKind kind);
SyncMode sync_mode_from_string(std::string_view name);
InnerKind inner_kind_from_string(std::string_view name);

struct SyncPolicy {
  int s = 32;
  optim::NesterovHyper outer;
  SyncMode mode = SyncMode::local_sgd;
  InnerKind inner = InnerKind::adamw;
  optim::AdamWHyper adamw;
  // Zero the inner optimizer state at every sync.
  bool reset_inner_state = false;

  // Steps per round actually used: 1 in ddp_baseline mode.
  int effective_s() const { return mode == SyncMode::ddp_baseline ? 1 : s; }

  // Throws ConfigError.
  void validate() const;
  bool operator==(const SyncPolicy&) const = default;
};

}  // namespace lsgd::engine
