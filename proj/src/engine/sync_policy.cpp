// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "lsgd/engine/sync_policy.hpp"

#include <cmath>
#include <string>

#include "lsgd/core/error.hpp"

namespace lsgd::engine {

std::string_view to_string(SyncMode mode) { return mode == SyncMode::local_sgd ? "local_sgd" : "ddp_baseline"; }

std::string_view to_string(InnerKind kind) { return kind == InnerKind::adamw ? "adamw" : "sgd"; }

SyncMode sync_mode_from_string(std::string_view name) {
  if (name == "local_sgd") return SyncMode::local_sgd;
  if (name == "ddp_baseline" || name == "ddp") return SyncMode::ddp_baseline;
  throw ConfigError("policy.mode: unknown mode '" + std::string(name) + "' (expected local_sgd|ddp_baseline)");
}

InnerKind inner_kind_from_string(std::string_view name) {
  if (name == "adamw") return InnerKind::adamw;
  if (name == "sgd") return InnerKind::sgd;
  throw ConfigError("policy.inner: unknown optimizer '" + std::string(name) + "' (expected adamw|sgd)");
}

void SyncPolicy::validate() const {
  if (s < 1) throw ConfigError("policy.s must be >= 1");
  if (!(std::isfinite(outer.lr) && outer.lr >= 0.0)) throw ConfigError("policy.outer.lr must be finite and >= 0");
  if (!(outer.momentum >= 0.0 && outer.momentum < 1.0)) throw ConfigError("policy.outer.momentum must lie in [0, 1)");
  if (!(adamw.beta1 >= 0.0 && adamw.beta1 < 1.0)) throw ConfigError("policy.adamw.beta1 must lie in [0, 1)");
  if (!(adamw.beta2 >= 0.0 && adamw.beta2 < 1.0)) throw ConfigError("policy.adamw.beta2 must lie in [0, 1)");
  if (!(adamw.eps > 0.0)) throw ConfigError("policy.adamw.eps must be positive");
  if (!(adamw.weight_decay >= 0.0)) throw ConfigError("policy.adamw.weight_decay must be >= 0");
}

}  // namespace lsgd::engine
