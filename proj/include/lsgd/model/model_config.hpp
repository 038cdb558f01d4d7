// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>

namespace lsgd::model {

enum class Architecture { transformer, mlp };

std::string_view to_string(Architecture arch);
// Throws ConfigError for unknown names.
Architecture architecture_from_string(std::string_view name);

struct ModelConfig {
  Architecture arch = Architecture::transformer;
  int vocab_size = 256;
  int d_model = 64;
  int n_layers = 2;
  int n_heads = 4;  // ignored by the MLP
  int seq_len = 64;
  bool tie_embeddings = false;

  // Throws ConfigError naming the offending field.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

// Small transformer used by gradient checks and smoke tests.
ModelConfig tiny_transformer_config();

// Closed-form parameter counts.
//
// Transformer, per block: 12 d^2 + 13 d
//   ln1 gain+bias 2d, qkv d*3d + 3d, attn proj d*d + d,
//   ln2 gain+bias 2d, fc d*4d + 4d, mlp proj 4d*d + d
// Non-embedding N = n_layers * (12 d^2 + 13 d) + 2d (final norm).
// Embeddings: token V*d, position T*d, plus the untied vocabulary head d*V.
//
// MLP, per hidden layer: d*d + d. Non-embedding N = n_layers * (d^2 + d).
// Embeddings: token V*d plus the untied vocabulary head d*V.
std::int64_t analytic_non_embedding_count(const ModelConfig& config);
std::int64_t analytic_embedding_count(const ModelConfig& config);
std::int64_t analytic_parameter_count(const ModelConfig& config);

}  // namespace lsgd::model
