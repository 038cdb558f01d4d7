// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "lsgd/model/model_config.hpp"

#include <string>

#include "lsgd/core/error.hpp"

namespace lsgd::model {

std::string_view to_string(Architecture arch) {
  switch (arch) {
    case Architecture::transformer:
      return "transformer";
    case Architecture::mlp:
      return "mlp";
  }
  return "unknown";
}

Architecture architecture_from_string(std::string_view name) {
  if (name == "transformer") return Architecture::transformer;
  if (name == "mlp") return Architecture::mlp;
  throw ConfigError("model.arch: unknown architecture '" + std::string(name) + "' (expected transformer|mlp)");
}

void ModelConfig::validate() const {
  if (vocab_size < 2) throw ConfigError("model.vocab_size must be >= 2, got " + std::to_string(vocab_size));
  if (d_model < 1) throw ConfigError("model.d_model must be positive, got " + std::to_string(d_model));
  if (n_layers < 1) throw ConfigError("model.n_layers must be positive, got " + std::to_string(n_layers));
  if (seq_len < 1) throw ConfigError("model.seq_len must be >= 1, got " + std::to_string(seq_len));
  if (arch == Architecture::transformer) {
    if (n_heads < 1) throw ConfigError("model.n_heads must be positive, got " + std::to_string(n_heads));
    if (d_model % n_heads != 0) {
      throw ConfigError("model.d_model (" + std::to_string(d_model) + ") must be divisible by model.n_heads (" +
                        std::to_string(n_heads) + ")");
    }
  }
}

ModelConfig tiny_transformer_config() {
  ModelConfig c;
  c.arch = Architecture::transformer;
  c.vocab_size = 32;
  c.d_model = 16;
  c.n_layers = 2;
  c.n_heads = 2;
  c.seq_len = 16;
  return c;
}

std::int64_t analytic_non_embedding_count(const ModelConfig& config) {
  const std::int64_t d = config.d_model;
  const std::int64_t layers = config.n_layers;
  if (config.arch == Architecture::transformer) return layers * (12 * d * d + 13 * d) + 2 * d;
  return layers * (d * d + d);
}

std::int64_t analytic_embedding_count(const ModelConfig& config) {
  const std::int64_t d = config.d_model;
  const std::int64_t v = config.vocab_size;
  std::int64_t count = v * d;
  if (config.arch == Architecture::transformer) count += static_cast<std::int64_t>(config.seq_len) * d;
  if (!config.tie_embeddings) count += d * v;
  return count;
}

std::int64_t analytic_parameter_count(const ModelConfig& config) {
  return analytic_non_embedding_count(config) + analytic_embedding_count(config);
}

}  // namespace lsgd::model
