// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lsgd/data/synthetic.hpp"
#include "lsgd/model/token_batch.hpp"

namespace lsgd::data {

enum class StreamSource { file, synthetic };

std::string_view to_string(StreamSource source);
StreamSource stream_source_from_string(std::string_view name);

// Sequential reader over [begin, end) of a shared token buffer.
class TokenStream {
 public:
  TokenStream(std::shared_ptr<const std::vector<std::int32_t>> tokens, std::size_t begin, std::size_t end,
              int vocab_size, StreamSource source, std::uint64_t seed);

  StreamSource source() const { return source_; }
  std::uint64_t seed() const { return seed_; }
  int vocab_size() const { return vocab_size_; }

  // Tokens consumed since begin.
  std::size_t position() const { return cursor_ - begin_; }
  std::size_t remaining() const { return end_ - cursor_; }
  void seek(std::size_t position);

  // The next n tokens plus one lookahead token for targets, or nullopt when
  // fewer than n + 1 tokens remain. Advances by n.
  std::optional<std::span<const std::int32_t>> take(std::size_t n);
  // Same window without advancing.
  std::optional<std::span<const std::int32_t>> peek(std::size_t n) const;

  std::span<const std::int32_t> all() const;

 private:
  std::shared_ptr<const std::vector<std::int32_t>> tokens_;
  std::size_t begin_;
  std::size_t end_;
  std::size_t cursor_;
  int vocab_size_;
  StreamSource source_;
  std::uint64_t seed_;
};

struct ShardPlan {
  int m = 1;
  std::int64_t global_batch_tokens = 0;
  std::int64_t per_cluster_tokens = 0;
  int seq_len = 1;

  int rows_per_cluster() const { return static_cast<int>(per_cluster_tokens / seq_len); }
};

// Throws ConfigError unless m >= 1, m divides B and seq_len divides B / m.
ShardPlan make_shard_plan(int m, std::int64_t global_batch_tokens, int seq_len);

// Cluster c of step t receives contiguous slice (c + t + seed) mod m of the
// next B stream tokens, where t counts the global batches already drawn.
// Returns nullopt (end of data) when fewer than B + 1 tokens remain.
std::optional<std::vector<model::TokenBatch>> next_global_batch(TokenStream& stream, const ShardPlan& plan);

// Slice index assigned to `cluster` at `step`.
int shard_slice(const ShardPlan& plan, std::int64_t step, std::uint64_t seed, int cluster);

// Deterministic evaluation batches taken from the start of the stream.
std::vector<model::TokenBatch> fixed_batches(const TokenStream& stream, std::int64_t budget_tokens, int seq_len,
                                             int rows_per_batch);

struct CorpusSpec {
  StreamSource source = StreamSource::synthetic;
  std::filesystem::path path;  // file source
  SyntheticSpec synthetic;
  std::uint64_t seed = 0;
  double validation_fraction = 0.1;

  bool operator==(const CorpusSpec&) const = default;
};

// Train split is the leading (1 - validation_fraction) of the tokens,
// validation the trailing remainder; the two never overlap.
class Corpus {
 public:
  explicit Corpus(const CorpusSpec& spec);

  int vocab_size() const { return vocab_size_; }
  std::size_t size() const { return tokens_->size(); }
  std::size_t split_point() const { return split_; }
  TokenStream train_stream() const;
  TokenStream validation_stream() const;

 private:
  std::shared_ptr<const std::vector<std::int32_t>> tokens_;
  std::size_t split_ = 0;
  int vocab_size_ = 0;
  StreamSource source_;
  std::uint64_t seed_;
};

}  // namespace lsgd::data
