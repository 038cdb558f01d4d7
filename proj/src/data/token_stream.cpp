// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "lsgd/data/token_stream.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lsgd/core/error.hpp"
#include "lsgd/data/token_file.hpp"

namespace lsgd::data {

std::string_view to_string(StreamSource source) { return source == StreamSource::file ? "file" : "synthetic"; }

StreamSource stream_source_from_string(std::string_view name) {
  if (name == "file") return StreamSource::file;
  if (name == "synthetic") return StreamSource::synthetic;
  throw ConfigError("data.source: unknown source '" + std::string(name) + "' (expected file|synthetic)");
}

TokenStream::TokenStream(std::shared_ptr<const std::vector<std::int32_t>> tokens, std::size_t begin, std::size_t end,
                         int vocab_size, StreamSource source, std::uint64_t seed)
    : tokens_(std::move(tokens)),
      begin_(begin),
      end_(end),
      cursor_(begin),
      vocab_size_(vocab_size),
      source_(source),
      seed_(seed) {
  if (begin_ > end_ || end_ > tokens_->size()) throw DataError("token stream range outside the buffer");
}

void TokenStream::seek(std::size_t position) {
  if (begin_ + position > end_) throw DataError("seek past the end of the stream");
  cursor_ = begin_ + position;
}

std::optional<std::span<const std::int32_t>> TokenStream::peek(std::size_t n) const {
  if (end_ - cursor_ < n + 1) return std::nullopt;
  return std::span<const std::int32_t>(*tokens_).subspan(cursor_, n + 1);
}

std::optional<std::span<const std::int32_t>> TokenStream::take(std::size_t n) {
  auto window = peek(n);
  if (window) cursor_ += n;
  return window;
}

std::span<const std::int32_t> TokenStream::all() const {
  return std::span<const std::int32_t>(*tokens_).subspan(begin_, end_ - begin_);
}

ShardPlan make_shard_plan(int m, std::int64_t global_batch_tokens, int seq_len) {
  if (m < 1) throw ConfigError("topology.m must be >= 1, got " + std::to_string(m));
  if (seq_len < 1) throw ConfigError("model.seq_len must be >= 1");
  if (global_batch_tokens <= 0 || global_batch_tokens % (static_cast<std::int64_t>(m) * seq_len) != 0) {
    throw ConfigError("schedule.batch_tokens (" + std::to_string(global_batch_tokens) +
                      ") must be a positive multiple of m * seq_len (" +
                      std::to_string(static_cast<std::int64_t>(m) * seq_len) + ")");
  }
  return {m, global_batch_tokens, global_batch_tokens / m, seq_len};
}

int shard_slice(const ShardPlan& plan, std::int64_t step, std::uint64_t seed, int cluster) {
  const auto m = static_cast<std::uint64_t>(plan.m);
  return static_cast<int>((static_cast<std::uint64_t>(cluster) + static_cast<std::uint64_t>(step) % m + seed % m) % m);
}

namespace {

model::TokenBatch rows_from(std::span<const std::int32_t> window, int rows, int seq_len) {
  model::TokenBatch b;
  b.rows = rows;
  b.seq_len = seq_len;
  const auto n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(seq_len);
  b.inputs.assign(window.begin(), window.begin() + static_cast<std::ptrdiff_t>(n));
  b.targets.assign(window.begin() + 1, window.begin() + 1 + static_cast<std::ptrdiff_t>(n));
  return b;
}

}  // namespace

std::optional<std::vector<model::TokenBatch>> next_global_batch(TokenStream& stream, const ShardPlan& plan) {
  const auto global = static_cast<std::size_t>(plan.global_batch_tokens);
  const auto step = static_cast<std::int64_t>(stream.position() / global);
  const auto window = stream.take(global);
  if (!window) return std::nullopt;
  const auto per = static_cast<std::size_t>(plan.per_cluster_tokens);
  std::vector<model::TokenBatch> shards;
  shards.reserve(static_cast<std::size_t>(plan.m));
  for (int c = 0; c < plan.m; ++c) {
    const auto slice = static_cast<std::size_t>(shard_slice(plan, step, stream.seed(), c));
    shards.push_back(rows_from(window->subspan(slice * per, per + 1), plan.rows_per_cluster(), plan.seq_len));
  }
  return shards;
}

std::vector<model::TokenBatch> fixed_batches(const TokenStream& stream, std::int64_t budget_tokens, int seq_len,
                                             int rows_per_batch) {
  if (budget_tokens <= 0 || seq_len <= 0 || rows_per_batch <= 0) throw ArgumentError("fixed_batches: bad sizes");
  const auto tokens = stream.all();
  const auto per_batch = static_cast<std::size_t>(rows_per_batch) * static_cast<std::size_t>(seq_len);
  std::vector<model::TokenBatch> out;
  std::size_t used = 0;
  while (used < static_cast<std::size_t>(budget_tokens)) {
    const std::size_t remaining_budget = static_cast<std::size_t>(budget_tokens) - used;
    std::size_t want = std::min(per_batch, remaining_budget);
    want -= want % static_cast<std::size_t>(seq_len);
    if (want == 0 || used + want + 1 > tokens.size()) break;
    out.push_back(rows_from(tokens.subspan(used, want + 1), static_cast<int>(want / seq_len), seq_len));
    used += want;
  }
  if (out.empty()) throw DataError("validation split too small for one evaluation batch");
  return out;
}

Corpus::Corpus(const CorpusSpec& spec) : source_(spec.source), seed_(spec.seed) {
  if (!(spec.validation_fraction > 0.0 && spec.validation_fraction < 1.0)) {
    throw ConfigError("data.validation_fraction must lie in (0, 1)");
  }
  std::vector<std::int32_t> tokens;
  if (spec.source == StreamSource::synthetic) {
    tokens = synthetic_tokens(spec.synthetic, spec.seed);
    vocab_size_ = spec.synthetic.vocab_size;
  } else {
    auto file = load_corpus_file(spec.path);
    tokens = std::move(file.ids);
    vocab_size_ = file.vocab_size;
  }
  const auto n = tokens.size();
  split_ = n - static_cast<std::size_t>(std::ceil(static_cast<double>(n) * spec.validation_fraction));
  tokens_ = std::make_shared<const std::vector<std::int32_t>>(std::move(tokens));
}

TokenStream Corpus::train_stream() const { return {tokens_, 0, split_, vocab_size_, source_, seed_}; }

TokenStream Corpus::validation_stream() const {
  return {tokens_, split_, tokens_->size(), vocab_size_, source_, seed_};
}

}  // namespace lsgd::data
