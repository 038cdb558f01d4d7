// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace lsgd::data {

inline constexpr int kMaxTableStateBits = 24;

enum class SyntheticKind { markov, repeated_pattern };

std::string_view to_string(SyntheticKind kind);
SyntheticKind synthetic_kind_from_string(std::string_view name);

// markov: a hidden 64-bit state u_t drives the chain and the emitted token is
// the unigram quantile of u_t. With probability `determinism` the state
// advances as u_t = expansion * u_{t-1} + shift (mod 2^64), otherwise it is
// redrawn uniformly. An odd expansion is a bijection of the state space, so
// u_t stays uniform and every token keeps the unigram marginal whose entropy
// is `entropy` nats. Longer histories pin down u_{t-1} more tightly, which is
// what gives larger models something to learn.
//
// With state_bits < 64 the state lives in [0, 2^state_bits) and advances
// through a seeded random permutation instead; emitted tokens use the
// quantile at (u + 1/2) / 2^state_bits, so each token's marginal is exact up
// to 2^-state_bits. A model learns this chain by memorising the permutation,
// so loss keeps improving with capacity.
//
// repeated_pattern: a random pattern of `period` tokens repeated end to end.
struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::markov;
  int vocab_size = 64;
  std::int64_t length_tokens = 1 << 20;
  double entropy = 3.0;
  std::uint64_t expansion = 3;
  int state_bits = 64;
  double determinism = 0.5;
  int period = 16;

  // Throws ArgumentError.
  void validate() const;
  bool operator==(const SyntheticSpec&) const = default;
};

std::vector<std::int32_t> synthetic_tokens(const SyntheticSpec& spec, std::uint64_t seed);

// Zipf-shaped distribution over vocab_size tokens with the requested entropy
// (nats), found by bisection on the exponent. Sorted by decreasing probability.
std::vector<double> unigram_with_entropy(int vocab_size, double entropy);

double entropy_nats(const std::vector<double>& probabilities);

}  // namespace lsgd::data
