// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "lsgd/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "lsgd/core/error.hpp"

namespace lsgd::data {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<double> zipf(int vocab, double exponent) {
  std::vector<double> p(static_cast<std::size_t>(vocab));
  double total = 0;
  for (int i = 0; i < vocab; ++i) total += p[static_cast<std::size_t>(i)] = std::pow(i + 1.0, -exponent);
  for (double& x : p) x /= total;
  return p;
}

}  // namespace

std::string_view to_string(SyntheticKind kind) {
  return kind == SyntheticKind::markov ? "markov" : "repeated_pattern";
}

SyntheticKind synthetic_kind_from_string(std::string_view name) {
  if (name == "markov") return SyntheticKind::markov;
  if (name == "repeated_pattern" || name == "repeated-pattern") return SyntheticKind::repeated_pattern;
  throw ConfigError("data.synthetic.kind: unknown kind '" + std::string(name) + "' (expected markov|repeated_pattern)");
}

void SyntheticSpec::validate() const {
  if (vocab_size < 2) throw ArgumentError("synthetic.vocab_size must be >= 2");
  if (length_tokens <= 0) throw ArgumentError("synthetic.length_tokens must be positive");
  if (kind == SyntheticKind::markov) {
    if (!(entropy > 0.0 && entropy <= std::log(static_cast<double>(vocab_size)) + 1e-12)) {
      throw ArgumentError("synthetic.entropy must lie in (0, ln vocab_size]");
    }
    if (expansion % 2 == 0) throw ArgumentError("synthetic.expansion must be odd");
    if (!(state_bits == 64 || (state_bits >= 1 && state_bits <= kMaxTableStateBits))) {
      throw ArgumentError("synthetic.state_bits must be 64 or lie in [1, " + std::to_string(kMaxTableStateBits) + "]");
    }
    if (!(determinism >= 0.0 && determinism <= 1.0)) throw ArgumentError("synthetic.determinism must lie in [0, 1]");
  } else if (period < 1) {
    throw ArgumentError("synthetic.period must be >= 1");
  }
}

double entropy_nats(const std::vector<double>& p) {
  double h = 0;
  for (double x : p) {
    if (x > 0) h -= x * std::log(x);
  }
  return h;
}

std::vector<double> unigram_with_entropy(int vocab_size, double entropy) {
  const double max_entropy = std::log(static_cast<double>(vocab_size));
  if (!(entropy > 0.0 && entropy <= max_entropy + 1e-12)) {
    throw ArgumentError("requested entropy outside (0, ln vocab_size]");
  }
  if (entropy >= max_entropy) return zipf(vocab_size, 0.0);
  // Entropy decreases monotonically in the exponent.
  double lo = 0.0;
  double hi = 1.0;
  while (entropy_nats(zipf(vocab_size, hi)) > entropy) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (entropy_nats(zipf(vocab_size, mid)) > entropy) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return zipf(vocab_size, 0.5 * (lo + hi));
}

std::vector<std::int32_t> synthetic_tokens(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  const auto length = static_cast<std::size_t>(spec.length_tokens);
  std::vector<std::int32_t> out;
  out.reserve(length);

  if (spec.kind == SyntheticKind::repeated_pattern) {
    std::uniform_int_distribution<std::int32_t> id(0, spec.vocab_size - 1);
    std::vector<std::int32_t> pattern(static_cast<std::size_t>(spec.period));
    for (auto& t : pattern) t = id(rng);
    for (std::size_t i = 0; i < length; ++i) out.push_back(pattern[i % pattern.size()]);
    return out;
  }

  // Unigram probabilities assigned to token ids through a seeded permutation.
  const auto sorted = unigram_with_entropy(spec.vocab_size, spec.entropy);
  std::vector<std::int32_t> ids(static_cast<std::size_t>(spec.vocab_size));
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);
  std::vector<double> unigram(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) unigram[static_cast<std::size_t>(ids[i])] = sorted[i];
  std::vector<double> cdf(unigram.size());
  std::partial_sum(unigram.begin(), unigram.end(), cdf.begin());

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const std::uint64_t shift = splitmix64(seed ^ 0x5deece66dULL);
  auto quantile = [&](std::uint64_t state) {
    const double u = static_cast<double>(state >> 11) * 0x1.0p-53;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u * cdf.back());
    return static_cast<std::int32_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), spec.vocab_size - 1));
  };

  if (spec.state_bits < 64) {
    // Finite state space: a seeded random permutation drives the chain and
    // state k emits the quantile at (k + 1/2) / 2^bits.
    const std::size_t states = std::size_t{1} << spec.state_bits;
    std::vector<std::uint32_t> next(states);
    std::iota(next.begin(), next.end(), 0u);
    std::shuffle(next.begin(), next.end(), rng);
    std::vector<std::int32_t> emit(states);
    for (std::size_t k = 0; k < states; ++k) {
      const double u = (static_cast<double>(k) + 0.5) / static_cast<double>(states);
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), u * cdf.back());
      emit[k] = static_cast<std::int32_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), spec.vocab_size - 1));
    }
    const int drop = 64 - spec.state_bits;
    std::size_t state = static_cast<std::size_t>(rng() >> drop);
    for (std::size_t i = 0; i < length; ++i) {
      if (i > 0 && coin(rng) < spec.determinism) {
        state = next[state];
      } else {
        state = static_cast<std::size_t>(rng() >> drop);
      }
      out.push_back(emit[state]);
    }
    return out;
  }

  std::uint64_t state = rng();
  for (std::size_t i = 0; i < length; ++i) {
    if (i > 0 && coin(rng) < spec.determinism) {
      state = spec.expansion * state + shift;
    } else {
      state = rng();
    }
    out.push_back(quantile(state));
  }
  return out;
}

}  // namespace lsgd::data
