// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "lsgd/data/token_file.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <iterator>

#include "lsgd/core/error.hpp"
#include "lsgd/data/tokenizer.hpp"

namespace lsgd::data {

namespace {

constexpr std::array<char, 8> kMagic = {'L', 'S', 'G', 'D', 'T', 'O', 'K', '1'};
constexpr std::size_t kHeaderBytes = 24;

void put_le(std::vector<unsigned char>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_le(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

void write_token_file(const std::filesystem::path& path, std::span<const std::int32_t> ids, int vocab_size,
                      int width) {
  if (vocab_size < 1) throw DataError("token file vocab_size must be positive");
  if (width == 0) width = vocab_size <= 256 ? 1 : (vocab_size <= 65536 ? 2 : 4);
  if (width != 1 && width != 2 && width != 4) throw DataError("token width must be 1, 2 or 4");
  std::vector<unsigned char> buf(kMagic.begin(), kMagic.end());
  put_le(buf, static_cast<std::uint64_t>(width), 4);
  put_le(buf, static_cast<std::uint64_t>(vocab_size), 4);
  put_le(buf, ids.size(), 8);
  const std::uint64_t limit = width == 4 ? 0xffffffffULL : (1ULL << (8 * width)) - 1;
  for (std::int32_t id : ids) {
    if (id < 0 || id >= vocab_size || static_cast<std::uint64_t>(id) > limit) {
      throw DataError("token id " + std::to_string(id) + " does not fit the file vocabulary/width");
    }
    put_le(buf, static_cast<std::uint64_t>(id), width);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

bool is_token_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::array<char, 8> head{};
  in.read(head.data(), head.size());
  return in.gcount() == static_cast<std::streamsize>(head.size()) && head == kMagic;
}

TokenFile read_token_file(const std::filesystem::path& path) {
  const auto buf = slurp(path);
  if (buf.size() < kHeaderBytes || std::memcmp(buf.data(), kMagic.data(), kMagic.size()) != 0) {
    throw DataError(path.string() + ": not a token file (bad magic)");
  }
  const auto width = static_cast<int>(get_le(buf.data() + 8, 4));
  const auto vocab = get_le(buf.data() + 12, 4);
  const auto count = get_le(buf.data() + 16, 8);
  if (width != 1 && width != 2 && width != 4) throw DataError(path.string() + ": unsupported id width");
  if (vocab < 1 || vocab > 0x7fffffffULL) throw DataError(path.string() + ": invalid vocab_size");
  if (buf.size() != kHeaderBytes + count * static_cast<std::uint64_t>(width)) {
    throw DataError(path.string() + ": payload length does not match header count");
  }
  TokenFile out;
  out.vocab_size = static_cast<int>(vocab);
  out.ids.reserve(count);
  const unsigned char* p = buf.data() + kHeaderBytes;
  for (std::uint64_t i = 0; i < count; ++i, p += width) {
    const auto id = get_le(p, width);
    if (id >= vocab) throw DataError(path.string() + ": id out of range at index " + std::to_string(i));
    out.ids.push_back(static_cast<std::int32_t>(id));
  }
  return out;
}

TokenFile load_corpus_file(const std::filesystem::path& path) {
  if (is_token_file(path)) return read_token_file(path);
  const auto bytes = slurp(path);
  return {kByteVocabSize, tokenize_bytes(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()))};
}

}  // namespace lsgd::data
