// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0
//
// Binary token file, all integers little-endian:
//
//   offset  size  field
//   0       8     magic "LSGDTOK1"
//   8       4     id width in bytes: 1, 2 or 4
//   12      4     vocab_size
//   16      8     token count
//   24      ...   ids, `width` bytes each

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace lsgd::data {

struct TokenFile {
  int vocab_size = 0;
  std::vector<std::int32_t> ids;
};

// width 0 selects the narrowest width that can hold vocab_size - 1.
void write_token_file(const std::filesystem::path& path, std::span<const std::int32_t> ids, int vocab_size,
                      int width = 0);

// Throws DataError on malformed headers, truncated payloads or ids >= vocab_size.
TokenFile read_token_file(const std::filesystem::path& path);

bool is_token_file(const std::filesystem::path& path);

// Token file if the magic matches, otherwise raw bytes through the byte tokenizer.
TokenFile load_corpus_file(const std::filesystem::path& path);

}  // namespace lsgd::data
