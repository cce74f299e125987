// Copyright 2026 The kgt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Text normalization shared by matching, filtering and metrics. Case folding
// is ASCII-only; bytes outside ASCII pass through unchanged.

#ifndef KGT_TEXT_H_
#define KGT_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace kgt {

// Collapses runs of whitespace to one space and trims both ends.
std::string NormalizeSpace(std::string_view text);

// ASCII lower-casing.
std::string FoldCase(std::string_view text);

inline char FoldChar(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

// NormalizeSpace followed by FoldCase.
std::string NormalizeKey(std::string_view text);

// Splits on whitespace, dropping empty tokens.
std::vector<std::string> SplitWhitespace(std::string_view text);

// Number of whitespace-separated tokens.
std::size_t WordCount(std::string_view text);

// True when the character at byte offset `pos` belongs to a word. ASCII
// letters and digits are word characters; a UTF-8 sequence is a word
// character unless it decodes to punctuation, a symbol or a space (dashes,
// quotes, the Latin-1 punctuation block and similar).
bool IsWordCharAt(std::string_view text, std::size_t pos);

// True when the character ending just before byte offset `pos` is a word
// character. Walks back over UTF-8 continuation bytes.
bool IsWordCharBefore(std::string_view text, std::size_t pos);

bool StartsWith(std::string_view text, std::string_view prefix);

}  // namespace kgt

#endif  // KGT_TEXT_H_
