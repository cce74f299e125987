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

#include "kgt/text.h"

#include <gtest/gtest.h>

namespace kgt {
namespace {

TEST(NormalizeSpaceTest, CollapsesAndTrims) {
  EXPECT_EQ(NormalizeSpace("  a \t b\n\nc  "), "a b c");
  EXPECT_EQ(NormalizeSpace(""), "");
  EXPECT_EQ(NormalizeSpace(" \t "), "");
}

TEST(FoldCaseTest, AsciiOnly) {
  EXPECT_EQ(FoldCase("Barack OBAMA"), "barack obama");
  EXPECT_EQ(FoldCase("Württemberg"), "württemberg");
}

TEST(NormalizeKeyTest, FoldsAndCollapses) {
  EXPECT_EQ(NormalizeKey("  New   York "), "new york");
}

TEST(SplitWhitespaceTest, Tokens) {
  EXPECT_EQ(SplitWhitespace(" a  b\tc "),
            (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_TRUE(SplitWhitespace("   ").empty());
  EXPECT_EQ(WordCount("one two  three"), 3u);
}

TEST(WordCharTest, Boundaries) {
  EXPECT_TRUE(IsWordCharAt("ab", 0));
  EXPECT_FALSE(IsWordCharAt("a b", 1));
  EXPECT_FALSE(IsWordCharAt("ab", 2));
  EXPECT_FALSE(IsWordCharBefore("ab", 0));
  EXPECT_TRUE(IsWordCharBefore("ab", 1));
  // Non-ASCII letters are word characters; dashes and quotes are not.
  EXPECT_TRUE(IsWordCharAt("ü", 0));
  EXPECT_FALSE(IsWordCharAt("\xE2\x80\x93", 0));  // en dash
  EXPECT_FALSE(IsWordCharBefore("1942\xE2\x80\x93", 7));
  EXPECT_TRUE(IsWordCharBefore("xü", 3));
}

TEST(StartsWithTest, Basic) {
  EXPECT_TRUE(StartsWith("graph_to_text: x", "graph_to_text: "));
  EXPECT_FALSE(StartsWith("x", "xy"));
}

}  // namespace
}  // namespace kgt
