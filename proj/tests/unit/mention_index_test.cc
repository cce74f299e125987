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

#include "kgt/mention_index.h"

#include <gtest/gtest.h>

#include <stdexcept>

#include "kgt/random.h"
#include "kgt/text.h"
#include "oracles.h"

namespace kgt {
namespace {

std::vector<std::string> Surfaces(const MentionIndex& index,
                                  const std::vector<MatchSpan>& spans) {
  std::vector<std::string> out;
  for (const auto& s : spans) out.push_back(index.surface(s.pattern));
  return out;
}

TEST(MentionIndexTest, CaseInsensitiveWordBoundaries) {
  MentionIndex index;
  index.Add("Politician", 7);
  index.Add("US", 8);
  index.Finalize();
  const std::string text =
      "Barack Obama is an American POLITICIAN who did not USE the US flag.";
  const auto spans = index.FindMentions(text);
  ASSERT_EQ(spans.size(), 2u);
  EXPECT_EQ(text.substr(spans[0].start, spans[0].end - spans[0].start),
            "POLITICIAN");
  EXPECT_EQ(index.targets(spans[0].pattern)[0], 7u);
  EXPECT_EQ(text.substr(spans[1].start, 2), "US");
}

TEST(MentionIndexTest, AbsentPatternGivesNoSpan) {
  MentionIndex index;
  index.Add("politician", 1);
  index.Finalize();
  EXPECT_TRUE(index.FindMentions("the 44th president").empty());
  EXPECT_TRUE(index.FindMentions("").empty());
  EXPECT_TRUE(index.FindMentions("politicians").empty());
}

TEST(MentionIndexTest, LongestMatchWins) {
  MentionIndex index;
  index.Add("New York", 1);
  index.Add("New York City", 2);
  index.Add("York", 3);
  index.Finalize();
  const auto spans = index.FindMentions("born in New York City in 1950");
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(index.surface(spans[0].pattern), "new york city");
}

TEST(MentionIndexTest, SharedSurfaceTargetsAll) {
  MentionIndex index;
  index.Add("Paris", 1);
  index.Add("paris", 2);
  index.Add("Paris", 1);
  index.Add("   ", 9);
  index.Finalize();
  EXPECT_EQ(index.pattern_count(), 1u);
  const auto spans = index.FindMentions("Paris");
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(index.targets(spans[0].pattern).size(), 2u);
}

TEST(MentionIndexTest, PunctuationAndUnicodeBoundaries) {
  MentionIndex index;
  index.Add("1942", 1);
  index.Add("1995", 2);
  index.Add("Württemberg", 3);
  index.Finalize();
  const auto spans = index.FindMentions(
      "Ann Dunham (1942\xE2\x80\x93" "1995) of Württemberg, and Württembergs");
  EXPECT_EQ(Surfaces(index, spans),
            (std::vector<std::string>{"1942", "1995", "württemberg"}));
}

TEST(MentionIndexTest, LifecycleErrors) {
  MentionIndex index;
  EXPECT_THROW(index.FindMentions("x"), std::logic_error);
  index.Finalize();
  EXPECT_THROW(index.Add("x", 1), std::logic_error);
}

TEST(MentionIndexTest, MatchesNaiveScanOnRandomInputs) {
  Rng rng(42);
  const std::vector<std::string> words = {"a", "ab", "b", "ba", "abc", "c"};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> patterns;
    MentionIndex index;
    const int n = 1 + static_cast<int>(rng.Uniform(6));
    for (int i = 0; i < n; ++i) {
      std::string p = words[rng.Uniform(words.size())];
      if (rng.Bernoulli(0.4)) p += " " + words[rng.Uniform(words.size())];
      patterns.push_back(p);
      index.Add(p, static_cast<std::uint32_t>(i));
    }
    index.Finalize();
    std::string text;
    const int len = static_cast<int>(rng.Uniform(12));
    for (int i = 0; i < len; ++i) {
      if (i > 0) text += rng.Bernoulli(0.2) ? "," : " ";
      text += words[rng.Uniform(words.size())];
    }
    const auto got = index.FindMentions(text);
    const auto want = testing::NaiveMentions(text, patterns);
    ASSERT_EQ(got.size(), want.size()) << text;
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].start, want[i].start) << text;
      EXPECT_EQ(got[i].end, want[i].end) << text;
      EXPECT_EQ(index.surface(got[i].pattern),
                testing::Canon(patterns[want[i].surface]));
    }
    for (std::size_t i = 1; i < got.size(); ++i) {
      EXPECT_LE(got[i - 1].end, got[i].start);
    }
  }
}

}  // namespace
}  // namespace kgt
