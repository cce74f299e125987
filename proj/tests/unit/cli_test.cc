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

#include "cli.h"

#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include <gtest/gtest.h>

#include "json.hpp"
#include "kgt/dataset_io.h"
#include "kgt/gembed.h"
#include "toy_data.h"

namespace kgt::cli {
namespace {

using Json = nlohmann::json;

const std::string kStub = KGT_STUB_MODEL;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome RunCli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = Run(args, out, err);
  return {code, out.str(), err.str()};
}

Json ReadJson(const std::string& path) {
  return Json::parse(testing::ReadFile(path));
}

class CliTest : public ::testing::Test {
 protected:
  std::string kg_ = testing::Fixture("obama_kg.jsonl").string();
  std::string corpus_ = testing::Fixture("obama_corpus.jsonl").string();
  std::string annotated_ = testing::Fixture("annotated.jsonl").string();
  testing::TempDir dir_;

  std::string Path(const std::string& name) const { return dir_.File(name); }

  std::string AlignFixture(bool require_subject = true) {
    const std::string out = Path("aligned.jsonl");
    const Outcome r = RunCli({"align", "--kg", kg_, "--corpus", corpus_,
                              "--require-subject",
                              require_subject ? "true" : "false", "-o", out});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    return out;
  }

  std::string ToyDataset(std::size_t n, std::uint64_t seed) {
    const std::string path = Path("toy" + std::to_string(seed) + ".jsonl");
    SaveDataset(testing::ToyPairs(n, seed), path);
    return path;
  }
};

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(RunCli({}).code, kExitUsage);
  EXPECT_EQ(RunCli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(RunCli({"align", "--kg", kg_}).code, kExitUsage);
  EXPECT_EQ(RunCli({"--help"}).code, kExitOk);
  EXPECT_EQ(RunCli({"--version"}).code, kExitOk);
  const Outcome missing = RunCli({"align", "--kg", Path("nope.jsonl"),
                                  "--corpus", corpus_, "-o", Path("x")});
  EXPECT_EQ(missing.code, kExitUsage);
  EXPECT_NE(missing.err.find("nope.jsonl"), std::string::npos);
  const Outcome no_corpus = RunCli({"align", "--kg", kg_, "-o", Path("x")});
  EXPECT_EQ(no_corpus.code, kExitUsage);
  EXPECT_NE(no_corpus.err.find("--corpus"), std::string::npos);
}

TEST_F(CliTest, SchemaErrorsExitThree) {
  testing::WriteFile(Path("bad.jsonl"), "{\"schema_version\":\"9\"}\n");
  const Outcome r = RunCli({"noise", "-i", Path("bad.jsonl"), "-o", Path("o")});
  EXPECT_EQ(r.code, kExitSchema);
  EXPECT_NE(r.err.find("bad.jsonl:1"), std::string::npos) << r.err;
  testing::WriteFile(Path("kg.jsonl"),
                     R"({"qid":"Q1","title":"<S>","aliases":[],"claims":[]})");
  EXPECT_EQ(RunCli({"ingest", "--kg", Path("kg.jsonl"), "-o", Path("t")}).code,
            kExitSchema);
}

TEST_F(CliTest, AlignWritesDatasetAndManifest) {
  const std::string out = AlignFixture();
  const Dataset dataset = LoadDataset(out);
  ASSERT_EQ(dataset.size(), 3u);
  EXPECT_EQ(CountTriples(dataset), 9u);
  const Json manifest = ReadJson(out + ".manifest.json");
  EXPECT_EQ(manifest["command"], "align");
  ASSERT_EQ(manifest["inputs"].size(), 2u);
  EXPECT_EQ(manifest["inputs"][0]["path"], kg_);
  EXPECT_EQ(manifest["inputs"][0]["fnv1a64"],
            Fnv1aHex(testing::ReadFile(kg_)));
  EXPECT_EQ(manifest["outputs"][0]["fnv1a64"],
            Fnv1aHex(testing::ReadFile(out)));
  EXPECT_EQ(manifest["counts"]["examples"], 3);
  EXPECT_EQ(manifest["counts"]["unknown_page"], 1);
  EXPECT_EQ(manifest["config"]["align.require_subject"], true);
  EXPECT_EQ(manifest["config_hash"].get<std::string>().size(), 16u);

  AlignFixture(false);
  EXPECT_EQ(LoadDataset(out).size(), 5u);
}

TEST_F(CliTest, Fnv1aKnownValues) {
  EXPECT_EQ(Fnv1aHex(""), "cbf29ce484222325");
  EXPECT_EQ(Fnv1aHex("a"), "af63dc4c8601ec8c");
}

TEST_F(CliTest, NoiseAtZeroIsByteIdentical) {
  const std::string in = ToyDataset(50, 1);
  const std::string out = Path("noisy.jsonl");
  const Outcome r = RunCli({"noise", "-i", in, "-o", out, "--p", "0",
                            "--seed", "7"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(Fnv1aHex(testing::ReadFile(in)), Fnv1aHex(testing::ReadFile(out)));
  EXPECT_EQ(ReadJson(out + ".manifest.json")["seed"], 7);

  EXPECT_EQ(RunCli({"noise", "-i", in, "-o", out, "--p", "0.5", "--ops",
                    "delete,shuffle"})
                .code,
            kExitUsage);
  EXPECT_EQ(RunCli({"noise", "-i", in, "-o", out, "--p", "2"}).code,
            kExitUsage);
}

TEST_F(CliTest, ConfigFileAndFlagPrecedence) {
  const std::string in = ToyDataset(30, 2);
  testing::WriteFile(Path("cfg.json"),
                     R"({"noise.p": 0.5, "noise.seed": 3, "noise.ops": "delete"})");
  const Outcome from_config =
      RunCli({"--config", Path("cfg.json"), "noise", "-i", in, "-o", Path("a")});
  ASSERT_EQ(from_config.code, kExitOk) << from_config.err;
  const Json m = ReadJson(Path("a") + ".manifest.json");
  EXPECT_EQ(m["counts"]["inserted"], 0);
  EXPECT_GT(m["counts"]["deleted"].get<int>(), 0);
  EXPECT_EQ(m["seed"], 3);

  const Outcome flag = RunCli({"--config", Path("cfg.json"), "noise", "-i", in,
                               "-o", Path("b"), "--p", "0"});
  ASSERT_EQ(flag.code, kExitOk);
  EXPECT_EQ(testing::ReadFile(Path("b")), testing::ReadFile(in));

  testing::WriteFile(Path("broken.json"), "{not json");
  EXPECT_EQ(RunCli({"--config", Path("broken.json"), "noise", "-i", in, "-o",
                    Path("c")})
                .code,
            kExitUsage);
}

TEST_F(CliTest, ScorerSpecPrecedence) {
  const std::string in = AlignFixture();
  testing::WriteFile(Path("cfg.json"), R"({"endpoints.scorer": "const:0.9"})");
  auto kept = [&](std::vector<std::string> extra) {
    std::vector<std::string> args = {"--config", Path("cfg.json"),
                                     "filter-entail", "-i", in, "-o",
                                     Path("f.jsonl")};
    args.insert(args.end(), extra.begin(), extra.end());
    const Outcome r = RunCli(args);
    EXPECT_EQ(r.code, kExitOk) << r.err;
    return CountTriples(LoadDataset(Path("f.jsonl")));
  };
  ::unsetenv("KGT_SCORER_URL");
  EXPECT_EQ(kept({}), 9u);
  ::setenv("KGT_SCORER_URL", "const:0.1", 1);
  EXPECT_EQ(kept({}), 0u);
  EXPECT_EQ(kept({"--scorer", "const:0.95"}), 9u);
  ::unsetenv("KGT_SCORER_URL");
}

TEST_F(CliTest, EndpointFailureExitsFour) {
  const std::string in = AlignFixture();
  const Outcome r = RunCli({"filter-entail", "-i", in, "-o", Path("f"),
                            "--scorer", "cmd:" + kStub + " fail"});
  EXPECT_EQ(r.code, kExitEndpoint);
  EXPECT_NE(r.err.find("endpoint error"), std::string::npos);
  EXPECT_EQ(RunCli({"filter-entail", "-i", in, "-o", Path("f"), "--scorer",
                    "ftp://nowhere"})
                .code,
            kExitUsage);
}

TEST_F(CliTest, PipelineThroughFileModeEndpoints) {
  const std::string aligned = AlignFixture();
  const std::string scorer = "cmd:" + kStub + " score lexical {in} {out}";
  Outcome r = RunCli({"filter-entail", "-i", aligned, "-o", Path("v1.jsonl"),
                      "--scorer", scorer, "--tau", "0.6", "--batch-size", "2"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Dataset v1 = LoadDataset(Path("v1.jsonl"));
  EXPECT_LE(CountTriples(v1), 9u);
  for (const auto& ex : v1) {
    for (const auto& m : ex.matches) EXPECT_GE(*m.entail_score, 0.6);
  }

  r = RunCli({"filter-length", "-i", Path("v1.jsonl"), "-o", Path("v2.jsonl"),
              "--single-percentile", "100", "--multi-percentile", "100"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(LoadDataset(Path("v2.jsonl")), v1);

  r = RunCli({"augment", "-i", Path("v2.jsonl"), "-o", Path("v3.jsonl"),
              "--t2g", "echo:" + aligned});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(CountTriples(LoadDataset(Path("v3.jsonl"))),
            CountTriples(v1) + ReadJson(Path("v3.jsonl") + ".manifest.json")
                                   ["counts"]["added"]
                                       .get<std::size_t>());

  r = RunCli({"cycle-eval", "-i", aligned, "-o", Path("cycle.jsonl"),
              "--g2t", "echo:" + aligned, "--t2g", "echo:" + aligned,
              "--name", "fixture", "--table", Path("cycle.txt"),
              "--per-example", Path("per.jsonl")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("dataset fixture"), std::string::npos);
  EXPECT_NE(r.out.find("100.00"), std::string::npos);
  const Json cm = ReadJson(Path("cycle.jsonl") + ".manifest.json");
  EXPECT_DOUBLE_EQ(cm["counts"]["gtg"]["f1"].get<double>(), 1.0);

  r = RunCli({"report", "-i", Path("per.jsonl"), "-o", Path("report.jsonl")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  // Corpus BLEU is not recoverable from per-example rows; the rest is.
  std::istringstream report(testing::ReadFile(Path("report.jsonl")));
  std::istringstream cycle(testing::ReadFile(Path("cycle.jsonl")));
  std::string report_line, cycle_line;
  int rows = 0;
  while (std::getline(cycle, cycle_line)) {
    ASSERT_TRUE(std::getline(report, report_line));
    Json expected = Json::parse(cycle_line);
    expected.erase("bleu1");
    expected.erase("bleu4");
    EXPECT_EQ(Json::parse(report_line), expected);
    ++rows;
  }
  EXPECT_EQ(rows, 4);

  r = RunCli({"cycle-eval", "-i", aligned, "-o", Path("gen.jsonl"), "--g2t",
              "cmd:" + kStub + " generate strip {in} {out}", "--t2g",
              "cmd:" + kStub + " generate strip {in} {out}"});
  ASSERT_EQ(r.code, kExitOk) << r.err;

  r = RunCli({"uni-eval", "-i", aligned, "-o", Path("uni.json"), "--g2t",
              "mock:" + aligned, "--t2g", "mock:" + aligned});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_DOUBLE_EQ(ReadJson(Path("uni.json"))["t2g"]["f1"].get<double>(), 1.0);
}

TEST_F(CliTest, EmbedThenSelftrain) {
  Outcome r = RunCli({"embed", "--kg", kg_, "-o", Path("emb.jsonl"), "--dim",
                      "8", "--epochs", "5", "--seed", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const EmbeddingTable table = LoadEmbeddings(Path("emb.jsonl"));
  EXPECT_EQ(table.dim(), 8);
  EXPECT_EQ(table.config.seed, 1u);

  const std::string pool = ToyDataset(100, 3);
  r = RunCli({"selftrain", "-i", pool, "-o", Path("st.json"), "--annotated",
              annotated_, "--scorer",
              "cmd:" + kStub + " score lexical {in} {out}", "--trainer",
              "cmd:" + kStub + " finetune {data} {batch} {out}",
              "--embeddings", Path("emb.jsonl"), "--sample-size", "40",
              "--theta-pos", "0.7", "--theta-neg", "0.3", "--max-iterations",
              "2", "--patience", "3", "--trainer-batch-size", "8",
              "--workdir", Path("work")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Json report = ReadJson(Path("st.json"));
  ASSERT_EQ(report["iterations"].size(), 2u);
  EXPECT_EQ(report["stop_reason"], "reached max_iterations");
  const std::string version = report["best_version"];
  EXPECT_EQ(version.rfind("ft-", 0), 0u);
  EXPECT_NE(version.find("-b8"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(Path("work/finetune-1.jsonl")));

  r = RunCli({"selftrain", "-i", pool, "-o", Path("st2.json"), "--annotated",
              annotated_, "--scorer", "const:0.95", "--trainer",
              "cmd:" + kStub + " fail", "--sample-size", "10"});
  EXPECT_EQ(r.code, kExitEndpoint);
  EXPECT_EQ(ReadJson(Path("st2.json"))["stop_reason"], "trainer failure");
}

TEST_F(CliTest, BinaryExitCodes) {
  const std::string binary = KGT_CLI_BINARY;
  auto status = [](const std::string& command) {
    const int raw = std::system((command + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status(binary + " --help"), kExitOk);
  EXPECT_EQ(status(binary), kExitUsage);
  EXPECT_EQ(status(binary + " ingest --kg " + kg_ + " -o " + Path("t.jsonl")),
            kExitOk);
  EXPECT_EQ(status(binary + " noise -i " + kg_ + " -o " + Path("n.jsonl")),
            kExitSchema);
}

}  // namespace
}  // namespace kgt::cli
