#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "tokext/io.hpp"

namespace tokext {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tokext_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    io::write_file(path("en.txt"), "the cat sat on the mat\nthe dog sat on the log\n");
    io::write_file(path("ko.txt"), "고양이 가 있다\n개 가 있다\n고양이 와 개\n");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(run({"--help"}), cli::kExitOk);
  EXPECT_NE(out_.str().find("train"), std::string::npos);
  EXPECT_EQ(run({}), cli::kExitInput);
  EXPECT_EQ(run({"train", "--corpus", path("en.txt")}), cli::kExitInput);
  EXPECT_EQ(run({"bogus"}), cli::kExitInput);
}

TEST_F(CliTest, MissingFileNamesThePath) {
  EXPECT_EQ(run({"train", "--corpus", path("nope.txt"), "--vocab-size", "300", "--out",
                 path("t.json")}),
            cli::kExitInput);
  EXPECT_NE(err_.str().find("nope.txt"), std::string::npos) << err_.str();
}

TEST_F(CliTest, FullPipeline) {
  ASSERT_EQ(run({"train", "--corpus", path("en.txt"), "--vocab-size", "290", "--out",
                 path("base.json")}),
            0)
      << err_.str();
  EXPECT_TRUE(fs::exists(path("base.json.manifest.json")));
  ASSERT_EQ(run({"train", "--corpus", path("ko.txt"), "--vocab-size", "280", "--out",
                 path("addon.json")}),
            0)
      << err_.str();
  ASSERT_EQ(run({"extend", "--base", path("base.json"), "--addon", path("addon.json"), "--out",
                 path("ext.json")}),
            0)
      << err_.str();
  ASSERT_EQ(run({"stats", "--tokenizer", path("base.json"), "--tokenizer", path("ext.json"),
                 "--label", "base", "--label", "ext", "--sentences", path("ko.txt")}),
            0);
  EXPECT_NE(out_.str().find("ext,true,0.0000"), std::string::npos) << out_.str();

  io::write_file(path("s.jsonl"),
                 "{\"id\":\"k1\",\"prefix\":\"고양이\",\"target\":\" 가\",\"suffix\":\" 있다\"}\n"
                 "{\"id\":\"e1\",\"prefix\":\"the cat\",\"target\":\" sat\",\"suffix\":\"\"}\n");
  ASSERT_EQ(run({"tasks", "--sentences", path("s.jsonl"), "--base", path("base.json"),
                 "--ext", path("ext.json"), "--out", path("tasks.jsonl"), "--separator",
                 "\\t"}),
            0)
      << err_.str();
  EXPECT_NE(io::read_file(path("tasks.jsonl")).find("\\t"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("tasks.jsonl.exclusions.jsonl")));

  const std::vector<std::string> models{"uniform", "ngram:" + path("ko.txt") + ",2,0.1",
                                       "suffix:" + path("ko.txt"), "suffix:"};
  for (const auto& model : models) {
    ASSERT_EQ(run({"eval", "--tasks", path("tasks.jsonl"), "--tokenizer", path("ext.json"),
                   "--model", model, "--out", path("run")}),
              0)
        << model << ": " << err_.str();
  }
  EXPECT_TRUE(fs::exists(path("run.steps.jsonl")));
  EXPECT_TRUE(fs::exists(path("run.aggregates.csv")));
  EXPECT_TRUE(fs::exists(path("run.manifest.json")));

  ASSERT_EQ(run({"report", path("run.aggregates.csv"), "--step", "10", "--label", "c10",
                 "--out", path("series.csv")}),
            0)
      << err_.str();
  EXPECT_EQ(io::read_file(path("series.csv"))
                .rfind("checkpoint_label,training_step,difficulty,unit,metric,value\r\n", 0),
            0u);

  ASSERT_EQ(run({"report", "--step", "20", "--label", "c20", path("run.aggregates.csv"), "--step",
                 "10", "--label", "c10", path("run.aggregates.csv"), "--out",
                 path("series2.csv")}),
            0)
      << err_.str();
  const std::string series = io::read_file(path("series2.csv"));
  EXPECT_LT(series.find("c10,10,"), series.find("c20,20,"));
}

TEST_F(CliTest, ExitCodesFollowErrorKinds) {
  ASSERT_EQ(run({"train", "--corpus", path("en.txt"), "--vocab-size", "290", "--out",
                 path("base.json")}),
            0);
  io::write_file(path("other.json"),
                 R"({"format_version":1,"marker":"_","byte_fallback":false,"specials":[],)"
                 R"("vocab":[{"form":"_","id":0,"kind":"normal"}],"merges":[]})");
  EXPECT_EQ(run({"extend", "--base", path("base.json"), "--addon", path("other.json"), "--out",
                 path("x.json")}),
            cli::kExitIncompatible);

  io::write_file(path("t.jsonl"),
                 R"({"id":"a:hard","difficulty":"hard","unit":"word","input_text":"the","target":" cat"})"
                 "\n");
  io::write_file(path("scores.jsonl"), "");
  EXPECT_EQ(run({"eval", "--tasks", path("t.jsonl"), "--tokenizer", path("base.json"),
                 "--model", "offline:" + path("scores.jsonl"), "--out", path("r")}),
            cli::kExitJoin);
  EXPECT_EQ(run({"eval", "--tasks", path("t.jsonl"), "--tokenizer", path("base.json"),
                 "--model", "ngram:x,2", "--out", path("r")}),
            cli::kExitInput);

  io::write_file(path("agg.csv"),
                 "difficulty,unit,n_items,accuracy,mean_norm_conf,mean_norm_conf_correct,"
                 "mean_norm_conf_incorrect,mean_cross_entropy\r\nhard,word,1,1,,,,0.5\r\n");
  EXPECT_EQ(run({"report", path("agg.csv"), path("agg.csv"), "--step", "1", "--step", "2",
                 "--label", "same", "--label", "same"}),
            cli::kExitDuplicateSeries);
  EXPECT_EQ(run({"report", path("agg.csv"), "--step", "1", "--step", "2"}), cli::kExitInput);
}

}  // namespace
}  // namespace tokext
