// End-to-end tests of the tca binary. The binary path arrives via
// --bin <path> (wired up by ctest).
#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "tca/textio.hpp"

namespace fs = std::filesystem;

namespace {

std::string g_bin;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() / "tca_cli_tests";
  fs::create_directories(dir);
  const fs::path out_file = dir / ("stdout_" + std::to_string(counter) + ".txt");
  const fs::path err_file = dir / ("stderr_" + std::to_string(counter) + ".txt");
  ++counter;

  const std::string cmd =
      g_bin + " " + args + " >" + out_file.string() + " 2>" + err_file.string();
  const int status = std::system(cmd.c_str());

  RunResult res;
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  res.out = tca::read_text_file(out_file.string());
  res.err = tca::read_text_file(err_file.string());
  return res;
}

fs::path fresh_dir(const std::string& leaf) {
  const fs::path dir = fs::temp_directory_path() / "tca_cli_tests" / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(CliTest, HelpListsEveryKeyPerCommand) {
  for (const std::string cmd : {"gen", "train", "eval", "attn", "gradcheck"}) {
    RunResult res = run_cli(cmd + " --help");
    EXPECT_EQ(res.exit_code, 0) << cmd;
    EXPECT_NE(res.out.find("usage: tca " + cmd), std::string::npos);
  }
  EXPECT_NE(run_cli("train --help").out.find("--sparsity_lambda"), std::string::npos);
  EXPECT_NE(run_cli("gen --help").out.find("--target_class"), std::string::npos);
  EXPECT_NE(run_cli("eval --help").out.find("--horizons"), std::string::npos);
}

TEST(CliTest, UnknownCommandExitsUsage) {
  RunResult res = run_cli("frobnicate");
  EXPECT_EQ(res.exit_code, 2);
  EXPECT_NE(res.err.find("\"error\":\"usage\""), std::string::npos);
}

TEST(CliTest, MissingConfigFileExitsConfigWithPath) {
  RunResult res = run_cli("train --config /nonexistent/path.cfg");
  EXPECT_EQ(res.exit_code, 3);
  EXPECT_NE(res.err.find("\"error\":\"config\""), std::string::npos);
  EXPECT_NE(res.err.find("/nonexistent/path.cfg"), std::string::npos);
}

TEST(CliTest, UnknownKeyRejected) {
  RunResult res = run_cli("gen --task keyframe --bogus 1");
  EXPECT_EQ(res.exit_code, 3);
  EXPECT_NE(res.err.find("bogus"), std::string::npos);
}

TEST(CliTest, MissingDatasetExitsData) {
  const fs::path out = fresh_dir("missing_data");
  RunResult res = run_cli("train --data /nonexistent/manifest.json --out " + out.string());
  EXPECT_EQ(res.exit_code, 4);
  EXPECT_NE(res.err.find("\"error\":\"data\""), std::string::npos);
}

TEST(CliTest, GradcheckPasses) {
  RunResult res = run_cli("gradcheck --seed 1");
  EXPECT_EQ(res.exit_code, 0) << res.out << res.err;
  EXPECT_NE(res.out.find("gradcheck: PASS"), std::string::npos);
  EXPECT_NE(res.out.find("tcl"), std::string::npos);
}

TEST(CliTest, EndToEndKeyframeWorkflow) {
  // gen -> train -> eval -> attn on a small keyframe task.
  const fs::path data_dir = fresh_dir("e2e_data");
  const fs::path run_dir = fresh_dir("e2e_run");
  const fs::path eval_dir = fresh_dir("e2e_eval");

  RunResult gen =
      run_cli("gen --task keyframe --seed 0 --count 60 --f 16 --out " + data_dir.string());
  ASSERT_EQ(gen.exit_code, 0) << gen.err;
  ASSERT_TRUE(fs::exists(data_dir / "manifest.json"));

  // Config file with one override on the command line.
  const fs::path cfg_path = data_dir / "train.cfg";
  tca::write_text_file(cfg_path.string(),
                       "data = " + (data_dir / "manifest.json").string() +
                           "\nout = " + run_dir.string() +
                           "\ng = 8\nmax_epochs = 8\nsparsity_lambda = 0.01\n");
  RunResult train = run_cli("train --config " + cfg_path.string() + " --max_epochs 6");
  ASSERT_EQ(train.exit_code, 0) << train.err;
  EXPECT_TRUE(fs::exists(run_dir / "checkpoint.json"));
  EXPECT_TRUE(fs::exists(run_dir / "history.csv"));
  EXPECT_TRUE(fs::exists(run_dir / "resolved.cfg"));

  // The resolved config records the command-line override.
  const std::string resolved = tca::read_text_file((run_dir / "resolved.cfg").string());
  EXPECT_NE(resolved.find("max_epochs = 6"), std::string::npos);
  EXPECT_NE(resolved.find("g = 8"), std::string::npos);

  RunResult eval = run_cli("eval --data " + (data_dir / "manifest.json").string() +
                           " --checkpoint " + (run_dir / "checkpoint.json").string() + " --out " +
                           eval_dir.string());
  ASSERT_EQ(eval.exit_code, 0) << eval.err;
  const auto report =
      nlohmann::json::parse(tca::read_text_file((eval_dir / "report.json").string()));
  EXPECT_TRUE(report.contains("detection_accuracy"));
  EXPECT_TRUE(report.contains("median_entropy"));
  EXPECT_TRUE(report.contains("mse"));

  RunResult attn = run_cli("attn --data " + (data_dir / "manifest.json").string() +
                           " --checkpoint " + (run_dir / "checkpoint.json").string() + " --out " +
                           eval_dir.string());
  ASSERT_EQ(attn.exit_code, 0) << attn.err;
  EXPECT_TRUE(fs::exists(eval_dir / "attn" / "seq_0.csv"));
  EXPECT_TRUE(fs::exists(eval_dir / "attn" / "seq_0.pgm"));
  EXPECT_TRUE(fs::exists(eval_dir / "attn" / "summary.json"));

  // Attention CSV has one row (m=1) of n=10 values summing to ~1.
  tca::Matrix a = tca::read_matrix_csv((eval_dir / "attn" / "seq_0.csv").string());
  EXPECT_EQ(a.rows(), 1);
  EXPECT_EQ(a.cols(), 10);
}

TEST(CliTest, TrainOutputsAreByteReproducible) {
  const fs::path data_dir = fresh_dir("repro_data");
  RunResult gen =
      run_cli("gen --task keyframe --seed 3 --count 30 --f 12 --out " + data_dir.string());
  ASSERT_EQ(gen.exit_code, 0) << gen.err;

  auto train_into = [&](const std::string& leaf) {
    const fs::path dir = fresh_dir(leaf);
    RunResult res = run_cli("train --data " + (data_dir / "manifest.json").string() + " --out " +
                            dir.string() + " --g 6 --max_epochs 4 --seed 5");
    EXPECT_EQ(res.exit_code, 0) << res.err;
    return dir;
  };
  const fs::path a = train_into("repro_a");
  const fs::path b = train_into("repro_b");
  EXPECT_EQ(tca::read_text_file((a / "checkpoint.json").string()),
            tca::read_text_file((b / "checkpoint.json").string()));
  EXPECT_EQ(tca::read_text_file((a / "history.csv").string()),
            tca::read_text_file((b / "history.csv").string()));
}

TEST(CliTest, ClassifierWorkflowWritesConfusion) {
  const fs::path data_dir = fresh_dir("cls_data");
  const fs::path run_dir = fresh_dir("cls_run");
  const fs::path eval_dir = fresh_dir("cls_eval");

  RunResult gen = run_cli(
      "gen --task actions --seed 0 --count 54 --n 24 --f 6 --motif_len 6 --out " +
      data_dir.string());
  ASSERT_EQ(gen.exit_code, 0) << gen.err;

  RunResult train = run_cli("train --data " + (data_dir / "manifest.json").string() + " --out " +
                            run_dir.string() +
                            " --g 8 --max_epochs 6 --batch_size 9 --mask true");
  ASSERT_EQ(train.exit_code, 0) << train.err;

  RunResult eval = run_cli("eval --data " + (data_dir / "manifest.json").string() +
                           " --checkpoint " + (run_dir / "checkpoint.json").string() + " --out " +
                           eval_dir.string());
  ASSERT_EQ(eval.exit_code, 0) << eval.err;
  EXPECT_TRUE(fs::exists(eval_dir / "confusion.csv"));
  const auto report =
      nlohmann::json::parse(tca::read_text_file((eval_dir / "report.json").string()));
  ASSERT_TRUE(report.contains("confusion"));
  EXPECT_EQ(report["confusion"].size(), 9u);
  EXPECT_TRUE(report.contains("accuracy"));
  EXPECT_TRUE(report.contains("attention_in_window_rate"));
}

int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--bin") g_bin = argv[i + 1];
  }
  if (g_bin.empty()) {
    std::fprintf(stderr, "usage: tca_cli_tests --bin <path-to-tca>\n");
    return 1;
  }
  return RUN_ALL_TESTS();
}
