#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;

int run(const std::string& args) {
  const std::string cmd = std::string(DEEPMPR_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

TEST(Cli, ValidateAcceptsGoodConfig) {
  const auto p = write_config("deepmpr_cli_ok.cfg", "nodes.count = 10\narena.side = 400\n");
  EXPECT_EQ(run("validate " + p.string()), 0);
}

TEST(Cli, ValidateRejectsBadConfig) {
  const auto p = write_config("deepmpr_cli_bad.cfg", "nodes.count = 0\n");
  EXPECT_EQ(run("validate " + p.string()), 1);
  EXPECT_EQ(run("validate " + p.string() + " --set nodes.count=4"), 0);
  EXPECT_EQ(run("validate /nonexistent/deepmpr.cfg"), 1);
}

TEST(Cli, UnknownSubcommandIsUsageError) { EXPECT_EQ(run("frobnicate"), 1); }

TEST(Cli, RunWritesEpisodeFiles) {
  const auto p = write_config("deepmpr_cli_run.cfg", "nodes.count = 6\narena.side = 300\nepisode.length = 5\n");
  const fs::path out = fs::temp_directory_path() / "deepmpr_cli_run_out";
  fs::remove_all(out);
  EXPECT_EQ(run("run " + p.string() + " -o " + out.string() + " --seed 3 --episodes 2"), 0);
  EXPECT_TRUE(fs::exists(out / "config.txt"));
  EXPECT_TRUE(fs::exists(out / "summary.csv"));
  EXPECT_TRUE(fs::exists(out / "episode_seed3.csv"));
  EXPECT_TRUE(fs::exists(out / "episode_seed4.csv"));
  fs::remove_all(out);
}

TEST(Cli, DeepMprRunWithMissingCheckpointIsRuntimeError) {
  const auto p = write_config("deepmpr_cli_dm.cfg",
                              "nodes.count = 6\nforwarding.mode = deep-mpr\nforwarding.checkpoint = /nonexistent.bin\n");
  const fs::path out = fs::temp_directory_path() / "deepmpr_cli_dm_out";
  EXPECT_EQ(run("run " + p.string() + " -o " + out.string()), 2);
  fs::remove_all(out);
}

TEST(Cli, MprCheckPasses) {
  EXPECT_EQ(run("mpr-check --set nodes.count=15 --set arena.side=550 --snapshots 50"), 0);
}

}  // namespace
