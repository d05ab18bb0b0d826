#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int status = -1;
  std::string output;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(SS2D_CLI_PATH) + " " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) r.output.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("ss2d_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Cli, HelpExitsZero) {
  const auto r = run("--help");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.output.find("pipeline"), std::string::npos);
  EXPECT_NE(r.output.find("grad-check"), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("frobnicate").status, 2);
  EXPECT_EQ(run("").status, 2);
  const auto r = run("train --model gru --data x --out y");
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("error: usage:"), std::string::npos);
}

TEST(Cli, FailuresExitOneWithCategory) {
  const auto missing = run("eval --data /nonexistent/ds.csv --grid-out /tmp/ss2d_nowhere");
  EXPECT_EQ(missing.status, 1);
  EXPECT_NE(missing.output.find("error: io:"), std::string::npos) << missing.output;
  const auto bad = run("config --set train.epochs=zero");
  EXPECT_EQ(bad.status, 1);
  EXPECT_NE(bad.output.find("error: validation:"), std::string::npos) << bad.output;
}

TEST(Cli, ConfigPrintsHashAndHonoursEnvironment) {
  const auto plain = run("config");
  EXPECT_EQ(plain.status, 0);
  EXPECT_EQ(plain.output.rfind("# config_hash=", 0), 0u);
  const auto env = run("config --set train.epochs=3");
  EXPECT_NE(env.output.find("epochs = 3"), std::string::npos);
  const auto r = run("config");
  EXPECT_EQ(r.output, plain.output);
  const std::string cmd = "SS2D_TRAIN_EPOCHS=4 " + std::string(SS2D_CLI_PATH) + " config";
  FILE* pipe = popen(cmd.c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, n);
  pclose(pipe);
  EXPECT_NE(out.find("epochs = 4"), std::string::npos);
}

TEST(Cli, GradCheckReportsPass) {
  const auto r = run("grad-check");
  EXPECT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("stacked"), std::string::npos);
}

TEST(Cli, StagesChainThroughFiles) {
  const auto dir = scratch("stages");
  const std::string small = " --set sim.episode_len=300";
  const auto sim = run("simulate --episodes 2 --seed 3 --episode-len 50 --out " + (dir / "traj").string());
  EXPECT_EQ(sim.status, 0) << sim.output;
  EXPECT_TRUE(fs::exists(dir / "traj" / "episode_0.csv"));
  EXPECT_TRUE(fs::exists(dir / "traj" / "episode_1.csv"));

  const auto ds = (dir / "ds.csv").string();
  ASSERT_EQ(run("gen-data --episodes 5 --seed 3 --out " + ds + small).status, 0);
  EXPECT_EQ(slurp(ds).rfind("# ", 0), 0u);

  const auto ckpt = (dir / "dnn.ckpt").string();
  const auto tr = run("train --model dnn --layers 8 --epochs 2 --data " + ds + " --out " + ckpt + " --curve " +
                      (dir / "curve.csv").string());
  ASSERT_EQ(tr.status, 0) << tr.output;

  const auto ev = run("eval --data " + ds + " --estimators last_seen,helios,dnn:" + ckpt + " --split val --grid-out " +
                      (dir / "grids").string());
  ASSERT_EQ(ev.status, 0) << ev.output;
  EXPECT_TRUE(fs::exists(dir / "grids" / "compare_dnn_vs_last_seen.csv"));
  EXPECT_TRUE(fs::exists(dir / "grids" / "summary.csv"));

  const auto hm = run("heatmap --grid " + (dir / "grids" / "grid_dnn.csv").string() + " --compare " +
                      (dir / "grids" / "grid_last_seen.csv").string() + " --out " + (dir / "cmp.svg").string());
  ASSERT_EQ(hm.status, 0) << hm.output;
  EXPECT_NE(slurp(dir / "cmp.svg").find("<svg"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, PipelineSmokeRunIsReproducible) {
  const auto a = scratch("pipe_a"), b = scratch("pipe_b");
  const std::string args = " --seed 7 --episodes 4 --epochs 1 --jobs 1 --set sim.episode_len=400 --set "
                           "'model.lstm_layers=[8]' 'model.lstm_head=[4]' 'model.dnn_layers=[8]'";
  ASSERT_EQ(run("pipeline --out " + a.string() + args).status, 0);
  ASSERT_EQ(run("pipeline --out " + b.string() + args).status, 0);
  for (const char* f : {"dataset.csv", "dnn.ckpt", "lstm.ckpt", "grids/grid_lstm.csv", "grids/compare_lstm_vs_dnn.csv",
                        "grids/summary.csv"}) {
    EXPECT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  fs::remove_all(a);
  fs::remove_all(b);
}
