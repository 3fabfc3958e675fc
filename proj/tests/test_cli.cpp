#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>

#include "oracles.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string err;
};

Run cli(const std::string& args, const fs::path& scratch) {
  const auto err = scratch / "stderr.txt";
  const std::string cmd = std::string(AFOV_CLI) + " " + args + " >/dev/null 2>" + err.string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = oracle::slurp(err);
  return r;
}

nlohmann::json load(const fs::path& p) { return afov::detail::read_json(p); }

void write_spec(const fs::path& p, int n_points) {
  afov::detail::write_json(p, afov::synth::to_json({.seed = 3, .n_points = n_points, .noise_rate = 0.2}));
}

}  // namespace

TEST(Cli, HelpExitsZero) {
  const auto dir = oracle::scratch("cli_help");
  EXPECT_EQ(cli("--help", dir).code, 0);
  EXPECT_EQ(cli("pipeline --help", dir).code, 0);
}

TEST(Cli, MissingSubcommandIsUsageError) {
  const auto dir = oracle::scratch("cli_nosub");
  EXPECT_EQ(cli("", dir).code, 1);
  EXPECT_EQ(cli("frobnicate", dir).code, 1);
}

TEST(Cli, BadGammaIsConfigError) {
  const auto dir = oracle::scratch("cli_gamma");
  const auto r = cli("afi --gamma 1.5", dir);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("gamma must be in (0,1)"), std::string::npos) << r.err;
}

TEST(Cli, MissingRequiredFlagIsUsageError) {
  const auto dir = oracle::scratch("cli_need");
  const auto r = cli("eval --labels x.u16", dir);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--out"), std::string::npos) << r.err;
}

TEST(Cli, BadDataIsExitTwo) {
  const auto dir = oracle::scratch("cli_data");
  const auto r = cli("pseudo --scene " + (dir / "nope").string() + " --teacher " + (dir / "nope").string() +
                         " --out " + (dir / "o").string(),
                     dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("missing file"), std::string::npos) << r.err;
}

TEST(Cli, StagesChainAndEvalOfTruthIsPerfect) {
  const auto dir = oracle::scratch("cli_stages");
  write_spec(dir / "spec.json", 1200);
  const auto s = dir.string();
  ASSERT_EQ(cli("synth --spec " + s + "/spec.json --out " + s + "/syn", dir).code, 0);
  for (const char* f : {"scene/scene.json", "teacher/masks.json", "dict.json", "synthspec.json"})
    EXPECT_TRUE(fs::exists(dir / "syn" / f)) << f;

  ASSERT_EQ(cli("eval --scene " + s + "/syn/scene --labels " + s + "/syn/scene/gt_labels.u16 --dict " + s +
                    "/syn/dict.json --out " + s + "/ev",
                dir)
                .code,
            0);
  EXPECT_DOUBLE_EQ(load(dir / "ev/metrics.json").at("miou").get<double>(), 100.0);

  ASSERT_EQ(cli("project --scene " + s + "/syn/scene --out " + s + "/pr", dir).code, 0);
  EXPECT_TRUE(fs::exists(dir / "pr/hits.csv"));
  ASSERT_EQ(cli("pseudo --scene " + s + "/syn/scene --teacher " + s + "/syn/teacher --out " + s + "/ps", dir).code, 0);
  EXPECT_EQ(fs::file_size(dir / "ps/pseudo.u16"), 2400u);
  ASSERT_EQ(cli("corr --scene " + s + "/syn/scene --teacher " + s + "/syn/teacher --out " + s + "/co", dir).code, 0);
  EXPECT_GT(load(dir / "co/corr.json").size(), 0u);
  ASSERT_EQ(cli("tmp --scene " + s + "/syn/scene --teacher " + s + "/syn/teacher --dict " + s +
                    "/syn/dict.json --steps 20 --out " + s + "/tm",
                dir)
                .code,
            0);
  EXPECT_TRUE(fs::exists(dir / "tm/head.json"));
  EXPECT_TRUE(fs::exists(dir / "tm/trace.csv"));
  ASSERT_EQ(cli("afi --scene " + s + "/syn/scene --labels " + s + "/ps/pseudo.u16 --pseudo " + s +
                    "/ps/pseudo.u16 --no-coverage --out " + s + "/af",
                dir)
                .code,
            0);
  EXPECT_EQ(fs::file_size(dir / "af/afi.u16"), 2400u);
  EXPECT_FALSE(load(dir / "af/afi.json").at("coverage").get<bool>());
  ASSERT_EQ(cli("render --scene " + s + "/syn/scene --labels " + s + "/af/afi.u16 --out " + s + "/r.svg", dir).code, 0);
  EXPECT_EQ(oracle::slurp(dir / "r.svg").rfind("<svg", 0), 0u);
}

TEST(Cli, PipelineWritesMetricsAndRerunsAreByteIdentical) {
  const auto dir = oracle::scratch("cli_pipeline");
  write_spec(dir / "spec.json", 1500);
  const auto s = dir.string();
  for (const char* run : {"run1", "run2"}) {
    const auto r = cli("pipeline --spec " + s + "/spec.json --steps 100 --out " + s + "/" + run, dir);
    ASSERT_EQ(r.code, 0) << r.err;
  }
  const auto m = load(dir / "run1/metrics.json");
  for (const char* k : {"baseline", "tmp", "afi"}) EXPECT_TRUE(m.contains(k)) << k;
  EXPECT_TRUE(fs::exists(dir / "run1/final.svg"));
  EXPECT_EQ(oracle::tree_bytes(dir / "run1"), oracle::tree_bytes(dir / "run2"));
}

TEST(Cli, PipelineStageFlags) {
  const auto dir = oracle::scratch("cli_flags");
  write_spec(dir / "spec.json", 800);
  const auto s = dir.string();
  ASSERT_EQ(cli("pipeline --spec " + s + "/spec.json --no-tmp --no-afi --out " + s + "/o", dir).code, 0);
  EXPECT_FALSE(fs::exists(dir / "o/head.json"));
  EXPECT_FALSE(fs::exists(dir / "o/afi.u16"));
  EXPECT_TRUE(fs::exists(dir / "o/metrics.json"));
}
