#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "explore/cli.hpp"
#include "explore/config.hpp"
#include "explore/errors.hpp"

using namespace explore;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "explore");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("explore_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

const std::vector<std::string> kTiny = {"--horizon", "30", "--hidden", "8,8", "--heatmap-episodes", "2",
                                        "--max-inner-steps", "3"};

std::vector<std::string> with_tiny(std::vector<std::string> a) {
  a.insert(a.end(), kTiny.begin(), kTiny.end());
  return a;
}

}  // namespace

TEST_CASE("RunConfig keys") {
  RunConfig c;
  c.set("kl-threshold", "100");
  c.set("curiosity", "0.1");
  c.set("strategy", "pdf");
  c.set("dynamic_alpha", "true");
  c.set("slopes", "south");
  CHECK(c.pretrain.kl_threshold == 100);
  CHECK(c.pretrain.curiosity_enabled);
  CHECK(c.pretrain.curiosity_weight == 0.1);
  CHECK(c.pretrain.strategy == Strategy::PdfSoftmax);
  CHECK(c.pretrain.dynamic_alpha);
  CHECK(c.env.slopes == std::vector<SlopeDirection>{SlopeDirection::South});
  c.set("curiosity", "0");
  CHECK_FALSE(c.pretrain.curiosity_enabled);

  CHECK_THROWS_WITH_AS(c.set("bogus", "1"), doctest::Contains("bogus"), ConfigError);
  CHECK_THROWS_WITH_AS(c.set("epochs", "ten"), doctest::Contains("epochs"), ConfigError);
  CHECK_THROWS_WITH_AS(c.set("strategy", "greedy"), doctest::Contains("strategy"), ConfigError);
}

TEST_CASE("resolved config round trip") {
  RunConfig c;
  c.set("seed", "42");
  c.set("learning_rate", "0.000123");
  c.set("hidden", "32,16");
  c.set("out", "some dir");
  c.resolve();
  std::stringstream buf;
  c.write(buf);
  RunConfig back;
  apply_key_values(back, parse_key_values(buf));
  back.resolve();
  std::stringstream again;
  back.write(again);
  CHECK(again.str() == buf.str());
  CHECK(back.pretrain.seed == 42);
  CHECK(back.finetune.seed == 42);
  CHECK(back.pretrain.learning_rate == 0.000123);
  CHECK(back.out == "some dir");
}

TEST_CASE("cli pretrain, eval, finetune, compare") {
  const fs::path dir = scratch("a");
  const Result r = cli(with_tiny({"pretrain", "--epochs", "1", "--batch", "4", "--alpha-percentile", "2", "--seed", "3",
                                  "--out", dir.string()}));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  for (const char* f : {"config.resolved.toml", "pretrain_log.csv", "policy.ckpt", "heatmap.csv", "heatmap.pgm", "summary.csv"})
    CHECK_MESSAGE(fs::exists(dir / f), f);
  std::istringstream log(slurp(dir / "pretrain_log.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(log, line)) ++lines;
  CHECK(lines == 2);

  SUBCASE("rerun from the resolved config reproduces the log") {
    const fs::path dir2 = scratch("b");
    const Result r2 = cli({"pretrain", "--config", (dir / "config.resolved.toml").string(), "--out", dir2.string()});
    REQUIRE_MESSAGE(r2.code == 0, r2.err);
    CHECK(slurp(dir2 / "pretrain_log.csv") == slurp(dir / "pretrain_log.csv"));
    CHECK(slurp(dir2 / "heatmap.csv") == slurp(dir / "heatmap.csv"));
    fs::remove_all(dir2);
  }
  SUBCASE("eval prints one CSV row") {
    const Result e = cli(with_tiny({"eval", "--checkpoint", (dir / "policy.ckpt").string(), "--episodes", "3"}));
    REQUIRE_MESSAGE(e.code == 0, e.err);
    CHECK(std::count(e.out.begin(), e.out.end(), '\n') == 1);
    CHECK(std::count(e.out.begin(), e.out.end(), ',') == 1);
  }
  SUBCASE("finetune writes its log") {
    const fs::path ft = scratch("ft");
    const Result f = cli(with_tiny({"finetune", "--checkpoint", (dir / "policy.ckpt").string(), "--goals", "2",
                                    "--finetune-epochs", "4", "--episodes-per-epoch", "3", "--eval-episodes", "2",
                                    "--out", ft.string()}));
    REQUIRE_MESSAGE(f.code == 0, f.err);
    const std::string text = slurp(ft / "finetune_log.csv");
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);
    CHECK(fs::exists(ft / "goals.csv"));
    fs::remove_all(ft);
  }
  SUBCASE("compare aligns runs") {
    const Result c = cli({"compare", dir.string(), dir.string()});
    REQUIRE_MESSAGE(c.code == 0, c.err);
    CHECK(c.out.rfind("epoch,", 0) == 0);
    CHECK(std::count(c.out.begin(), c.out.end(), '\n') == 2);
  }
  fs::remove_all(dir);
}

TEST_CASE("cli errors") {
  SUBCASE("unknown strategy names the field") {
    const Result r = cli({"pretrain", "--strategy", "greedy", "--out", scratch("e").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("strategy") != std::string::npos);
  }
  SUBCASE("unknown key") {
    const Result r = cli({"pretrain", "--no-such-key", "3"});
    CHECK(r.code == 2);
    CHECK(r.err.find("no_such_key") != std::string::npos);
  }
  SUBCASE("strategy in a config file") {
    const fs::path p = fs::temp_directory_path() / "explore_cli_test_bad.toml";
    std::ofstream(p) << "[pretrain]\nstrategy = \"roulette\"\n";
    const Result r = cli({"pretrain", "--config", p.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("strategy") != std::string::npos);
    fs::remove(p);
  }
  SUBCASE("percentile above batch") {
    CHECK(cli({"pretrain", "--batch", "4", "--alpha-percentile", "5"}).code == 2);
  }
  SUBCASE("missing checkpoint") {
    CHECK(cli({"eval", "--checkpoint", "/nonexistent/policy.ckpt"}).code == 2);
  }
  SUBCASE("no subcommand") { CHECK(cli({}).code == 2); }
}
