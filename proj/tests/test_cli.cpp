#include <doctest.h>

#include <fstream>
#include <sstream>

#include "pipeline.hpp"
#include "sofent/error.hpp"

using namespace sofent;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("sofent_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "sofent");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::main_entry(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

io::Json load(const std::string& name) { return io::read_json(fs::path(SOFENT_CONFIG_DIR) / name); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("serialization round trips") {
  GroupPresentation f2(GroupKind::Free, 2, {1.0, 2.0});
  auto sigma = build_random_sofic(f2, 30, 4, 5);
  auto back = io::sofic_from_json(io::Json::parse(io::sofic_to_json(sigma).dump()));
  CHECK(back.generators() == sigma.generators());
  CHECK(back.group() == sigma.group());
  CHECK(back.budget() == sigma.budget());

  auto cycles = extract_cycles(build_cycle_sofic(20, 4), GroupPresentation::integers().generator(0));
  auto partition = partition_paths(cycles, 6);
  auto p2 = io::partition_from_json(io::Json::parse(io::partition_to_json(partition).dump()));
  CHECK(p2.paths == partition.paths);
  CHECK(p2.leftover == partition.leftover);

  Measure mu = build_model_measure(MarkovProcess::symmetric_flip(0.1), partition, 1);
  auto mu2 = io::measure_from_json(io::Json::parse(io::measure_to_json(mu).dump()));
  CHECK(entropy(mu2) == entropy(mu));
  CHECK(io::measure_to_json(mu2).dump() == io::measure_to_json(mu).dump());

  Measure ex = ExplicitMeasure(2, {0, 3}, {{{0, 1}, 0.25}, {{1, 1}, 0.75}});
  CHECK(io::measure_to_json(io::measure_from_json(io::Json::parse(io::measure_to_json(ex).dump()))).dump() ==
        io::measure_to_json(ex).dump());

  auto proc = io::process_from_json(load("coinduced_torus.json").at("process"));
  CHECK(proc->alphabet() == 2);
  CHECK(io::process_from_json(io::Json::parse(io::process_to_json(*proc).dump()))->describe() == proc->describe());
  CHECK_THROWS_AS(io::require_version(io::Json{{"version", 2}}, "x"), SchemaError);
}

TEST_CASE("configs parse with defaults") {
  auto cfg = cli::parse_config(load("markov_cycle.json"));
  CHECK(cfg.sofic.n == 4096);
  CHECK(cfg.certification.q_max == 4);
  CHECK_FALSE(cfg.certification.r.has_value());
  auto plan = cli::make_plan(cfg);
  CHECK(plan.radius->radius == 3);
  CHECK(plan.r == 5.0);
  CHECK(plan.r_edge == 6.0);

  auto torus = cli::make_plan(cli::parse_config(load("coinduced_torus.json")));
  CHECK(torus.radius->radius == 4);
  CHECK(torus.r == 6.0);
}

TEST_CASE("invalid configs name the field") {
  auto j = load("bernoulli_cycle.json");
  j["certification"]["epsilon"] = 0.0;
  try {
    cli::parse_config(j);
    FAIL("expected a ConfigError");
  } catch (const cli::ConfigError& e) {
    CHECK(std::string(e.what()).find("certification.epsilon") != std::string::npos);
  }
  auto k = load("bernoulli_cycle.json");
  k.erase("seed");
  CHECK_THROWS_AS(cli::parse_config(k), cli::ConfigError);
  auto dir = scratch("bad");
  std::ofstream(dir / "bad.json") << j.dump();
  CHECK(invoke({"run", "--config", (dir / "bad.json").string(), "--out", dir.string()}) == 1);
  CHECK(invoke({"frobnicate"}) == 1);
}

TEST_CASE("exit codes") {
  auto good = scratch("good");
  CHECK(invoke({"run", "--config", std::string(SOFENT_CONFIG_DIR) + "/bernoulli_cycle.json", "--out", good.string()}) == 0);
  CHECK(fs::exists(good / "report.json"));
  CHECK(fs::exists(good / "report.csv"));
  CHECK(fs::exists(good / "lemmas.json"));
  auto bad = scratch("correlated");
  CHECK(invoke({"run", "--config", std::string(SOFENT_CONFIG_DIR) + "/correlated.json", "--out", bad.string()}) == 2);
  CHECK(invoke({"report", "--out", bad.string(), "--format", "csv"}) == 2);
}

TEST_CASE("stages run separately") {
  auto dir = scratch("stages");
  const std::string config = std::string(SOFENT_CONFIG_DIR) + "/markov_cycle.json";
  for (const char* stage : {"build-sofic", "build-measure", "certify-mixing", "diagnose-convergence"})
    CHECK(invoke({stage, "--config", config, "--out", dir.string()}) == 0);
  CHECK(invoke({"report", "--out", dir.string()}) == 0);
  auto whole = scratch("whole");
  CHECK(invoke({"run", "--config", config, "--out", whole.string()}) == 0);
  CHECK(slurp(dir / "report.json") == slurp(whole / "report.json"));
  CHECK(invoke({"build-sofic", "--kind", "torus", "--dims", "4", "5", "--budget", "3", "--out", dir.string()}) == 0);
  CHECK(io::sofic_from_json(io::read_json(dir / "sofic.json")).size() == 20);
}

}
