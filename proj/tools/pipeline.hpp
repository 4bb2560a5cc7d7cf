#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sofent/construction.hpp"
#include "sofent/error.hpp"
#include "sofent/io.hpp"
#include "sofent/verify.hpp"

namespace sofent::cli {

namespace fs = std::filesystem;

// Invalid configuration; the message names the offending field.
struct ConfigError : Error {
  using Error::Error;
};

struct SoficSpec {
  std::string builder = "cycle";  // cycle | torus | random | file
  std::size_t n = 0;
  std::vector<std::size_t> dims;
  std::optional<double> budget;
  std::string path;
};

struct MeasureSpec {
  std::string kind = "product";  // product | construction | correlated | file
  std::vector<double> eta;
  std::string path;
};

struct ConstructionSpec {
  std::string h = "1";
  std::size_t l = 0;  // 0: pick by schedule
  ScheduleThresholds thresholds;
  Symbol filler = 0;
  std::size_t cut_offset = 0;
  std::vector<std::pair<std::string, std::string>> pairs;
};

struct CertificationSpec {
  std::vector<std::string> F;
  double epsilon = 0.0;
  std::optional<double> r;  // absent: derived from the mixing radius
  std::size_t q_max = 4;
  std::int64_t gap_cap = 64;
  std::string window = "injective";  // injective | good | all | list
  std::vector<Vertex> window_list;
  std::optional<double> r_edge;
  std::size_t random_orders = 3;
  std::vector<std::vector<Vertex>> user_sets;
};

struct ConvergenceSpec {
  bool enabled = false;
  double delta = 0.05;
  std::size_t sample_budget = 0;
  std::optional<double> min_fraction;
  bool include_vertices = false;
};

struct LemmaSpec {
  bool enabled = false;
  double epsilon = 0.1;
  std::size_t sites = 8;
  std::vector<Vertex> S{0};
  std::string observable = "parity";  // parity | identity | constant | projection
};

struct Theorem1Spec {
  bool enabled = false;
  std::vector<std::string> window{"e"};
  std::string observable = "projection";
  std::optional<double> r;
};

struct Caps {
  std::size_t enumeration = kDefaultEnumCap;
  std::size_t ball = 1'000'000;
  std::size_t samples = 4096;
};

struct ExperimentConfig {
  GroupPresentation group{GroupKind::FreeAbelian, 1};
  std::uint64_t seed = 0;
  int threads = 0;  // 0: OpenMP default
  Caps caps;
  SoficSpec sofic;
  io::Json process;
  MeasureSpec measure;
  std::optional<ConstructionSpec> construction;
  CertificationSpec certification;
  ConvergenceSpec convergence;
  LemmaSpec lemmas;
  Theorem1Spec theorem1;
};

ExperimentConfig parse_config(const io::Json& j);
ExperimentConfig load_config(const fs::path& path);

// Parameters derived deterministically from the configuration.
struct Plan {
  ProcessPtr process;
  std::vector<GroupWord> F;
  std::optional<GroupWord> h;
  std::optional<CosetDecomposition> decomposition;
  std::optional<MixingRadius> radius;
  double epsilon = 0.0;
  double r = 0.0;
  double r_edge = 0.0;
  double budget = 0.0;
};

Plan make_plan(const ExperimentConfig& cfg);

// Stages read their inputs from and write their artifacts to `out`.
void stage_build_sofic(const ExperimentConfig& cfg, const fs::path& out);
void stage_build_measure(const ExperimentConfig& cfg, const fs::path& out);
bool stage_certify(const ExperimentConfig& cfg, const fs::path& out);
bool stage_diagnose(const ExperimentConfig& cfg, const fs::path& out);
bool stage_lemmas(const ExperimentConfig& cfg, const fs::path& out);
// Assembles report.json (or report.csv); returns the overall verdict.
bool stage_report(const fs::path& out, const std::string& format);

// build -> construct -> certify -> report. Returns the process exit code.
int run(const ExperimentConfig& cfg, const fs::path& out);

int main_entry(int argc, char** argv);

}  // namespace sofent::cli
