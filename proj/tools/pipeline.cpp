#include "pipeline.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <numeric>

#include "sofent/kernels.hpp"

namespace sofent::cli {

namespace {

using io::Json;
using io::OrderedJson;

std::string joined(const std::string& prefix, const char* key) {
  return prefix.empty() ? std::string(key) : prefix + "." + key;
}

template <typename T>
T need(const Json& j, const std::string& prefix, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw ConfigError("config field '" + joined(prefix, key) + "' is required");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config field '" + joined(prefix, key) + "' has the wrong type");
  }
}

template <typename T>
T get(const Json& j, const std::string& prefix, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return need<T>(j, prefix, key);
}

template <typename T>
std::optional<T> maybe(const Json& j, const std::string& prefix, const char* key) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return need<T>(j, prefix, key);
}

void check(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError("config field '" + field + "' " + message);
}

const Json& section(const Json& j, const char* key) {
  static const Json empty = Json::object();
  if (!j.contains(key)) return empty;
  if (!j.at(key).is_object()) throw ConfigError(std::string("config field '") + key + "' must be an object");
  return j.at(key);
}

// The Z-process whose intervals feed the construction.
ProcessPtr interval_process(const ProcessPtr& process) {
  if (const auto* c = dynamic_cast<const CoinducedProcess*>(process.get())) return c->base_ptr();
  return process;
}

LocalObservable make_observable(const std::string& kind, std::vector<GroupWord> window,
                                std::size_t alphabet) {
  if (kind == "projection") return LocalObservable::projection(std::move(window), 0, alphabet);
  if (kind == "identity") return LocalObservable::identity(std::move(window), alphabet);
  if (kind == "constant") return LocalObservable::constant(std::move(window), alphabet, 0, 1);
  if (kind == "parity") {
    if (alphabet != 2) throw ConfigError("the parity observable needs a binary alphabet");
    return LocalObservable::parity(std::move(window));
  }
  throw ConfigError("unknown observable '" + kind + "'");
}

OrderedJson read_ordered(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return OrderedJson::parse(in);
}

const char* verdict(bool pass) { return pass ? "PASS" : "FAIL"; }

std::vector<Vertex> window_vertices(const ExperimentConfig& cfg, const Plan& plan,
                                    const SoficMap& sigma, const fs::path& out) {
  const auto& kind = cfg.certification.window;
  if (kind == "injective") return injective_vertices(sigma, plan.F);
  if (kind == "all") {
    std::vector<Vertex> all(sigma.size());
    std::iota(all.begin(), all.end(), Vertex{0});
    return all;
  }
  if (kind == "list") return cfg.certification.window_list;
  if (kind == "good") {
    if (!plan.decomposition) throw ConfigError("window 'good' needs construction.h");
    auto partition = io::partition_from_json(io::read_json(out / "partition.json"));
    return good_vertices(sigma, *plan.decomposition, partition);
  }
  throw ConfigError("config field 'certification.window' must be injective, good, all or list");
}

}  // namespace

ExperimentConfig parse_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (j.contains("version")) io::require_version(j, "config");
  ExperimentConfig cfg;
  cfg.seed = need<std::uint64_t>(j, "", "seed");
  cfg.threads = get<int>(j, "", "threads", 0);
  check(cfg.threads >= 0, "threads", "must be nonnegative");
  if (j.contains("group")) {
    try {
      cfg.group = io::group_from_json(j.at("group"));
    } catch (const SchemaError& e) {
      throw ConfigError(std::string("config field 'group': ") + e.what());
    }
  }

  const Json& caps = section(j, "caps");
  cfg.caps.enumeration = get<std::size_t>(caps, "caps", "enumeration", cfg.caps.enumeration);
  cfg.caps.ball = get<std::size_t>(caps, "caps", "ball", cfg.caps.ball);
  cfg.caps.samples = get<std::size_t>(caps, "caps", "samples", cfg.caps.samples);
  check(cfg.caps.enumeration > 0, "caps.enumeration", "must be positive");
  check(cfg.caps.ball > 0, "caps.ball", "must be positive");
  check(cfg.caps.samples > 0, "caps.samples", "must be positive");

  const Json& sofic = section(j, "sofic");
  cfg.sofic.builder = get<std::string>(sofic, "sofic", "builder", "cycle");
  cfg.sofic.n = get<std::size_t>(sofic, "sofic", "n", 0);
  cfg.sofic.dims = get<std::vector<std::size_t>>(sofic, "sofic", "dims", {});
  cfg.sofic.budget = maybe<double>(sofic, "sofic", "budget");
  cfg.sofic.path = get<std::string>(sofic, "sofic", "path", "");
  const auto& b = cfg.sofic.builder;
  check(b == "cycle" || b == "torus" || b == "random" || b == "file", "sofic.builder",
        "must be cycle, torus, random or file");
  if (b == "cycle" || b == "random") check(cfg.sofic.n > 0, "sofic.n", "must be positive");
  if (b == "torus") check(!cfg.sofic.dims.empty(), "sofic.dims", "must be a nonempty list");
  if (b == "file") check(!cfg.sofic.path.empty(), "sofic.path", "is required for builder 'file'");
  if (cfg.sofic.budget) check(*cfg.sofic.budget > 0, "sofic.budget", "must be positive");

  if (!j.contains("process")) throw ConfigError("config field 'process' is required");
  cfg.process = j.at("process");

  const Json& measure = section(j, "measure");
  cfg.measure.kind = get<std::string>(measure, "measure", "kind", "product");
  cfg.measure.eta = get<std::vector<double>>(measure, "measure", "eta", {});
  cfg.measure.path = get<std::string>(measure, "measure", "path", "");
  const auto& mk = cfg.measure.kind;
  check(mk == "product" || mk == "construction" || mk == "correlated" || mk == "file", "measure.kind",
        "must be product, construction, correlated or file");

  if (j.contains("construction")) {
    const Json& c = section(j, "construction");
    ConstructionSpec spec;
    spec.h = get<std::string>(c, "construction", "h", spec.h);
    spec.l = get<std::size_t>(c, "construction", "l", 0);
    spec.filler = get<Symbol>(c, "construction", "filler", 0);
    spec.cut_offset = get<std::size_t>(c, "construction", "cut_offset", 0);
    spec.pairs = get<std::vector<std::pair<std::string, std::string>>>(c, "construction", "pairs", {});
    const Json& s = section(c, "schedule");
    spec.thresholds.a = get<double>(s, "construction.schedule", "threshold_a", spec.thresholds.a);
    spec.thresholds.b = get<double>(s, "construction.schedule", "threshold_b", spec.thresholds.b);
    spec.thresholds.l_cap = get<std::size_t>(s, "construction.schedule", "l_cap", spec.thresholds.l_cap);
    check(spec.thresholds.l_cap >= 2, "construction.schedule.l_cap", "must be at least 2");
    cfg.construction = spec;
  }
  if (mk == "construction" && !cfg.construction)
    throw ConfigError("config field 'construction' is required for measure.kind 'construction'");

  const Json& cert = section(j, "certification");
  auto& cs = cfg.certification;
  cs.F = need<std::vector<std::string>>(cert, "certification", "F");
  check(!cs.F.empty(), "certification.F", "must be nonempty");
  cs.epsilon = need<double>(cert, "certification", "epsilon");
  check(cs.epsilon > 0.0, "certification.epsilon", "must be positive");
  cs.r = maybe<double>(cert, "certification", "r");
  if (cs.r) check(*cs.r > 0.0, "certification.r", "must be positive");
  cs.q_max = get<std::size_t>(cert, "certification", "q_max", cs.q_max);
  check(cs.q_max >= 2, "certification.q_max", "must be at least 2");
  cs.gap_cap = get<std::int64_t>(cert, "certification", "gap_cap", cs.gap_cap);
  check(cs.gap_cap >= 1, "certification.gap_cap", "must be at least 1");
  cs.window = get<std::string>(cert, "certification", "window", cs.window);
  cs.window_list = get<std::vector<Vertex>>(cert, "certification", "window_list", {});
  cs.r_edge = maybe<double>(cert, "certification", "r_edge");
  cs.random_orders = get<std::size_t>(cert, "certification", "random_orders", cs.random_orders);
  cs.user_sets = get<std::vector<std::vector<Vertex>>>(cert, "certification", "user_sets", {});

  if (j.contains("convergence")) {
    const Json& c = section(j, "convergence");
    cfg.convergence.enabled = true;
    cfg.convergence.delta = need<double>(c, "convergence", "delta");
    check(cfg.convergence.delta > 0.0, "convergence.delta", "must be positive");
    cfg.convergence.sample_budget = get<std::size_t>(c, "convergence", "sample_budget", 0);
    cfg.convergence.min_fraction = maybe<double>(c, "convergence", "min_fraction");
    cfg.convergence.include_vertices = get<bool>(c, "convergence", "include_vertices", false);
  }
  if (j.contains("lemmas")) {
    const Json& c = section(j, "lemmas");
    cfg.lemmas.enabled = true;
    cfg.lemmas.epsilon = get<double>(c, "lemmas", "epsilon", cfg.lemmas.epsilon);
    check(cfg.lemmas.epsilon > 0.0 && cfg.lemmas.epsilon <= 0.5, "lemmas.epsilon", "must lie in (0, 1/2]");
    cfg.lemmas.sites = get<std::size_t>(c, "lemmas", "sites", cfg.lemmas.sites);
    check(cfg.lemmas.sites >= 1, "lemmas.sites", "must be positive");
    cfg.lemmas.S = get<std::vector<Vertex>>(c, "lemmas", "S", cfg.lemmas.S);
    cfg.lemmas.observable = get<std::string>(c, "lemmas", "observable", cfg.lemmas.observable);
  }
  if (j.contains("theorem1")) {
    const Json& c = section(j, "theorem1");
    cfg.theorem1.enabled = true;
    cfg.theorem1.window = get<std::vector<std::string>>(c, "theorem1", "window", cfg.theorem1.window);
    cfg.theorem1.observable = get<std::string>(c, "theorem1", "observable", cfg.theorem1.observable);
    cfg.theorem1.r = maybe<double>(c, "theorem1", "r");
    if (cfg.theorem1.r) check(*cfg.theorem1.r > 0.0, "theorem1.r", "must be positive");
  }
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) { return parse_config(io::read_json(path)); }

Plan make_plan(const ExperimentConfig& cfg) {
  Plan plan;
  try {
    plan.process = io::process_from_json(cfg.process);
  } catch (const SchemaError& e) {
    throw ConfigError(std::string("config field 'process': ") + e.what());
  }
  if (!(plan.process->group() == cfg.group))
    throw ConfigError("config field 'process' is defined over a different group than 'group'");
  for (const auto& w : cfg.certification.F) plan.F.push_back(cfg.group.parse_word(w));
  plan.epsilon = cfg.certification.epsilon;
  if (cfg.construction) {
    plan.h = cfg.group.parse_word(cfg.construction->h);
    plan.decomposition = cfg.group.coset_decompose(plan.F, *plan.h);
  }
  if (cfg.certification.r) {
    plan.r = *cfg.certification.r;
  } else {
    if (!plan.decomposition)
      throw ConfigError("config field 'certification.r' is required without construction.h");
    // Uniform mixing at eps/m over |I|-windows, then the r0 + 2 max rho(f)
    // inflation that keeps translated windows r0 apart.
    const auto& d = *plan.decomposition;
    auto base = interval_process(plan.process);
    plan.radius = uniform_mixing_radius(*base, d.interval_size(),
                                        plan.epsilon / static_cast<double>(d.coset_count()),
                                        cfg.certification.gap_cap, cfg.certification.q_max);
    if (!plan.radius->radius)
      throw ConfigError("no mixing radius found up to certification.gap_cap; set certification.r");
    double reach = 0.0;
    for (const auto& f : plan.F) reach = std::max(reach, cfg.group.word_metric(f));
    plan.r = static_cast<double>(*plan.radius->radius) + 2.0 * reach;
  }
  plan.r_edge = cfg.certification.r_edge.value_or(plan.r + 1.0);
  if (!(plan.r < plan.r_edge)) throw ConfigError("config field 'certification.r_edge' must exceed r");
  std::vector<GroupWord> reach = plan.decomposition ? plan.decomposition->enlarged : plan.F;
  plan.budget = cfg.sofic.budget.value_or(default_budget(plan.r_edge, window_diameter(cfg.group, reach)) + 1.0);
  return plan;
}

void stage_build_sofic(const ExperimentConfig& cfg, const fs::path& out) {
  const Plan plan = make_plan(cfg);
  const auto& spec = cfg.sofic;
  auto build = [&]() -> SoficMap {
    if (spec.builder == "cycle") {
      if (!(cfg.group == GroupPresentation::integers()))
        throw ConfigError("builder 'cycle' needs group Z with unit weight");
      return build_cycle_sofic(spec.n, plan.budget);
    }
    if (spec.builder == "torus") {
      if (cfg.group.kind() != GroupKind::FreeAbelian ||
          static_cast<std::size_t>(cfg.group.rank()) != spec.dims.size())
        throw ConfigError("builder 'torus' needs Z^d with d = |sofic.dims|");
      return build_torus_sofic(spec.dims, plan.budget, cfg.group.weights());
    }
    if (spec.builder == "random") return build_random_sofic(cfg.group, spec.n, cfg.seed, plan.budget);
    return io::sofic_from_json(io::read_json(spec.path));
  };
  io::write_json(out / "sofic.json", io::sofic_to_json(build()));
}

void stage_build_measure(const ExperimentConfig& cfg, const fs::path& out) {
  const Plan plan = make_plan(cfg);
  const SoficMap sigma = io::sofic_from_json(io::read_json(out / "sofic.json"));
  const std::size_t n = sigma.size();
  std::vector<Vertex> sites(n);
  std::iota(sites.begin(), sites.end(), Vertex{0});
  const auto& kind = cfg.measure.kind;
  auto build = [&]() -> Measure {
    if (kind == "product") {
      std::vector<double> eta = cfg.measure.eta;
      if (eta.empty()) {
        const auto* b = dynamic_cast<const BernoulliProcess*>(plan.process.get());
        if (!b) throw ConfigError("config field 'measure.eta' is required unless the process is bernoulli");
        eta = b->eta();
      }
      return BlockProductMeasure::product(eta, sites);
    }
    if (kind == "correlated") {
      const std::size_t a = plan.process->alphabet();
      std::vector<std::pair<Config, double>> atoms;
      for (std::size_t s = 0; s < a; ++s) atoms.emplace_back(Config(n, static_cast<Symbol>(s)), 1.0 / static_cast<double>(a));
      return ExplicitMeasure(a, sites, std::move(atoms));
    }
    if (kind == "file") return io::measure_from_json(io::read_json(cfg.measure.path));
    const auto& c = *cfg.construction;
    std::vector<std::pair<GroupWord, GroupWord>> pairs;
    for (const auto& [g, gp] : c.pairs) pairs.emplace_back(cfg.group.parse_word(g), cfg.group.parse_word(gp));
    std::size_t l = c.l;
    OrderedJson construction = OrderedJson::object();
    if (l == 0) {
      auto entries = schedule_l(std::span<const SoficMap>(&sigma, 1), *plan.h, pairs, c.thresholds);
      l = entries[0].l;
      construction["schedule"] = {{"threshold_a", c.thresholds.a},
                                  {"threshold_b", c.thresholds.b},
                                  {"l_cap", c.thresholds.l_cap}};
    }
    auto cycles = extract_cycles(sigma, *plan.h);
    auto partition = partition_paths(cycles, l, c.cut_offset);
    OrderedJson pair_json = OrderedJson::array();
    auto fractions = check_condition_b(sigma, *plan.h, pairs, l);
    for (std::size_t i = 0; i < pairs.size(); ++i)
      pair_json.push_back({{"g", word_key(pairs[i].first)},
                           {"g_prime", word_key(pairs[i].second)},
                           {"fraction", fractions[i]}});
    construction["version"] = io::kSchemaVersion;
    construction["h"] = word_key(*plan.h);
    construction["l"] = l;
    construction["cycles"] = cycles.size();
    construction["paths"] = partition.paths.size();
    construction["leftover"] = partition.leftover.size();
    construction["condition_a"] = check_condition_a(partition);
    construction["condition_b"] = pair_json;
    io::write_json(out / "construction.json", construction);
    io::write_json(out / "partition.json", io::partition_to_json(partition));
    return build_model_measure(*interval_process(plan.process), partition, c.filler);
  };
  io::write_json(out / "measure.json", io::measure_to_json(build()));
}

bool stage_certify(const ExperimentConfig& cfg, const fs::path& out) {
  const Plan plan = make_plan(cfg);
  const SoficMap sigma = io::sofic_from_json(io::read_json(out / "sofic.json"));
  const Measure mu = io::measure_from_json(io::read_json(out / "measure.json"));
  const ModelMetric metric = build_metric(sigma, plan.r_edge, cfg.caps.ball);
  const auto W = window_vertices(cfg, plan, sigma, out);
  SetSampler sampler;
  sampler.random_orders = cfg.certification.random_orders;
  sampler.seed = cfg.seed;
  sampler.user_sets = cfg.certification.user_sets;
  auto cert = certify_uniform_model_mixing(mu, sigma, metric, *plan.process, plan.F, plan.epsilon,
                                           plan.r, W, cfg.certification.window, sampler);
  OrderedJson j = io::certificate_to_json(cert);
  j["r_edge"] = plan.r_edge;
  j["budget"] = sigma.budget();
  if (plan.radius) {
    j["mixing_radius"] = io::mixing_radius_to_json(*plan.radius);
    io::write_json(out / "mixing_radius.json", io::mixing_radius_to_json(*plan.radius));
  }
  io::write_json(out / "certificate.json", j);
  io::write_text(out / "certificate.csv", io::certificate_csv(cert));
  return cert.pass;
}

bool stage_diagnose(const ExperimentConfig& cfg, const fs::path& out) {
  if (!cfg.convergence.enabled) throw ConfigError("config field 'convergence' is required");
  const Plan plan = make_plan(cfg);
  const SoficMap sigma = io::sofic_from_json(io::read_json(out / "sofic.json"));
  const Measure mu = io::measure_from_json(io::read_json(out / "measure.json"));
  auto rep = diagnose_local_convergence(mu, *plan.process, sigma, plan.F, cfg.convergence.delta,
                                        cfg.convergence.sample_budget, cfg.seed, cfg.caps.enumeration);
  OrderedJson j = io::convergence_to_json(rep, cfg.convergence.include_vertices);
  bool pass = true;
  if (cfg.convergence.min_fraction) {
    pass = rep.fraction >= *cfg.convergence.min_fraction;
    j["min_fraction"] = *cfg.convergence.min_fraction;
    j["verdict"] = verdict(pass);
  } else {
    j["verdict"] = "REPORTED";
  }
  io::write_json(out / "convergence.json", j);
  return pass;
}

bool stage_lemmas(const ExperimentConfig& cfg, const fs::path& out) {
  if (!cfg.lemmas.enabled && !cfg.theorem1.enabled)
    throw ConfigError("config field 'lemmas' or 'theorem1' is required");
  const Plan plan = make_plan(cfg);
  const SoficMap sigma = io::sofic_from_json(io::read_json(out / "sofic.json"));
  const Measure mu = io::measure_from_json(io::read_json(out / "measure.json"));
  const std::size_t alphabet = alphabet_of(mu);
  OrderedJson j = {{"version", io::kSchemaVersion}};
  bool pass = true;
  if (cfg.lemmas.enabled) {
    const std::size_t k = std::min(cfg.lemmas.sites, sigma.size());
    std::vector<ExplicitMeasure> prefixes;
    OrderedJson checks = OrderedJson::array();
    for (std::size_t m = 1; m <= k; ++m) {
      std::vector<Vertex> sites(m);
      std::iota(sites.begin(), sites.end(), Vertex{0});
      prefixes.push_back(to_explicit(marginal(mu, sites), cfg.caps.enumeration));
      auto rep = lemma1_bound_check(prefixes.back(), cfg.lemmas.epsilon);
      pass = pass && rep.pass;
      checks.push_back(io::lemma1_to_json(rep));
    }
    OrderedJson table = OrderedJson::array();
    for (const auto& row : lemma1_sequence(prefixes, cfg.lemmas.epsilon))
      table.push_back({{"sites", row.sites},
                       {"entropy_per_site", row.entropy_per_site},
                       {"log_cov_per_site", row.log_cov_per_site}});
    j["lemma1"] = {{"checks", checks}, {"sequence", table}};
    auto phi = make_observable(cfg.lemmas.observable, plan.F, alphabet);
    auto rep4 = lemma4_chain_check(mu, sigma, phi, cfg.lemmas.S, cfg.caps.enumeration);
    pass = pass && rep4.pass;
    j["lemma4"] = io::lemma4_to_json(rep4);
  }
  if (cfg.theorem1.enabled) {
    std::vector<GroupWord> window;
    for (const auto& w : cfg.theorem1.window) window.push_back(cfg.group.parse_word(w));
    auto psi = make_observable(cfg.theorem1.observable, window, alphabet);
    const double r = cfg.theorem1.r.value_or(plan.r);
    const ModelMetric metric = build_metric(sigma, std::max(plan.r_edge, r + 1.0), cfg.caps.ball);
    auto W = window_vertices(cfg, plan, sigma, out);
    auto rep = theorem1_report(mu, sigma, metric, *plan.process, psi, W, plan.epsilon, r,
                               cfg.caps.enumeration, cfg.caps.samples, cfg.seed);
    pass = pass && rep.pass;
    j["theorem1"] = io::theorem1_to_json(rep);
  }
  j["verdict"] = verdict(pass);
  io::write_json(out / "lemmas.json", j);
  return pass;
}

bool stage_report(const fs::path& out, const std::string& format) {
  const OrderedJson cert = read_ordered(out / "certificate.json");
  bool pass = cert.at("verdict") == "PASS";
  if (format == "csv") {
    std::ostringstream os;
    os.precision(17);
    os << "origin,size,separated,maximal,orbit_size,entropy,ratio,target,verdict\n";
    for (const auto& s : cert.at("sets"))
      os << s.at("origin").get<std::string>() << ',' << s.at("size").get<std::size_t>() << ','
         << (s.at("separated").get<bool>() ? 1 : 0) << ',' << (s.at("maximal").get<bool>() ? 1 : 0)
         << ',' << s.at("orbit_size").get<std::size_t>() << ',' << s.at("entropy").get<double>()
         << ',' << s.at("ratio").get<double>() << ',' << s.at("target").get<double>() << ','
         << s.at("verdict").get<std::string>() << '\n';
    io::write_text(out / "report.csv", os.str());
    return pass;
  }
  if (format != "json") throw ConfigError("--format must be json or csv");
  OrderedJson stages = OrderedJson::object();
  for (const char* name : {"construction", "certificate", "convergence", "lemmas"}) {
    fs::path file = out / (std::string(name) + ".json");
    if (!fs::exists(file)) continue;
    OrderedJson part = read_ordered(file);
    if (part.contains("verdict") && part.at("verdict") == "FAIL") pass = false;
    stages[name] = std::move(part);
  }
  OrderedJson report = {{"version", io::kSchemaVersion}, {"stages", stages}, {"verdict", verdict(pass)}};
  io::write_json(out / "report.json", report);
  return pass;
}

int run(const ExperimentConfig& cfg, const fs::path& out) {
  stage_build_sofic(cfg, out);
  stage_build_measure(cfg, out);
  bool pass = stage_certify(cfg, out);
  std::cout << "certify-mixing: " << verdict(pass) << '\n';
  if (cfg.convergence.enabled) {
    bool ok = stage_diagnose(cfg, out);
    std::cout << "diagnose-convergence: " << verdict(ok) << '\n';
    pass = pass && ok;
  }
  if (cfg.lemmas.enabled || cfg.theorem1.enabled) {
    bool ok = stage_lemmas(cfg, out);
    std::cout << "check-lemmas: " << verdict(ok) << '\n';
    pass = pass && ok;
  }
  stage_report(out, "csv");
  pass = stage_report(out, "json") && pass;
  std::cout << "report: " << verdict(pass) << '\n';
  return pass ? 0 : 2;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Finite-n certification of uniform model-mixing for sofic approximations"};
  app.require_subcommand(1);

  fs::path config_path;
  fs::path out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::size_t> cap_enum;
  std::string format = "json";
  std::string kind = "cycle";
  std::size_t n = 0;
  std::vector<std::size_t> dims;
  int rank = 2;
  double budget = 16.0;

  auto common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", config_path, "experiment config (JSON)");
    if (needs_config) opt->required();
    sub->add_option("--out", out, "artifact directory");
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--threads", threads, "OpenMP threads")->check(CLI::PositiveNumber);
    sub->add_option("--cap-enum", cap_enum, "enumeration cap")->check(CLI::PositiveNumber);
    sub->add_option("--format", format, "report format")->check(CLI::IsMember({"json", "csv"}));
  };
  auto* run_cmd = app.add_subcommand("run", "run the whole pipeline");
  common(run_cmd, true);
  auto* sofic_cmd = app.add_subcommand("build-sofic", "build a sofic approximation");
  common(sofic_cmd, false);
  sofic_cmd->add_option("--kind", kind, "cycle, torus or random")->check(CLI::IsMember({"cycle", "torus", "random"}));
  sofic_cmd->add_option("--n", n, "number of vertices");
  sofic_cmd->add_option("--dims", dims, "torus side lengths");
  sofic_cmd->add_option("--rank", rank, "free group rank for random maps");
  sofic_cmd->add_option("--budget", budget, "radius budget (without --config)")->capture_default_str();
  auto* measure_cmd = app.add_subcommand("build-measure", "build the model measure");
  common(measure_cmd, true);
  auto* certify_cmd = app.add_subcommand("certify-mixing", "certify uniform model-mixing");
  common(certify_cmd, true);
  auto* diagnose_cmd = app.add_subcommand("diagnose-convergence", "local convergence diagnostics");
  common(diagnose_cmd, true);
  auto* lemmas_cmd = app.add_subcommand("check-lemmas", "entropy inequality checks");
  common(lemmas_cmd, true);
  auto* report_cmd = app.add_subcommand("report", "assemble the report");
  common(report_cmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (threads) kernels::set_thread_count(*threads);
    if (sofic_cmd->parsed() && config_path.empty()) {
      if (budget <= 0.0) throw ConfigError("--budget must be positive");
      SoficMap sigma = [&] {
        if (kind == "cycle") return build_cycle_sofic(n, budget);
        if (kind == "torus") return build_torus_sofic(dims, budget);
        return build_random_sofic(GroupPresentation(GroupKind::Free, rank), n, seed.value_or(0), budget);
      }();
      io::write_json(out / "sofic.json", io::sofic_to_json(sigma));
      std::cout << "build-sofic: wrote " << (out / "sofic.json").string() << '\n';
      return 0;
    }
    if (report_cmd->parsed()) {
      bool pass = stage_report(out, format);
      std::cout << "report: " << verdict(pass) << '\n';
      return pass ? 0 : 2;
    }
    ExperimentConfig cfg = load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (cap_enum) cfg.caps.enumeration = *cap_enum;
    if (!threads && cfg.threads > 0) kernels::set_thread_count(cfg.threads);
    if (run_cmd->parsed()) return run(cfg, out);
    if (sofic_cmd->parsed()) {
      stage_build_sofic(cfg, out);
      std::cout << "build-sofic: wrote " << (out / "sofic.json").string() << '\n';
      return 0;
    }
    if (measure_cmd->parsed()) {
      stage_build_measure(cfg, out);
      std::cout << "build-measure: wrote " << (out / "measure.json").string() << '\n';
      return 0;
    }
    bool pass = true;
    const char* name = "";
    if (certify_cmd->parsed()) {
      pass = stage_certify(cfg, out);
      name = "certify-mixing";
    } else if (diagnose_cmd->parsed()) {
      pass = stage_diagnose(cfg, out);
      name = "diagnose-convergence";
    } else if (lemmas_cmd->parsed()) {
      pass = stage_lemmas(cfg, out);
      name = "check-lemmas";
    }
    std::cout << name << ": " << verdict(pass) << '\n';
    return pass ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace sofent::cli
