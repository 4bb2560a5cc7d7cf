#include "sofent/io.hpp"

#include <fstream>
#include <sstream>

#include "sofent/error.hpp"

namespace sofent::io {

namespace {

template <typename T>
T field(const Json& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key))
    throw SchemaError(what + ": missing field \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw SchemaError(what + ": field \"" + key + "\" has the wrong type");
  }
}

OrderedJson atoms_to_json(const ExplicitMeasure& mu) {
  OrderedJson atoms = OrderedJson::array();
  for (const auto& [c, p] : mu.atoms()) atoms.push_back({{"config", c}, {"p", p}});
  return atoms;
}

std::vector<std::pair<Config, double>> atoms_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw SchemaError(what + ": atoms must be an array");
  std::vector<std::pair<Config, double>> atoms;
  for (const auto& a : j) atoms.emplace_back(field<Config>(a, "config", what), field<double>(a, "p", what));
  return atoms;
}

OrderedJson law_to_json(const BlockLaw& law) {
  if (const auto* m = std::get_if<MarkovLaw>(&law))
    return {{"type", "markov"},
            {"initial", m->initial},
            {"transition", matrix_to_json(m->transition)},
            {"offsets", m->offsets}};
  const auto& e = std::get<ExplicitMeasure>(law);
  return {{"type", "explicit"}, {"length", e.sites().size()}, {"atoms", atoms_to_json(e)}};
}

BlockLaw law_from_json(const Json& j, std::size_t alphabet) {
  auto type = field<std::string>(j, "type", "block law");
  if (type == "markov") {
    MarkovLaw law{field<std::vector<double>>(j, "initial", "markov law"),
                  matrix_from_json(j.at("transition")),
                  field<std::vector<std::size_t>>(j, "offsets", "markov law")};
    law.validate();
    return law;
  }
  if (type == "explicit") {
    auto length = field<std::size_t>(j, "length", "explicit law");
    std::vector<Vertex> sites(length);
    for (std::size_t i = 0; i < length; ++i) sites[i] = static_cast<Vertex>(i);
    return ExplicitMeasure(alphabet, std::move(sites), atoms_from_json(j.at("atoms"), "explicit law"));
  }
  throw SchemaError("block law: unknown type \"" + type + "\"");
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

void require_version(const Json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("version"))
    throw SchemaError(what + ": missing \"version\"");
  if (!j.at("version").is_number_integer() || j.at("version").get<int>() != kSchemaVersion)
    throw SchemaError(what + ": unsupported version (expected " + std::to_string(kSchemaVersion) + ")");
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const OrderedJson& j) {
  write_text(path, j.dump(2) + "\n");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

OrderedJson group_to_json(const GroupPresentation& group) {
  return {{"kind", group.kind() == GroupKind::FreeAbelian ? "abelian" : "free"},
          {"rank", group.rank()},
          {"weights", group.weights()}};
}

GroupPresentation group_from_json(const Json& j) {
  auto kind = field<std::string>(j, "kind", "group");
  auto rank = field<int>(j, "rank", "group");
  std::vector<double> weights;
  if (j.contains("weights")) weights = field<std::vector<double>>(j, "weights", "group");
  if (kind == "abelian") return GroupPresentation(GroupKind::FreeAbelian, rank, weights);
  if (kind == "free") return GroupPresentation(GroupKind::Free, rank, weights);
  throw SchemaError("group: kind must be \"abelian\" or \"free\"");
}

std::vector<GroupWord> words_from_json(const GroupPresentation& group, const Json& j) {
  if (!j.is_array()) throw SchemaError("word list must be an array of strings");
  std::vector<GroupWord> out;
  for (const auto& w : j) {
    if (!w.is_string()) throw SchemaError("words must be strings");
    out.push_back(group.parse_word(w.get<std::string>()));
  }
  return out;
}

OrderedJson words_to_json(std::span<const GroupWord> words) {
  OrderedJson out = OrderedJson::array();
  for (const auto& g : words) out.push_back(word_key(g));
  return out;
}

OrderedJson matrix_to_json(const Matrix& m) {
  OrderedJson rows = OrderedJson::array();
  for (std::size_t i = 0; i < m.k; ++i) {
    auto row = m.row(i);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw SchemaError("matrix must be a nonempty array of rows");
  Matrix m{j.size(), {}};
  for (const auto& row : j) {
    auto values = row.get<std::vector<double>>();
    if (values.size() != m.k) throw SchemaError("matrix must be square");
    m.a.insert(m.a.end(), values.begin(), values.end());
  }
  return m;
}

OrderedJson sofic_to_json(const SoficMap& sigma) {
  OrderedJson gens = OrderedJson::array();
  for (const auto& p : sigma.generators())
    gens.push_back(std::vector<Vertex>(p.images().begin(), p.images().end()));
  OrderedJson overrides = OrderedJson::object();
  for (const auto& [g, p] : sigma.overrides())
    overrides[word_key(g)] = std::vector<Vertex>(p.images().begin(), p.images().end());
  return {{"version", kSchemaVersion},
          {"group", group_to_json(sigma.group())},
          {"n", sigma.size()},
          {"budget", sigma.budget()},
          {"generators", gens},
          {"overrides", overrides}};
}

SoficMap sofic_from_json(const Json& j) {
  require_version(j, "sofic");
  auto group = group_from_json(j.at("group"));
  auto n = field<std::size_t>(j, "n", "sofic");
  auto budget = field<double>(j, "budget", "sofic");
  std::vector<Permutation> gens;
  for (const auto& g : field<std::vector<std::vector<Vertex>>>(j, "generators", "sofic"))
    gens.emplace_back(g);
  std::map<GroupWord, Permutation> overrides;
  if (j.contains("overrides"))
    for (const auto& [key, images] : j.at("overrides").items())
      overrides.emplace(group.parse_word(key), Permutation(images.get<std::vector<Vertex>>()));
  return SoficMap(std::move(group), n, budget, std::move(gens), std::move(overrides));
}

OrderedJson measure_to_json(const Measure& mu) {
  if (const auto* e = std::get_if<ExplicitMeasure>(&mu))
    return {{"version", kSchemaVersion},
            {"kind", "explicit"},
            {"alphabet", e->alphabet()},
            {"sites", e->sites()},
            {"atoms", atoms_to_json(*e)}};
  const auto& bp = std::get<BlockProductMeasure>(mu);
  OrderedJson j = {{"version", kSchemaVersion},
                   {"kind", "block_product"},
                   {"alphabet", bp.alphabet()},
                   {"sites", bp.sites()}};
  OrderedJson blocks = OrderedJson::array();
  std::vector<std::size_t> block_laws;
  for (const auto& b : bp.blocks()) {
    blocks.push_back(b.vertices);
    block_laws.push_back(b.law);
  }
  j["blocks"] = blocks;
  if (bp.laws().size() == 1) {
    j["law"] = law_to_json(bp.laws()[0]);
  } else {
    OrderedJson laws = OrderedJson::array();
    for (const auto& law : bp.laws()) laws.push_back(law_to_json(law));
    j["laws"] = laws;
    j["block_laws"] = block_laws;
  }
  std::vector<Vertex> fv;
  std::vector<Symbol> fs;
  for (const auto& [v, s] : bp.filler()) {
    fv.push_back(v);
    fs.push_back(s);
  }
  j["filler"] = {{"vertices", fv}, {"symbols", fs}};
  return j;
}

Measure measure_from_json(const Json& j) {
  require_version(j, "measure");
  auto kind = field<std::string>(j, "kind", "measure");
  auto alphabet = field<std::size_t>(j, "alphabet", "measure");
  auto sites = field<std::vector<Vertex>>(j, "sites", "measure");
  if (kind == "explicit")
    return ExplicitMeasure(alphabet, std::move(sites), atoms_from_json(j.at("atoms"), "measure"));
  if (kind != "block_product") throw SchemaError("measure: unknown kind \"" + kind + "\"");
  std::vector<BlockLaw> laws;
  std::vector<std::size_t> block_laws;
  auto blocks_raw = field<std::vector<std::vector<Vertex>>>(j, "blocks", "measure");
  if (j.contains("law")) {
    laws.push_back(law_from_json(j.at("law"), alphabet));
    block_laws.assign(blocks_raw.size(), 0);
  } else {
    for (const auto& l : j.at("laws")) laws.push_back(law_from_json(l, alphabet));
    block_laws = field<std::vector<std::size_t>>(j, "block_laws", "measure");
    if (block_laws.size() != blocks_raw.size()) throw SchemaError("measure: block_laws length mismatch");
  }
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < blocks_raw.size(); ++i) blocks.push_back({std::move(blocks_raw[i]), block_laws[i]});
  std::vector<std::pair<Vertex, Symbol>> filler;
  if (j.contains("filler")) {
    auto fv = field<std::vector<Vertex>>(j.at("filler"), "vertices", "filler");
    auto fs = field<std::vector<Symbol>>(j.at("filler"), "symbols", "filler");
    if (fv.size() != fs.size()) throw SchemaError("filler: vertices and symbols differ in length");
    for (std::size_t i = 0; i < fv.size(); ++i) filler.emplace_back(fv[i], fs[i]);
  }
  return BlockProductMeasure(alphabet, std::move(sites), std::move(laws), std::move(blocks),
                             std::move(filler));
}

OrderedJson partition_to_json(const PathPartition& partition) {
  return {{"version", kSchemaVersion},
          {"l", partition.l},
          {"vertex_count", partition.vertex_count},
          {"paths", partition.paths},
          {"leftover", partition.leftover}};
}

PathPartition partition_from_json(const Json& j) {
  require_version(j, "partition");
  PathPartition p;
  p.l = field<std::size_t>(j, "l", "partition");
  p.paths = field<std::vector<std::vector<Vertex>>>(j, "paths", "partition");
  p.leftover = field<std::vector<Vertex>>(j, "leftover", "partition");
  p.vertex_count = j.contains("vertex_count") ? field<std::size_t>(j, "vertex_count", "partition")
                                              : p.paths.size() * p.l + p.leftover.size();
  p.validate();
  return p;
}

OrderedJson process_to_json(const ProcessOracle& process) {
  if (const auto* b = dynamic_cast<const BernoulliProcess*>(&process))
    return {{"type", "bernoulli"}, {"eta", b->eta()}, {"group", group_to_json(b->group())}};
  if (const auto* m = dynamic_cast<const MarkovProcess*>(&process))
    return {{"type", "markov"},
            {"transition", matrix_to_json(m->transition())},
            {"stationary", m->stationary()}};
  if (const auto* c = dynamic_cast<const CoinducedProcess*>(&process))
    return {{"type", "coinduced"},
            {"base", process_to_json(c->base())},
            {"h", word_key(c->h())},
            {"group", group_to_json(c->group())}};
  throw Error("process_to_json: unknown process type");
}

ProcessPtr process_from_json(const Json& j) {
  auto type = field<std::string>(j, "type", "process");
  if (type == "bernoulli") {
    GroupPresentation group = j.contains("group") ? group_from_json(j.at("group"))
                                                  : GroupPresentation::integers();
    return bernoulli_process(field<std::vector<double>>(j, "eta", "process"), std::move(group));
  }
  if (type == "markov") {
    if (!j.contains("transition")) throw SchemaError("process: missing field \"transition\"");
    return markov_process(matrix_from_json(j.at("transition")),
                          field<std::vector<double>>(j, "stationary", "process"));
  }
  // Shorthand for the symmetric two-state chain.
  if (type == "flip") {
    return std::make_shared<MarkovProcess>(MarkovProcess::symmetric_flip(field<double>(j, "flip", "process")));
  }
  if (type == "coinduced") {
    auto group = group_from_json(j.at("group"));
    auto h = group.parse_word(field<std::string>(j, "h", "process"));
    return coinduce(process_from_json(j.at("base")), std::move(h), std::move(group));
  }
  throw SchemaError("process: unknown type \"" + type + "\"");
}

OrderedJson mixing_radius_to_json(const MixingRadius& m) {
  OrderedJson rows = OrderedJson::array();
  for (const auto& r : m.rows)
    rows.push_back({{"gap", r.gap}, {"q", r.q}, {"joint_entropy", r.joint_entropy},
                    {"target", r.target}, {"pass", r.pass}});
  OrderedJson j = {{"window", m.window},
                   {"epsilon", m.epsilon},
                   {"q_max", m.q_max},
                   {"gap_cap", m.gap_cap},
                   {"window_entropy", m.window_entropy},
                   {"family", m.family}};
  j["radius"] = m.radius ? OrderedJson(*m.radius) : OrderedJson("not found");
  j["rows"] = rows;
  return j;
}

OrderedJson certificate_to_json(const MixingCertificate& cert) {
  OrderedJson sets = OrderedJson::array();
  for (const auto& s : cert.sets)
    sets.push_back({{"origin", s.origin},
                    {"size", s.members.size()},
                    {"separated", s.separated},
                    {"maximal", s.maximal},
                    {"orbit_size", s.orbit_size},
                    {"entropy", s.entropy},
                    {"ratio", s.ratio},
                    {"target", s.target},
                    {"verdict", s.pass ? "PASS" : "FAIL"},
                    {"members", s.members}});
  return {{"version", kSchemaVersion},
          {"F", words_to_json(cert.F)},
          {"epsilon", cert.epsilon},
          {"r", cert.r},
          {"window", cert.window_description},
          {"window_size", cert.window_size},
          {"process_entropy", cert.process_entropy},
          {"tested_family", "greedy maximal separated sets (ascending, descending, seeded random orders) and user sets"},
          {"sets", sets},
          {"verdict", cert.pass ? "PASS" : "FAIL"}};
}

std::string certificate_csv(const MixingCertificate& cert) {
  std::ostringstream os;
  os << "origin,size,separated,maximal,orbit_size,entropy,ratio,target,verdict\n";
  for (const auto& s : cert.sets)
    os << s.origin << ',' << s.members.size() << ',' << (s.separated ? 1 : 0) << ','
       << (s.maximal ? 1 : 0) << ',' << s.orbit_size << ',' << fmt(s.entropy) << ','
       << fmt(s.ratio) << ',' << fmt(s.target) << ',' << (s.pass ? "PASS" : "FAIL") << '\n';
  return os.str();
}

OrderedJson lemma1_to_json(const Lemma1Report& rep) {
  return {{"sites", rep.sites},       {"epsilon", rep.epsilon},
          {"entropy", rep.entropy},   {"cov", rep.cov},
          {"log_cov", rep.log_cov},   {"log_universe", rep.log_universe},
          {"h_epsilon", rep.h_epsilon}, {"bound", rep.bound},
          {"verdict", rep.pass ? "PASS" : "FAIL"}};
}

OrderedJson lemma4_to_json(const Lemma4Report& rep) {
  return {{"S", rep.S},
          {"h_alpha", rep.h_alpha},
          {"h_beta", rep.h_beta},
          {"sum_conditional", rep.sum_conditional},
          {"rhs", rep.rhs},
          {"slack", rep.slack},
          {"verdict", rep.pass ? "PASS" : "FAIL"}};
}

OrderedJson convergence_to_json(const ConvergenceReport& rep, bool include_vertices) {
  OrderedJson j = {{"version", kSchemaVersion},
                   {"F", words_to_json(rep.F)},
                   {"delta", rep.delta},
                   {"examined", rep.examined},
                   {"below_delta", rep.below_delta},
                   {"fraction", rep.fraction},
                   {"zero_tv", rep.zero_tv},
                   {"zero_fraction", rep.zero_fraction},
                   {"max_tv", rep.max_tv},
                   {"histogram", rep.histogram}};
  if (include_vertices) {
    j["vertices"] = rep.vertices;
    j["tv"] = rep.tv;
  }
  return j;
}

OrderedJson theorem1_to_json(const Theorem1Report& rep) {
  return {{"version", kSchemaVersion},
          {"r", rep.r},
          {"epsilon", rep.epsilon},
          {"K", rep.K},
          {"vertices", rep.vertices},
          {"W", rep.window_size},
          {"W_small_balls", rep.small_balls},
          {"Y", rep.y_size},
          {"S", rep.s_size},
          {"separated", rep.separated},
          {"covering_inequality", rep.covering_pass ? "PASS" : "FAIL"},
          {"process_entropy", rep.process_entropy},
          {"pushforward_entropy", rep.pushforward_entropy},
          {"per_vertex_entropy", rep.per_vertex_entropy},
          {"scaled_target", rep.scaled_target},
          {"entropy_kind", rep.exact ? "exact" : "estimate"},
          {"samples", rep.samples},
          {"verdict", rep.pass ? "PASS" : "FAIL"}};
}

}  // namespace sofent::io
