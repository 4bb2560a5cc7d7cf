#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "sofent/construction.hpp"
#include "sofent/group.hpp"
#include "sofent/measures.hpp"
#include "sofent/processes.hpp"
#include "sofent/sofic.hpp"
#include "sofent/verify.hpp"

namespace sofent::io {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Throws SchemaError on a missing or different version.
void require_version(const Json& j, const std::string& what);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const OrderedJson& j);
void write_text(const std::filesystem::path& path, const std::string& text);

OrderedJson group_to_json(const GroupPresentation& group);
GroupPresentation group_from_json(const Json& j);

std::vector<GroupWord> words_from_json(const GroupPresentation& group, const Json& j);
OrderedJson words_to_json(std::span<const GroupWord> words);

OrderedJson matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

OrderedJson sofic_to_json(const SoficMap& sigma);
SoficMap sofic_from_json(const Json& j);

OrderedJson measure_to_json(const Measure& mu);
Measure measure_from_json(const Json& j);

OrderedJson partition_to_json(const PathPartition& partition);
PathPartition partition_from_json(const Json& j);

OrderedJson process_to_json(const ProcessOracle& process);
ProcessPtr process_from_json(const Json& j);

OrderedJson mixing_radius_to_json(const MixingRadius& m);
OrderedJson certificate_to_json(const MixingCertificate& cert);
std::string certificate_csv(const MixingCertificate& cert);
OrderedJson lemma1_to_json(const Lemma1Report& rep);
OrderedJson lemma4_to_json(const Lemma4Report& rep);
OrderedJson convergence_to_json(const ConvergenceReport& rep, bool include_vertices = false);
OrderedJson theorem1_to_json(const Theorem1Report& rep);

}  // namespace sofent::io
