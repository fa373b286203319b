#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cardiocausal/association.hpp"
#include "cardiocausal/graph.hpp"
#include "cardiocausal/mediation.hpp"
#include "cardiocausal/param_features.hpp"
#include "cardiocausal/record_io.hpp"
#include "cardiocausal/structure_search.hpp"

namespace cardiocausal {

/// Invalid run configuration (CLI exit code 3).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Failure affecting the whole cohort (CLI exit code 2).
class CohortError : public Error {
 public:
  using Error::Error;
};

enum class Method { GC, HC, Tabu, FGES, CAM };
std::string to_string(Method m);
std::optional<Method> parse_method(std::string_view name);

enum class InputKind { Signals, Params };
std::string to_string(InputKind k);

/// Exclude: derived columns (lnRMSSD, BR) never enter structure search and
/// are re-attached as isolated nodes. PostHoc: all ten columns are searched
/// and masked edges are deleted from the outputs.
enum class MaskMode { Exclude, PostHoc };
std::string to_string(MaskMode m);

struct MediationPath {
  Parameter x;
  Parameter m;
  Parameter y;
};

/// Parses "x,m,y" parameter names.
MediationPath parse_mediation_path(std::string_view text);

struct RunConfig {
  std::filesystem::path input;
  InputKind input_kind = InputKind::Params;
  std::vector<Position> positions{Position::Supine, Position::Standing};
  std::vector<Method> methods{Method::GC, Method::HC, Method::Tabu, Method::FGES, Method::CAM};
  MaskMode mask = MaskMode::Exclude;
  std::vector<MediationPath> mediation;
  SearchConfig search;
};

/// True for RMSSD-lnRMSSD and for BR with any of its five coefficients.
bool is_masked_pair(Parameter a, Parameter b);

struct EdgeVotes {
  std::set<std::string> supporting;  // methods asserting from -> to
  std::set<std::string> opposing;    // methods asserting to -> from
  std::set<std::string> undirected;  // methods with an undirected edge
};

struct ConsensusGraph {
  std::vector<std::string> nodes;
  std::map<std::pair<std::size_t, std::size_t>, EdgeVotes> edge_votes;  // only pairs with a vote
  std::size_t total_methods = 0;
};

/// Per ordered pair, the methods asserting that direction, the reverse, or
/// an undirected edge. Throws InvalidInput on mismatched node sets or a
/// repeated method name.
ConsensusGraph consensus(const std::vector<std::pair<std::string, MixedGraph>>& graphs,
                         const std::vector<std::string>& nodes);

/// Unordered pairs (a < b) with at least `min_votes` methods reporting an
/// edge of any kind between them.
std::vector<Edge> consensus_skeleton(const ConsensusGraph& g, std::size_t min_votes);

/// Graphviz view of a consensus: each voted pair drawn once in its
/// better-supported direction (undirected when only undirected votes exist),
/// labelled "support/oppose/undirected".
std::string consensus_dot(const ConsensusGraph& g, const std::string& graph_name);

struct MethodGraph {
  Method method;
  MixedGraph graph;  // over the ten parameters
};

struct PositionReport {
  Position position;
  std::size_t subjects = 0;
  CorrelationMatrix correlations{};
  std::vector<MethodGraph> methods;
  ConsensusGraph consensus;
  std::vector<MediationFit> mediation;
};

struct CausalReport {
  RunConfig config;
  ParameterTable params;
  std::vector<PairedTestResult> paired_tests;
  std::vector<PositionReport> positions;
  std::vector<std::string> warnings;
};

/// Recordings named `<subject>_<position>.csv` in `dir`, each turned into a
/// parameter row. A recording that fails is skipped with a warning.
ParameterTable extract_parameters(const std::filesystem::path& dir, std::vector<std::string>& warnings);

/// Ingestion, optional signal processing, paired statistics, correlation
/// matrices, structure methods, consensus and mediation for each position.
/// Throws ConfigError or CohortError on fatal problems.
CausalReport run_pipeline(const RunConfig& config);

/// Same, starting from an in-memory table (the input fields of the config
/// are echoed but not read).
CausalReport run_pipeline(const RunConfig& config, const ParameterTable& table, std::vector<std::string> warnings = {});

nlohmann::ordered_json to_json(const CausalReport& report);

/// Writes report.json, params.csv and per-position correlation, method and
/// consensus files into `dir` (created if needed).
void write_outputs(const CausalReport& report, const std::filesystem::path& dir);

}  // namespace cardiocausal
