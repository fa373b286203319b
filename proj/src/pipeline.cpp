#include "cardiocausal/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "cardiocausal/cardio_signals.hpp"
#include "cardiocausal/resp_signals.hpp"

namespace cardiocausal {

namespace {

constexpr std::size_t kMinSubjects = 4;
constexpr std::size_t kMinPairs = 8;

constexpr std::array<Parameter, 5> kBrInputs = {Parameter::ciRR, Parameter::cInsT, Parameter::cExpT,
                                                Parameter::cInsV, Parameter::cExpV};

std::vector<std::string> parameter_names() { return {kParameterNames.begin(), kParameterNames.end()}; }

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

Eigen::MatrixXd design_matrix(const std::vector<ParameterRow>& rows, const std::vector<Parameter>& columns) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][columns[j]];
    }
  }
  return m;
}

/// Maps a graph over `columns` onto the ten parameters and drops masked edges.
MixedGraph lift(const MixedGraph& g, const std::vector<Parameter>& columns) {
  MixedGraph out;
  out.nodes = kParameterCount;
  for (const auto& e : g.directed) {
    const auto a = columns[e.from];
    const auto b = columns[e.to];
    if (!is_masked_pair(a, b)) out.directed.push_back({index_of(a), index_of(b)});
  }
  for (const auto& e : g.undirected) {
    const auto a = index_of(columns[e.from]);
    const auto b = index_of(columns[e.to]);
    if (!is_masked_pair(columns[e.from], columns[e.to])) out.undirected.push_back({std::min(a, b), std::max(a, b)});
  }
  std::sort(out.directed.begin(), out.directed.end());
  std::sort(out.undirected.begin(), out.undirected.end());
  return out;
}

MixedGraph run_method(Method m, const Eigen::MatrixXd& data, const std::vector<std::string>& names,
                      const SearchConfig& search, std::vector<std::string>& warnings, const std::string& context) {
  switch (m) {
    case Method::GC: {
      auto r = gc_graph(data, names);
      for (auto& w : r.warnings) warnings.push_back(context + ": " + w);
      return r.graph;
    }
    case Method::HC:
      return MixedGraph::from(hill_climb(data, search));
    case Method::Tabu:
      return MixedGraph::from(tabu_search(data, search));
    case Method::FGES:
      return MixedGraph::from(fges(data, search));
    case Method::CAM:
      return MixedGraph::from(cam_learn(data, search));
  }
  return {};
}

nlohmann::ordered_json edge_list(const std::vector<Edge>& edges, const std::vector<std::string>& names) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& e : edges) out.push_back({names[e.from], names[e.to]});
  return out;
}

nlohmann::ordered_json search_json(const SearchConfig& s) {
  nlohmann::ordered_json j;
  j["score"] = "gaussian_bic";
  j["max_parents"] = s.max_parents;
  j["tabu_length"] = s.tabu_length;
  j["tabu_max_stalls"] = s.tabu_max_stalls;
  j["random_restarts"] = s.random_restarts;
  j["cam_prune_alpha"] = s.cam_prune_alpha;
  j["seed"] = s.seed;
  return j;
}

std::string path_text(const MediationPath& p) {
  return std::string(name_of(p.x)) + "," + std::string(name_of(p.m)) + "," + std::string(name_of(p.y));
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::GC: return "gc";
    case Method::HC: return "hc";
    case Method::Tabu: return "tabu";
    case Method::FGES: return "fges";
    case Method::CAM: return "cam";
  }
  return "";
}

std::optional<Method> parse_method(std::string_view name) {
  for (auto m : {Method::GC, Method::HC, Method::Tabu, Method::FGES, Method::CAM}) {
    if (lower(name) == to_string(m)) return m;
  }
  return std::nullopt;
}

std::string to_string(InputKind k) { return k == InputKind::Signals ? "signals" : "params"; }

std::string to_string(MaskMode m) { return m == MaskMode::Exclude ? "exclude" : "post-hoc"; }

MediationPath parse_mediation_path(std::string_view text) {
  std::vector<Parameter> parts;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    const auto token = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    const auto p = parse_parameter(token);
    if (!p) throw ConfigError("unknown parameter in mediation path: '" + std::string(token) + "'");
    parts.push_back(*p);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (parts.size() != 3) throw ConfigError("mediation path needs exactly three parameters x,m,y");
  if (parts[0] == parts[1] || parts[1] == parts[2] || parts[0] == parts[2]) {
    throw ConfigError("mediation path parameters must be distinct");
  }
  return {parts[0], parts[1], parts[2]};
}

bool is_masked_pair(Parameter a, Parameter b) {
  auto one_way = [](Parameter x, Parameter y) {
    if (x == Parameter::RMSSD && y == Parameter::lnRMSSD) return true;
    return x == Parameter::BR && std::find(kBrInputs.begin(), kBrInputs.end(), y) != kBrInputs.end();
  };
  return one_way(a, b) || one_way(b, a);
}

ConsensusGraph consensus(const std::vector<std::pair<std::string, MixedGraph>>& graphs,
                         const std::vector<std::string>& nodes) {
  if (graphs.empty()) throw InvalidInput("consensus needs at least one graph");
  ConsensusGraph out;
  out.nodes = nodes;
  out.total_methods = graphs.size();
  std::set<std::string> seen;
  for (const auto& [method, g] : graphs) {
    if (g.nodes != nodes.size()) throw InvalidInput("graph node set does not match consensus nodes");
    if (!seen.insert(method).second) throw InvalidInput("method listed twice in consensus: " + method);
    for (const auto& e : g.directed) {
      out.edge_votes[{e.from, e.to}].supporting.insert(method);
      out.edge_votes[{e.to, e.from}].opposing.insert(method);
    }
    for (const auto& e : g.undirected) {
      out.edge_votes[{e.from, e.to}].undirected.insert(method);
      out.edge_votes[{e.to, e.from}].undirected.insert(method);
    }
  }
  return out;
}

std::vector<Edge> consensus_skeleton(const ConsensusGraph& g, std::size_t min_votes) {
  std::vector<Edge> out;
  for (const auto& [key, v] : g.edge_votes) {
    if (key.first >= key.second) continue;
    std::set<std::string> any = v.supporting;
    any.insert(v.opposing.begin(), v.opposing.end());
    any.insert(v.undirected.begin(), v.undirected.end());
    if (any.size() >= min_votes) out.push_back({key.first, key.second});
  }
  return out;
}

std::string consensus_dot(const ConsensusGraph& g, const std::string& graph_name) {
  std::ostringstream os;
  os << "digraph \"" << graph_name << "\" {\n";
  for (const auto& name : g.nodes) os << "  \"" << name << "\";\n";
  for (const auto& [key, v] : g.edge_votes) {
    if (key.first >= key.second) continue;
    const auto s = v.supporting.size();
    const auto o = v.opposing.size();
    const auto u = v.undirected.size();
    const auto& a = g.nodes[key.first];
    const auto& b = g.nodes[key.second];
    if (s == 0 && o == 0) {
      os << "  \"" << a << "\" -> \"" << b << "\" [dir=none, label=\"0/0/" << u << "\"];\n";
    } else if (s >= o) {
      os << "  \"" << a << "\" -> \"" << b << "\" [label=\"" << s << "/" << o << "/" << u << "\"];\n";
    } else {
      os << "  \"" << b << "\" -> \"" << a << "\" [label=\"" << o << "/" << s << "/" << u << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

ParameterTable extract_parameters(const std::filesystem::path& dir, std::vector<std::string>& warnings) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  ParameterTable table;
  for (const auto& f : files) {
    try {
      const auto rec = load_signal_record(f);
      const auto ecg = detrend_ecg(rec.ecg, rec.sample_rate_hz);
      const auto beats = detect_r_peaks(ecg, rec.sample_rate_hz);
      const auto cardiac = cardiac_params(rr_intervals(beats));
      const auto ip = remove_cardiac_component(rec.ip, rec.ecg, rec.sample_rate_hz);
      const auto resp = respiratory_params(delimit_breaths(ip, rec.sample_rate_hz));
      table.add({rec.subject_id, rec.position, assemble_params(cardiac, resp).values()});
    } catch (const Error& e) {
      warnings.push_back("recording " + f.filename().string() + " skipped: " + e.what());
    }
  }
  return table;
}

CausalReport run_pipeline(const RunConfig& config) {
  std::vector<std::string> warnings;
  ParameterTable table;
  const auto& in = config.input;
  if (!std::filesystem::exists(in)) throw ConfigError("input does not exist: " + in.string());
  try {
    if (config.input_kind == InputKind::Signals) {
      if (!std::filesystem::is_directory(in)) throw ConfigError("signal input must be a directory");
      table = extract_parameters(in, warnings);
    } else {
      const auto file = std::filesystem::is_directory(in) ? in / "params.csv" : in;
      if (!std::filesystem::exists(file)) throw ConfigError("no params.csv in input directory");
      table = load_parameter_table(file);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw CohortError(std::string("cannot load cohort: ") + e.what());
  }
  return run_pipeline(config, table, std::move(warnings));
}

CausalReport run_pipeline(const RunConfig& config, const ParameterTable& table, std::vector<std::string> warnings) {
  if (config.positions.empty()) throw ConfigError("no positions selected");
  if (config.methods.empty()) throw ConfigError("no methods selected");
  for (std::size_t i = 0; i < config.methods.size(); ++i) {
    for (std::size_t j = i + 1; j < config.methods.size(); ++j) {
      if (config.methods[i] == config.methods[j]) throw ConfigError("method listed twice: " + to_string(config.methods[i]));
    }
  }
  if (config.search.max_parents == 0 || config.search.tabu_length == 0 || config.search.tabu_max_stalls == 0) {
    throw ConfigError("search limits must be positive");
  }

  CausalReport report;
  report.config = config;
  report.params = table;
  report.warnings = std::move(warnings);

  for (auto pos : config.positions) {
    if (table.rows_for(pos).size() < kMinSubjects) {
      throw CohortError("position " + std::string(name_of(pos)) + " has fewer than 4 subjects");
    }
  }

  // Paired position statistics over subjects recorded in both positions.
  std::map<std::string, ParamValues> supine;
  for (const auto& r : table.rows_for(Position::Supine)) supine[r.subject_id] = r.values;
  std::vector<ParamValues> sup, sta;
  for (const auto& r : table.rows_for(Position::Standing)) {
    if (auto it = supine.find(r.subject_id); it != supine.end()) {
      sup.push_back(it->second);
      sta.push_back(r.values);
    }
  }
  if (sup.size() >= kMinPairs) {
    for (auto p : kAllParameters) {
      std::vector<double> a, b;
      for (std::size_t i = 0; i < sup.size(); ++i) {
        a.push_back(sup[i][index_of(p)]);
        b.push_back(sta[i][index_of(p)]);
      }
      try {
        report.paired_tests.push_back(paired_compare(a, b, p));
      } catch (const Error& e) {
        report.warnings.push_back("paired test " + std::string(name_of(p)) + " skipped: " + e.what());
      }
    }
  } else {
    report.warnings.push_back("paired position tests skipped: fewer than 8 subjects recorded in both positions");
  }

  std::vector<Parameter> columns;
  for (auto p : kAllParameters) {
    if (config.mask == MaskMode::Exclude && (p == Parameter::lnRMSSD || p == Parameter::BR)) continue;
    columns.push_back(p);
  }
  std::vector<std::string> column_names;
  for (auto p : columns) column_names.emplace_back(name_of(p));

  for (auto pos : config.positions) {
    PositionReport pr;
    pr.position = pos;
    const auto rows = table.rows_for(pos);
    pr.subjects = rows.size();
    pr.correlations = correlation_matrix(table, pos);
    const auto data = design_matrix(rows, columns);
    const std::string where(name_of(pos));

    std::vector<std::pair<std::string, MixedGraph>> voting;
    for (auto m : config.methods) {
      try {
        const auto g = lift(run_method(m, data, column_names, config.search, report.warnings, where), columns);
        pr.methods.push_back({m, g});
        voting.emplace_back(to_string(m), g);
      } catch (const Error& e) {
        report.warnings.push_back(where + ": method " + to_string(m) + " failed: " + e.what());
      }
    }
    if (voting.empty()) throw CohortError("no structure method succeeded for position " + where);
    pr.consensus = consensus(voting, parameter_names());

    for (const auto& path : config.mediation) {
      try {
        pr.mediation.push_back(mediation_fit(table.column(path.x, pos), table.column(path.m, pos),
                                             table.column(path.y, pos),
                                             {std::string(name_of(path.x)), std::string(name_of(path.m)),
                                              std::string(name_of(path.y))}));
      } catch (const Error& e) {
        report.warnings.push_back(where + ": mediation " + path_text(path) + " skipped: " + e.what());
      }
    }
    report.positions.push_back(std::move(pr));
  }
  return report;
}

nlohmann::ordered_json to_json(const CausalReport& report) {
  using json = nlohmann::ordered_json;
  const auto names = parameter_names();
  const auto& c = report.config;
  json j;

  json cfg;
  cfg["input"] = c.input.generic_string();
  cfg["input_kind"] = to_string(c.input_kind);
  cfg["positions"] = json::array();
  for (auto p : c.positions) cfg["positions"].push_back(std::string(name_of(p)));
  cfg["methods"] = json::array();
  for (auto m : c.methods) cfg["methods"].push_back(to_string(m));
  cfg["mask_derived"] = to_string(c.mask);
  cfg["mediation"] = json::array();
  for (const auto& p : c.mediation) cfg["mediation"].push_back(path_text(p));
  cfg["search"] = search_json(c.search);
  j["config"] = cfg;

  j["paired_tests"] = json::array();
  for (const auto& t : report.paired_tests) {
    j["paired_tests"].push_back({{"parameter", std::string(name_of(t.parameter))},
                                 {"test", to_string(t.test_used)},
                                 {"statistic", t.statistic},
                                 {"p_value", t.p_value},
                                 {"normality_p", t.normality_p}});
  }

  json positions = json::object();
  for (const auto& pr : report.positions) {
    json pj;
    pj["subjects"] = pr.subjects;
    json corr = json::object();
    for (std::size_t a = 0; a < kParameterCount; ++a) {
      json row = json::object();
      for (std::size_t b = 0; b < kParameterCount; ++b) {
        const auto& v = pr.correlations[a][b];
        row[names[b]] = v ? json(*v) : json(nullptr);
      }
      corr[names[a]] = row;
    }
    pj["correlations"] = corr;

    json methods = json::object();
    for (const auto& mg : pr.methods) {
      methods[to_string(mg.method)] = {{"method", to_string(mg.method)},
                                       {"position", std::string(name_of(pr.position))},
                                       {"nodes", names},
                                       {"directed", edge_list(mg.graph.directed, names)},
                                       {"undirected", edge_list(mg.graph.undirected, names)},
                                       {"search", search_json(c.search)}};
    }
    pj["methods"] = methods;

    json cons;
    cons["total_methods"] = pr.consensus.total_methods;
    cons["edges"] = json::array();
    for (const auto& [key, v] : pr.consensus.edge_votes) {
      cons["edges"].push_back({{"from", names[key.first]},
                               {"to", names[key.second]},
                               {"supporting", v.supporting},
                               {"opposing", v.opposing},
                               {"undirected", v.undirected}});
    }
    pj["consensus"] = cons;

    pj["mediation"] = json::array();
    for (const auto& f : pr.mediation) {
      pj["mediation"].push_back({{"path", f.path},
                                 {"a_hat", f.a_hat},
                                 {"se_a", f.se_a},
                                 {"b_hat", f.b_hat},
                                 {"se_b", f.se_b},
                                 {"direct_effect", f.direct_effect},
                                 {"indirect_effect", f.indirect_effect},
                                 {"sobel_z", f.sobel_z},
                                 {"sobel_p", f.sobel_p}});
    }
    positions[std::string(name_of(pr.position))] = pj;
  }
  j["positions"] = positions;
  j["warnings"] = report.warnings;
  return j;
}

void write_outputs(const CausalReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / name).string());
    out << text;
  };
  write("report.json", to_json(report).dump(2) + "\n");
  write_parameter_table(dir / "params.csv", report.params);
  const auto names = parameter_names();
  for (const auto& pr : report.positions) {
    const std::string pos(name_of(pr.position));
    write("correlations_" + pos + ".csv", correlation_csv(pr.correlations));
    write("consensus_" + pos + ".dot", consensus_dot(pr.consensus, "consensus_" + pos));
    for (const auto& mg : pr.methods) {
      const auto label = "method_" + to_string(mg.method) + "_" + pos;
      write(label + ".dot", to_dot(mg.graph, names, label));
    }
  }
}

}  // namespace cardiocausal
