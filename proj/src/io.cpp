#include "vibnet/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "vibnet/errors.hpp"

namespace vibnet::io {

namespace {

void expect_object(const json& doc, const std::string& where,
                   const std::set<std::string>& required,
                   const std::set<std::string>& optional = {}) {
  if (!doc.is_object()) throw ParseError(where, "expected an object");
  for (const auto& [key, value] : doc.items()) {
    if (!required.count(key) && !optional.count(key)) {
      throw ParseError(where, "unknown key \"" + key + "\"");
    }
  }
  for (const auto& key : required) {
    if (!doc.contains(key)) {
      throw ParseError(where, "missing key \"" + key + "\"");
    }
  }
}

const json& expect_array(const json& doc, const std::string& key,
                         const std::string& where) {
  const auto& value = doc.at(key);
  if (!value.is_array()) throw ParseError(where + "." + key, "expected an array");
  return value;
}

double get_number(const json& doc, const std::string& key,
                  const std::string& where) {
  const auto& value = doc.at(key);
  if (!value.is_number()) {
    throw ParseError(where + "." + key, "expected a number");
  }
  const double x = value.get<double>();
  if (!std::isfinite(x)) throw ParseError(where + "." + key, "not finite");
  return x;
}

int get_index(const json& doc, const std::string& key, const std::string& where,
              int n) {
  const auto& value = doc.at(key);
  if (!value.is_number_integer()) {
    throw ParseError(where + "." + key, "expected an integer node id");
  }
  const auto id = value.get<long long>();
  if (id < 1 || id > n) {
    throw ParseError(where + "." + key,
                     "node id " + std::to_string(id) + " outside 1.." +
                         std::to_string(n));
  }
  return static_cast<int>(id) - 1;
}

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ":" + std::to_string(column);
}

}  // namespace

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(line_column(text, e.byte), "malformed JSON");
  }
}

NetworkSystem network_from_json(const json& doc) {
  expect_object(doc, "$", {"nodes", "edges"});
  const auto& nodes = expect_array(doc, "nodes", "$");
  const auto& edges = expect_array(doc, "edges", "$");
  const int n = static_cast<int>(nodes.size());
  if (n == 0) throw ParseError("$.nodes", "at least one node is required");

  std::vector<double> d(n, 0.0);
  std::vector<bool> seen(n, false);
  for (int k = 0; k < n; ++k) {
    const std::string where = "$.nodes[" + std::to_string(k) + "]";
    expect_object(nodes[k], where, {"id", "d"});
    const int id = get_index(nodes[k], "id", where, n);
    if (seen[id]) throw ParseError(where + ".id", "duplicate node id");
    seen[id] = true;
    d[id] = get_number(nodes[k], "d", where);
  }

  std::vector<WeightedEdge> parsed;
  std::set<std::pair<int, int>> pairs;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::string where = "$.edges[" + std::to_string(k) + "]";
    expect_object(edges[k], where, {"from", "to", "weight"});
    const int from = get_index(edges[k], "from", where, n);
    const int to = get_index(edges[k], "to", where, n);
    const double w = get_number(edges[k], "weight", where);
    if (from == to) throw ParseError(where, "self-loop; use the node's d");
    if (w == 0.0) throw ParseError(where + ".weight", "zero-weight edge");
    if (!pairs.emplace(from, to).second) {
      throw ParseError(where, "duplicate edge " + std::to_string(from + 1) +
                                  "->" + std::to_string(to + 1));
    }
    parsed.push_back({from, to, w});
  }
  return NetworkSystem(std::move(d), std::move(parsed));
}

json network_to_json(const NetworkSystem& sys) {
  json nodes = json::array();
  for (int i = 0; i < sys.size(); ++i) {
    nodes.push_back({{"id", i + 1}, {"d", sys.intrinsic()[i]}});
  }
  json edges = json::array();
  for (const auto& e : sys.edges()) {
    edges.push_back({{"from", e.from + 1}, {"to", e.to + 1}, {"weight", e.weight}});
  }
  return {{"nodes", nodes}, {"edges", edges}};
}

VibrationSchedule schedule_from_json(const json& doc) {
  expect_object(doc, "$", {"epsilon", "entries"});
  const double epsilon = get_number(doc, "epsilon", "$");
  const auto& entries = expect_array(doc, "entries", "$");
  std::vector<ScheduleEntry> parsed;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const std::string where = "$.entries[" + std::to_string(k) + "]";
    expect_object(entries[k], where, {"row", "col", "mu", "omega"}, {"phi"});
    ScheduleEntry e;
    constexpr int kNoLimit = 1 << 30;
    e.row = get_index(entries[k], "row", where, kNoLimit);
    e.col = get_index(entries[k], "col", where, kNoLimit);
    e.mu = get_number(entries[k], "mu", where);
    e.omega = get_number(entries[k], "omega", where);
    e.phi = entries[k].contains("phi") ? get_number(entries[k], "phi", where) : 0.0;
    parsed.push_back(e);
  }
  try {
    return VibrationSchedule(std::move(parsed), epsilon);
  } catch (const ParseError&) {
    throw;
  } catch (const InputError& e) {
    throw ParseError("$", e.what());
  }
}

json schedule_to_json(const VibrationSchedule& sched) {
  json entries = json::array();
  for (const auto& e : sched.entries()) {
    entries.push_back({{"row", e.row + 1},
                       {"col", e.col + 1},
                       {"mu", e.mu},
                       {"omega", e.omega},
                       {"phi", e.phi}});
  }
  return {{"epsilon", sched.epsilon()}, {"entries", entries}};
}

namespace {

json edges_to_json(const EdgeSet& edges) {
  json out = json::array();
  for (const auto& e : edges) out.push_back({{"from", e.from + 1}, {"to", e.to + 1}});
  return out;
}

}  // namespace

json placement_to_json(const PlacementResult& placement) {
  json order = json::array();
  for (int v : placement.final_order) order.push_back(v + 1);
  return {{"control_set", edges_to_json(placement.control_set)},
          {"kept_set", edges_to_json(placement.kept_set)},
          {"final_graph_order", order}};
}

json spectrum_to_json(const Spectrum<double>& spectrum) {
  json values = json::array();
  for (const auto& z : spectrum.eigenvalues) {
    values.push_back({{"re", z.real()}, {"im", z.imag()}});
  }
  return {{"eigenvalues", values}, {"abscissa", spectrum.abscissa}};
}

json matrix_to_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

MatrixXd matrix_from_json(const json& doc, const std::string& where) {
  if (!doc.is_array() || doc.empty()) throw ParseError(where, "expected rows");
  const auto n = static_cast<Eigen::Index>(doc.size());
  MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = doc[i];
    const std::string rw = where + "[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw ParseError(rw, "expected a row of length " + std::to_string(n));
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!row[j].is_number()) {
        throw ParseError(rw + "[" + std::to_string(j) + "]", "expected a number");
      }
      m(i, j) = row[j].get<double>();
    }
  }
  return m;
}

json functional_to_json(const FunctionalMatrix<double>& fm) {
  json out = {{"method", to_string(fm.method)},
              {"matrix", matrix_to_json(fm.matrix)},
              {"tolerance", fm.tolerance},
              {"chained_controls", fm.chained_controls},
              {"warnings", fm.warnings}};
  if (fm.method == AveragingMethod::numeric) {
    out["horizon"] = fm.horizon;
    out["convergence"] = fm.tolerance;
  }
  out["spectrum"] = spectrum_to_json(eigenvalues<double>(fm.matrix));
  return out;
}

json hinf_to_json(const HinfResult<double>& result) {
  return {{"hinf", result.norm},
          {"bound", 1.0 / result.norm},
          {"omega_peak", result.omega_peak},
          {"grid",
           {{"omega_min", result.omega_min},
            {"omega_max", result.omega_max},
            {"points", result.grid_points},
            {"grid_peak", result.grid_norm},
            {"evaluations", result.evaluations}}}};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

NetworkSystem load_network(const std::filesystem::path& path) {
  return network_from_json(parse_text(read_file(path)));
}

void save_network(const NetworkSystem& sys, const std::filesystem::path& path) {
  write_file(path, dump(network_to_json(sys)));
}

VibrationSchedule load_schedule(const std::filesystem::path& path) {
  return schedule_from_json(parse_text(read_file(path)));
}

void save_schedule(const VibrationSchedule& sched,
                   const std::filesystem::path& path) {
  write_file(path, dump(schedule_to_json(sched)));
}

void write_trajectory_csv(const Trajectory<double>& traj, std::ostream& out) {
  const auto n = traj.states.empty() ? 0 : traj.states.front().size();
  out << "t";
  for (Eigen::Index i = 0; i < n; ++i) out << ",x" << i + 1;
  out << "\n";
  char buffer[32];
  for (std::size_t k = 0; k < traj.size(); ++k) {
    std::snprintf(buffer, sizeof(buffer), "%.17g", traj.times[k]);
    out << buffer;
    for (Eigen::Index i = 0; i < n; ++i) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", traj.states[k][i]);
      out << "," << buffer;
    }
    out << "\n";
  }
}

}  // namespace vibnet::io
