#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "vibnet/averaging.hpp"
#include "vibnet/graph.hpp"
#include "vibnet/network.hpp"
#include "vibnet/robustness.hpp"
#include "vibnet/schedule.hpp"
#include "vibnet/simulation.hpp"
#include "vibnet/stability.hpp"

namespace vibnet::io {

using nlohmann::json;

// Network document:
//   {"nodes":[{"id":1,"d":-1.0},...],"edges":[{"from":1,"to":2,"weight":0.5},...]}
// Ids are 1-based and must be exactly 1..n. Throws ParseError with the field
// path (or line:column for JSON syntax errors).
NetworkSystem network_from_json(const json& doc);
json network_to_json(const NetworkSystem& sys);

// Schedule document:
//   {"epsilon":0.01,"entries":[{"row":i,"col":j,"mu":..,"omega":..,"phi":..}]}
VibrationSchedule schedule_from_json(const json& doc);
json schedule_to_json(const VibrationSchedule& sched);

json placement_to_json(const PlacementResult& placement);
json spectrum_to_json(const Spectrum<double>& spectrum);
json matrix_to_json(const MatrixXd& m);
MatrixXd matrix_from_json(const json& doc, const std::string& where);
json functional_to_json(const FunctionalMatrix<double>& fm);
json hinf_to_json(const HinfResult<double>& result);

// Parses text, mapping syntax errors to ParseError("line:col").
json parse_text(const std::string& text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

NetworkSystem load_network(const std::filesystem::path& path);
void save_network(const NetworkSystem& sys, const std::filesystem::path& path);
VibrationSchedule load_schedule(const std::filesystem::path& path);
void save_schedule(const VibrationSchedule& sched,
                   const std::filesystem::path& path);

// CSV with header t,x1,...,xn and one row per sample.
void write_trajectory_csv(const Trajectory<double>& traj, std::ostream& out);

// Canonical text form used for every emitted JSON file.
std::string dump(const json& doc);

}  // namespace vibnet::io
