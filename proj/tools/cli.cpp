#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "vibnet/averaging.hpp"
#include "vibnet/errors.hpp"
#include "vibnet/graph.hpp"
#include "vibnet/io.hpp"
#include "vibnet/network.hpp"
#include "vibnet/robustness.hpp"
#include "vibnet/schedule.hpp"
#include "vibnet/simulation.hpp"
#include "vibnet/stability.hpp"

namespace vibnet::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

std::string node_list(const std::vector<int>& nodes) {
  std::ostringstream s;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    s << (k ? " " : "") << nodes[k] + 1;
  }
  return s.str();
}

std::string edge_list(const EdgeSet& edges) {
  std::ostringstream s;
  bool first = true;
  for (const auto& e : edges) {
    s << (first ? "" : ", ") << e.from + 1 << "->" << e.to + 1;
    first = false;
  }
  return first ? "(none)" : s.str();
}

std::string cycle_text(const std::vector<int>& cycle) {
  std::ostringstream s;
  for (int v : cycle) s << v + 1 << " -> ";
  if (!cycle.empty()) s << cycle.front() + 1;
  return s.str();
}

void print_spectrum(std::ostream& out, const Spectrum<double>& spectrum) {
  out << "  spectrum:";
  for (const auto& z : spectrum.eigenvalues) {
    out << " " << z.real();
    if (z.imag() != 0.0) out << (z.imag() > 0 ? "+" : "") << z.imag() << "i";
  }
  out << "\n  abscissa: " << spectrum.abscissa << "\n";
}

VectorXd parse_vector(const std::string& text, int n) {
  if (text.empty()) return VectorXd::Ones(n);
  std::vector<double> values;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size() && item.find_first_not_of(' ', used) != std::string::npos) {
        throw std::invalid_argument(item);
      }
    } catch (const std::exception&) {
      throw InputError("--x0: cannot parse \"" + item + "\"");
    }
  }
  if (static_cast<int>(values.size()) != n) {
    throw InputError("--x0 needs " + std::to_string(n) + " values");
  }
  return Eigen::Map<VectorXd>(values.data(), n);
}

void require_sparsity(const VibrationSchedule& sched, const MatrixXd& m) {
  if (!check_sparsity_constraint(sched, m)) {
    throw InputError(
        "schedule places a vibration on an entry with no edge in the network");
  }
}

// Closed form when the controlled edges are acyclic, numeric otherwise.
void write_json(const std::string& path, const json& doc) {
  if (!path.empty()) io::write_file(path, io::dump(doc));
}

// ---------------------------------------------------------------- commands

int cmd_check(const std::string& net_file, std::ostream& out) {
  const auto sys = io::load_network(net_file);
  const auto report = validate(sys);
  const auto verdict = is_structurally_stabilizable(DirectedGraph::of(sys));
  out << "nodes: " << sys.size() << ", edges: " << sys.edges().size() << "\n";
  out << "bidirected: " << edge_list(bidirected_edges(DirectedGraph::of(sys)))
      << "\n";
  out << "residual: " << edge_list(verdict.residual.edges()) << "\n";
  for (const auto& v : report.violations) out << "warning: " << v.message << "\n";
  if (verdict.stabilizable) {
    out << "verdict: structurally vibrationally stabilizable (residual is a DAG)\n";
    out << "residual order: " << node_list(verdict.witness) << "\n";
    return kOk;
  }
  out << "verdict: condition not met (residual has a directed cycle; the test "
         "is sufficient only)\n";
  out << "cycle: " << cycle_text(verdict.witness) << "\n";
  return kConditionNotMet;
}

int cmd_place(const std::string& net_file, const std::string& out_file,
              std::ostream& out) {
  const auto sys = io::load_network(net_file);
  const auto placement = place_controls(DirectedGraph::of(sys));
  out << "control set: " << edge_list(placement.control_set) << "\n";
  out << "kept set: " << edge_list(placement.kept_set) << "\n";
  out << "final order: " << node_list(placement.final_order) << "\n";
  write_json(out_file, io::placement_to_json(placement));
  return kOk;
}

struct DesignFlags {
  double omega_base = 1.0;
  double epsilon = 0.01;
  double phase = 0.0;
  double removal = 1.0;
};

VibrationSchedule design_for(const NetworkSystem& sys, const DesignFlags& f,
                             PlacementResult* placement_out = nullptr) {
  auto placement = place_controls(DirectedGraph::of(sys));
  DesignOptions opts;
  opts.omega_base = f.omega_base;
  opts.epsilon = f.epsilon;
  opts.phase = f.phase;
  opts.removal = f.removal;
  auto sched = design_vibrations(build_matrix(sys), placement.control_set, opts);
  if (placement_out) *placement_out = std::move(placement);
  return sched;
}

void print_schedule(std::ostream& out, const VibrationSchedule& sched) {
  out << "epsilon: " << sched.epsilon() << "\n";
  for (const auto& e : sched.entries()) {
    out << "  v_" << e.row + 1 << "," << e.col + 1 << "(s) = "
        << std::setprecision(12) << e.mu << " sin(" << e.omega << " s + "
        << e.phi << ")\n"
        << std::setprecision(6);
  }
}

int cmd_design(const std::string& net_file, const DesignFlags& flags,
               const std::string& out_file, std::ostream& out) {
  const auto sys = io::load_network(net_file);
  const auto sched = design_for(sys, flags);
  print_schedule(out, sched);
  write_json(out_file, io::schedule_to_json(sched));
  return kOk;
}

struct AverageFlags {
  std::string method = "closed-form";
  double horizon = 0.0;
  double periods = 500.0;
  int steps_per_period = 50;
  std::string window = "smooth";
};

int cmd_average(const std::string& net_file, const std::string& sched_file,
                const AverageFlags& f, const std::string& out_file,
                std::ostream& out) {
  const auto sys = io::load_network(net_file);
  const auto sched = io::load_schedule(sched_file);
  const MatrixXd m = build_matrix(sys);
  require_sparsity(sched, m);

  AveragingOptions<double> opts;
  opts.horizon = f.horizon;
  opts.periods = f.periods;
  opts.steps_per_period = f.steps_per_period;
  opts.window = f.window == "smooth" ? AveragingWindow::smooth
                                     : AveragingWindow::uniform;

  std::optional<FunctionalMatrix<double>> closed;
  std::optional<FunctionalMatrix<double>> numeric;
  if (f.method == "closed-form" || f.method == "both") {
    try {
      closed = functional_matrix_closed_form(m, sched);
    } catch (const PreconditionError& e) {
      if (f.method == "closed-form") throw;
      out << "closed form unavailable: " << e.what() << "\n";
    }
  }
  if (f.method == "numeric" || f.method == "both") {
    numeric = averaged_matrix_numeric(m, sched, opts);
  }

  json report;
  bool hurwitz = true;
  for (const auto* fm : {closed ? &*closed : nullptr, numeric ? &*numeric : nullptr}) {
    if (!fm) continue;
    const auto spectrum = eigenvalues<double>(fm->matrix);
    out << to_string(fm->method) << " functional matrix:\n";
    print_spectrum(out, spectrum);
    for (const auto& w : fm->warnings) out << "  warning: " << w << "\n";
    hurwitz = hurwitz && spectrum.abscissa < 0.0;
    const std::string key =
        fm->method == AveragingMethod::closed_form ? "closed_form" : "numeric";
    report[key] = io::functional_to_json(*fm);
  }
  if (closed && numeric) {
    const auto a = eigenvalues<double>(closed->matrix).eigenvalues;
    const auto b = eigenvalues<double>(numeric->matrix).eigenvalues;
    const double spectral = spectrum_distance(a, b);
    const double entrywise =
        (closed->matrix - numeric->matrix).cwiseAbs().maxCoeff();
    out << "spectral agreement: " << spectral << "\n";
    out << "max entry difference: " << entrywise << "\n";
    const bool cosine = std::all_of(
        sched.entries().begin(), sched.entries().end(), [](const ScheduleEntry& e) {
          return std::abs(e.phi + std::numbers::pi / 2) < 1e-12;
        });
    if (!cosine) {
      out << "  note: entries agree only at phase -pi/2; other phases differ by "
             "a similarity\n";
    }
    report["agreement"] = {{"spectral", spectral},
                           {"entrywise", entrywise},
                           {"chained_controls", closed->chained_controls}};
  }
  if (!closed || !numeric) {
    // Single method: report the object itself rather than a wrapper.
    report = closed ? report["closed_form"] : report["numeric"];
  }
  write_json(out_file, report);
  out << "functional system " << (hurwitz ? "is" : "is NOT") << " Hurwitz\n";
  return kOk;
}

struct SimulateFlags {
  std::string sched_file;
  std::string x0;
  double t_final = 10.0;
  double dt = 0.0;
  int stride = 1;
  std::string perturbation_file;
  double perturb_at = 2.0;
  double window = 0.0;
};

int cmd_simulate(const std::string& net_file, const SimulateFlags& f,
                 const std::string& out_file, std::ostream& out) {
  const auto sys = io::load_network(net_file);
  const MatrixXd m = build_matrix(sys);
  const VectorXd x0 = parse_vector(f.x0, sys.size());
  VibrationSchedule sched;
  if (!f.sched_file.empty()) {
    sched = io::load_schedule(f.sched_file);
    require_sparsity(sched, m);
  }
  SimulationOptions<double> opts;
  opts.stride = f.stride;
  if (!f.perturbation_file.empty()) {
    const auto delta = io::load_network(f.perturbation_file);
    if (delta.size() != sys.size()) {
      throw InputError("perturbation network has a different node count");
    }
    opts.perturbation = Perturbation<double>{build_matrix(delta), f.perturb_at};
  }
  double dt = f.dt;
  if (dt <= 0.0) dt = std::min(1e-3, resolved_step(sched));
  const auto traj =
      sched.empty() ? simulate_lti<double>(m, x0, f.t_final, dt, opts)
                    : simulate_controlled<double>(m, sched, x0, f.t_final, dt, opts);
  const double window = f.window > 0.0 ? f.window : default_window(sched, f.t_final);
  const auto verdict = classify_decay<double>(traj, window);
  out << "samples: " << traj.size() << ", dt: " << traj.step << "\n";
  for (const auto& w : traj.warnings) out << "warning: " << w << "\n";
  out << "classification: " << to_string(verdict.classification)
      << " (shrink factor " << verdict.shrink_factor << ")\n";
  if (!out_file.empty()) {
    std::ofstream csv(out_file);
    if (!csv) throw InputError("cannot write " + out_file);
    io::write_trajectory_csv(traj, csv);
  }
  return kOk;
}

struct RobustnessFlags {
  std::string sched_file;
  int stress = 0;
  std::uint64_t seed = 1;
  std::string csv_file;
};

int cmd_robustness(const std::string& net_file, const RobustnessFlags& f,
                   const std::string& out_file, std::ostream& out) {
  const auto sys = io::load_network(net_file);
  const MatrixXd m = build_matrix(sys);

  std::vector<std::pair<std::string, MatrixXd>> systems{{"original", m}};
  if (!f.sched_file.empty()) {
    const auto sched = io::load_schedule(f.sched_file);
    require_sparsity(sched, m);
    systems.emplace_back("functional", functional_matrix(m, sched).matrix);
  }

  json report;
  std::ostringstream csv;
  csv << "system,hinf,bound\n";
  int status = kOk;
  for (const auto& [name, matrix] : systems) {
    if (!is_hurwitz<double>(matrix)) {
      out << name << ": not Hurwitz, no stability radius bound\n";
      report[name] = {{"hurwitz", false}};
      status = kConditionNotMet;
      continue;
    }
    const auto result = hinf_norm<double>(matrix);
    json entry = io::hinf_to_json(result);
    out << name << ": hinf " << result.norm << " at omega " << result.omega_peak
        << ", stability radius >= " << 1.0 / result.norm << "\n";
    if (f.stress > 0) {
      const auto stress =
          stress_test<double>(matrix, 1.0 / result.norm, f.stress, f.seed);
      entry["stress"] = {{"trials", stress.trials},
                         {"stable", stress.stable},
                         {"worst_abscissa", stress.worst_abscissa}};
      out << "  stress: " << stress.stable << "/" << stress.trials
          << " perturbations at 0.99x the bound stay stable\n";
    }
    char line[128];
    std::snprintf(line, sizeof(line), "%s,%.17g,%.17g\n", name.c_str(),
                  result.norm, 1.0 / result.norm);
    csv << line;
    report[name] = entry;
  }
  write_json(out_file, report);
  if (!f.csv_file.empty()) io::write_file(f.csv_file, csv.str());
  return status;
}

struct ThresholdFlags {
  double eps_min = 1e-3;
  double eps_max = 1e1;
  int per_decade = 2;
  double t_final = 20.0;
  std::string x0;
};

int cmd_threshold(const std::string& net_file, const std::string& sched_file,
                  const ThresholdFlags& f, const std::string& out_file,
                  std::ostream& out) {
  const auto sys = io::load_network(net_file);
  const MatrixXd m = build_matrix(sys);
  const auto sched = io::load_schedule(sched_file);
  require_sparsity(sched, m);
  ThresholdOptions opts;
  opts.grid = log_grid(f.eps_min, f.eps_max, f.per_decade);
  opts.t_final = f.t_final;
  const auto result =
      find_epsilon_threshold(m, sched, parse_vector(f.x0, sys.size()), opts);
  json table = json::array();
  for (const auto& row : result.table) {
    out << "  epsilon " << row.epsilon << ": "
        << to_string(row.verdict.classification) << " ("
        << row.verdict.shrink_factor << ")\n";
    table.push_back({{"epsilon", row.epsilon},
                     {"classification", to_string(row.verdict.classification)},
                     {"shrink_factor", row.verdict.shrink_factor}});
  }
  out << "stable for epsilon <= " << result.epsilon_hat << " on this grid\n";
  write_json(out_file, {{"epsilon_hat", result.epsilon_hat}, {"table", table}});
  return kOk;
}

int cmd_analyze(const std::string& net_file, const DesignFlags& flags,
                const std::string& out_dir, std::ostream& out) {
  const auto sys = io::load_network(net_file);
  const MatrixXd m = build_matrix(sys);
  const auto graph = DirectedGraph::of(sys);
  const auto verdict = is_structurally_stabilizable(graph);
  const auto validation = validate(sys);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  json report;
  report["negative_diagonal"] = validation.negative_diagonal;
  report["sign_consistent"] = validation.sign_consistent;
  report["stabilizable"] = verdict.stabilizable;
  json witness = json::array();
  for (int v : verdict.witness) witness.push_back(v + 1);
  report["witness"] = witness;
  if (!verdict.stabilizable) {
    out << "condition not met; residual cycle: " << cycle_text(verdict.witness)
        << "\n";
    io::write_file(dir / "report.json", io::dump(report));
    return kConditionNotMet;
  }

  PlacementResult placement;
  const auto sched = design_for(sys, flags, &placement);
  const auto functional = functional_matrix(m, sched);
  const auto files = json{{"placement", (dir / "placement.json").string()},
                          {"schedule", (dir / "schedule.json").string()},
                          {"functional", (dir / "functional.json").string()},
                          {"robustness", (dir / "robustness.csv").string()},
                          {"report", (dir / "report.json").string()}};
  io::write_file(dir / "placement.json", io::dump(io::placement_to_json(placement)));
  io::save_schedule(sched, dir / "schedule.json");
  io::write_file(dir / "functional.json", io::dump(io::functional_to_json(functional)));

  report["placement"] = io::placement_to_json(placement);
  report["schedule"] = io::schedule_to_json(sched);
  report["functional"] = io::functional_to_json(functional);

  std::ostringstream csv;
  csv << "system,hinf,bound\n";
  json robustness;
  for (const auto& [name, matrix] :
       {std::pair<std::string, MatrixXd>{"original", m},
        std::pair<std::string, MatrixXd>{"functional", functional.matrix}}) {
    if (!is_hurwitz<double>(matrix)) {
      robustness[name] = {{"hurwitz", false}};
      continue;
    }
    const auto h = hinf_norm<double>(matrix);
    robustness[name] = io::hinf_to_json(h);
    char line[128];
    std::snprintf(line, sizeof(line), "%s,%.17g,%.17g\n", name.c_str(), h.norm,
                  1.0 / h.norm);
    csv << line;
  }
  io::write_file(dir / "robustness.csv", csv.str());
  report["robustness"] = robustness;
  report["files"] = files;
  io::write_file(dir / "report.json", io::dump(report));

  out << "control set: " << edge_list(placement.control_set) << "\n";
  print_schedule(out, sched);
  print_spectrum(out, eigenvalues<double>(functional.matrix));
  out << "artifacts written to " << out_dir << "\n";
  return kOk;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Vibrational stabilization of linear network systems"};
  app.require_subcommand(1);

  std::string net_file;
  std::string sched_file;
  std::string out_file;

  auto* check = app.add_subcommand("check", "Test the structural stabilizability condition");
  check->add_option("network", net_file, "Network JSON")->required();

  auto* place = app.add_subcommand("place", "Select control edges");
  place->add_option("network", net_file, "Network JSON")->required();
  place->add_option("-o,--out", out_file, "Placement JSON output");

  DesignFlags design_flags;
  auto add_design_flags = [&](CLI::App* cmd) {
    cmd->add_option("--omega-base", design_flags.omega_base, "Base angular frequency")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--epsilon", design_flags.epsilon, "Timescale parameter")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--phase", design_flags.phase, "Phase of every sinusoid (rad)");
    cmd->add_option("--removal", design_flags.removal,
                    "Fraction of each controlled weight cancelled (1 removes)")
        ->check(CLI::PositiveNumber);
  };
  auto* design = app.add_subcommand("design", "Design a vibration schedule");
  design->add_option("network", net_file, "Network JSON")->required();
  design->add_option("-o,--out", out_file, "Schedule JSON output");
  add_design_flags(design);

  AverageFlags average_flags;
  auto* average = app.add_subcommand("average", "Compute the functional matrix");
  average->add_option("network", net_file, "Network JSON")->required();
  average->add_option("schedule", sched_file, "Schedule JSON")->required();
  average->add_option("--method", average_flags.method)
      ->check(CLI::IsMember({"closed-form", "numeric", "both"}));
  average->add_option("--horizon", average_flags.horizon,
                      "Averaging horizon in the fast timescale (0: periods)");
  average->add_option("--periods", average_flags.periods,
                      "Horizon in periods of the slowest vibration");
  average->add_option("--steps-per-period", average_flags.steps_per_period);
  average->add_option("--window", average_flags.window)
      ->check(CLI::IsMember({"uniform", "smooth"}));
  average->add_option("-o,--out", out_file, "Report JSON output");

  SimulateFlags sim_flags;
  auto* simulate = app.add_subcommand("simulate", "Integrate the (controlled) system");
  simulate->add_option("network", net_file, "Network JSON")->required();
  simulate->add_option("--schedule", sim_flags.sched_file, "Schedule JSON");
  simulate->add_option("--x0", sim_flags.x0, "Initial state, comma separated");
  simulate->add_option("--tfinal", sim_flags.t_final)->check(CLI::PositiveNumber);
  simulate->add_option("--dt", sim_flags.dt, "Step (default resolves the schedule)");
  simulate->add_option("--stride", sim_flags.stride, "Record every k-th step")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--perturbation", sim_flags.perturbation_file,
                       "Network JSON added to the system at --perturb-at");
  simulate->add_option("--perturb-at", sim_flags.perturb_at);
  simulate->add_option("--window", sim_flags.window, "Decay classification window");
  simulate->add_option("-o,--out", out_file, "Trajectory CSV output");

  RobustnessFlags rob_flags;
  auto* robustness = app.add_subcommand("robustness", "Stability radius lower bounds");
  robustness->add_option("network", net_file, "Network JSON")->required();
  robustness->add_option("--schedule", rob_flags.sched_file, "Schedule JSON");
  robustness->add_option("--stress", rob_flags.stress, "Random perturbation trials");
  robustness->add_option("--seed", rob_flags.seed);
  robustness->add_option("--csv", rob_flags.csv_file, "Side-by-side bound CSV");
  robustness->add_option("-o,--out", out_file, "Report JSON output");

  ThresholdFlags thr_flags;
  auto* threshold = app.add_subcommand("threshold", "Scan epsilon for decay");
  threshold->add_option("network", net_file, "Network JSON")->required();
  threshold->add_option("schedule", sched_file, "Schedule JSON")->required();
  threshold->add_option("--eps-min", thr_flags.eps_min)->check(CLI::PositiveNumber);
  threshold->add_option("--eps-max", thr_flags.eps_max)->check(CLI::PositiveNumber);
  threshold->add_option("--per-decade", thr_flags.per_decade)->check(CLI::PositiveNumber);
  threshold->add_option("--tfinal", thr_flags.t_final)->check(CLI::PositiveNumber);
  threshold->add_option("--x0", thr_flags.x0);
  threshold->add_option("-o,--out", out_file, "Table JSON output");

  std::string out_dir;
  auto* analyze = app.add_subcommand("analyze", "Run the whole pipeline");
  analyze->add_option("network", net_file, "Network JSON")->required();
  analyze->add_option("--out-dir", out_dir, "Artifact directory")->required();
  add_design_flags(analyze);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (*check) return cmd_check(net_file, out);
    if (*place) return cmd_place(net_file, out_file, out);
    if (*design) return cmd_design(net_file, design_flags, out_file, out);
    if (*average) return cmd_average(net_file, sched_file, average_flags, out_file, out);
    if (*simulate) return cmd_simulate(net_file, sim_flags, out_file, out);
    if (*robustness) return cmd_robustness(net_file, rob_flags, out_file, out);
    if (*threshold) return cmd_threshold(net_file, sched_file, thr_flags, out_file, out);
    if (*analyze) return cmd_analyze(net_file, design_flags, out_dir, out);
  } catch (const NotStabilizableError& e) {
    err << "not stabilizable: " << e.what() << "\n";
    return kConditionNotMet;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const DesignError& e) {
    err << "design error: " << e.what() << "\n";
    return kInputError;
  } catch (const ResolutionError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kConditionNotMet;
  }
  return kInputError;
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  std::vector<std::string> storage{"vibnet"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace vibnet::cli
