#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "teachopt/heuristics.hpp"
#include "teachopt/io.hpp"
#include "teachopt/pmp.hpp"
#include "teachopt/shooting.hpp"
#include "teachopt/subspace.hpp"
#include "teachopt/teachers_opt.hpp"

namespace {

using teachopt::Vector;

Vector parse_vector(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    if (field.empty()) throw CLI::ValidationError("empty vector component");
    values.push_back(std::stod(field));
  }
  if (values.empty()) throw CLI::ValidationError("empty vector");
  Vector v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v(i) = values[i];
  return v;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

int run_method(const std::string& method, const teachopt::ProblemSpec& spec,
               long max_steps, double tol, bool tol_set, int mesh, double dt,
               double t_max, int angle_samples, unsigned long seed,
               const std::string& out_path, const std::string& report_path,
               const std::string& pmp_out_path) {
  using namespace teachopt;

  SolveReport report;
  report.method = method;
  report.spec = spec;
  Timer timer;
  int exit_code = 0;

  if (method == "greedy" || method == "straight") {
    TeacherPolicy policy;
    policy.kind = method == "greedy" ? PolicyKind::Greedy : PolicyKind::Straight;
    const double teach_tol = tol_set ? tol : default_teaching_tol(spec);
    const TeachRunResult run = run_teacher(policy, spec, max_steps, teach_tol);
    report.T = run.steps;
    report.converged = run.converged;
    report.terminal_residual = run.trajectory.terminal_residual;
    report.wall_time_seconds = timer.seconds();
    if (!out_path.empty()) emit_trajectory(run.trajectory, out_path);
    if (!run.converged) exit_code = 2;
  } else if (method == "nlp") {
    NlpSettings settings;
    settings.seed = seed;
    if (tol_set) settings.residual_tol = tol;
    const auto [T, traj] = nlp_min_T(spec, settings);
    report.T = T;
    report.converged = true;
    report.terminal_residual = traj.terminal_residual;
    report.wall_time_seconds = timer.seconds();
    if (!out_path.empty()) emit_trajectory(traj, out_path);
  } else if (method == "cnlp") {
    SolverOptions options = cnlp_default_options();
    const CnlpSolution sol = cnlp_solve(spec, mesh, options);
    report.t_f = sol.t_f;
    report.converged = sol.converged;
    report.terminal_residual = (sol.states.back() - spec.w_star).norm();
    report.wall_time_seconds = timer.seconds();
    if (!out_path.empty())
      emit_trajectory_samples(sol.mesh_times, sol.states, sol.inputs, spec.Ry,
                              out_path);
    if (!sol.converged) exit_code = 2;
  } else if (method == "shoot") {
    ShootingSettings settings;
    settings.angle_samples = angle_samples;
    settings.dt = dt;
    settings.t_max = t_max;
    if (tol_set) settings.hit_tol = tol;

    std::optional<PlaneBasis> basis;
    ProblemSpec shoot_spec = spec;
    if (spec.dim() > 2) {
      basis = build_basis(spec.w0, spec.w_star);
      shoot_spec = reduce_spec(spec, *basis);
    }
    const auto candidates = find_candidates(shoot_spec, settings);
    report.candidate_count = static_cast<long>(candidates.size());
    report.converged = !candidates.empty();
    report.wall_time_seconds = timer.seconds();
    if (!candidates.empty()) {
      const CandidateTrajectory& best = candidates.front();
      report.t_f = best.t_hit;
      report.terminal_residual = best.miss_distance;
      std::vector<Vector> states = best.trajectory.states_w;
      std::vector<Vector> inputs = best.trajectory.inputs;
      std::vector<Vector> costates = best.trajectory.states_p;
      if (basis) {
        for (auto& w : states) w = lift(Eigen::Vector2d(w.head<2>()), *basis);
        for (auto& x : inputs) x = lift(Eigen::Vector2d(x.head<2>()), *basis);
        for (auto& p : costates) p = lift(Eigen::Vector2d(p.head<2>()), *basis);
      }
      if (!out_path.empty())
        emit_trajectory_samples(best.trajectory.times, states, inputs, spec.Ry,
                                out_path);
      if (!pmp_out_path.empty()) {
        ContinuousTrajectory lifted = best.trajectory;
        lifted.states_w = states;
        lifted.states_p = costates;
        emit_costate_csv(lifted, pmp_out_path);
      }
    } else {
      exit_code = 2;
    }
  } else {
    std::cerr << "unknown method: " << method << "\n";
    return 1;
  }

  if (!report_path.empty()) write_report(report, report_path);
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-optimal and heuristic training sequences for a "
               "gradient-descent least-squares learner"};
  app.require_subcommand(0, 1);

  std::string method, w0_text, wstar_text, out_path, report_path, pmp_out_path;
  double eta = 0.01, rx = 1.0, ry = 1.0, tol = 0.0, dt = 1e-3, t_max = 8.0;
  long max_steps = 200000;
  int mesh = 100;
  unsigned long seed = 0;

  app.add_option("--method", method,
                 "Solver: greedy, straight, nlp, cnlp, or shoot");
  app.add_option("--w0", w0_text, "Initial weights, comma separated");
  app.add_option("--wstar", wstar_text, "Target weights, comma separated");
  app.add_option("--eta", eta, "Learning rate");
  app.add_option("--rx", rx, "Input norm bound");
  app.add_option("--ry", ry, "Label bound");
  app.add_option("--out", out_path, "Trajectory CSV path");
  app.add_option("--report", report_path, "Report JSON path");
  app.add_option("--max-steps", max_steps, "Heuristic step cap");
  auto* tol_opt = app.add_option("--tol", tol, "Termination / residual tolerance");
  app.add_option("--mesh", mesh, "CNLP mesh intervals");
  app.add_option("--dt", dt, "Shooting integration step");
  app.add_option("--tmax", t_max, "Shooting integration horizon");
  app.add_option("--seed", seed, "Multi-start perturbation seed");
  int angle_samples = 360;
  app.add_option("--samples", angle_samples, "Shooting angle-grid resolution");
  app.add_option("--pmp-out", pmp_out_path,
                 "State/costate CSV for the best shooting candidate");

  auto* regimes = app.add_subcommand(
      "regimes", "Classify regimes along a state/costate CSV");
  std::string regimes_in, regimes_out;
  double tol_align = teachopt::kAlignTol;
  regimes->add_option("--in", regimes_in, "Input CSV with w and p columns")
      ->required();
  regimes->add_option("--out", regimes_out, "Output CSV")->required();
  regimes->add_option("--rx", rx, "Input norm bound");
  regimes->add_option("--ry", ry, "Label bound");
  regimes->add_option("--tol-align", tol_align, "Alignment tolerance");

  auto* reachable = app.add_subcommand(
      "reachable", "Sample the one-step reachable-set boundary");
  std::string reach_w_text, reach_out;
  int samples = 256;
  reachable->add_option("--w", reach_w_text, "State, comma separated")->required();
  reachable->add_option("--out", reach_out, "Output CSV")->required();
  reachable->add_option("--eta", eta, "Learning rate");
  reachable->add_option("--rx", rx, "Input norm bound");
  reachable->add_option("--ry", ry, "Label bound");
  reachable->add_option("--samples", samples, "Boundary samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (regimes->parsed()) {
      if (!(rx > 0.0) || !(ry > 0.0))
        throw std::invalid_argument("rx and ry must be positive");
      const auto parsed = teachopt::parse_costate_csv(regimes_in);
      teachopt::ProblemSpec spec;
      spec.w0 = parsed.ws.empty() ? Vector::Zero(2) : parsed.ws.front();
      spec.w_star = spec.w0;
      spec.eta = eta > 0 ? eta : 0.01;
      spec.Rx = rx;
      spec.Ry = ry;
      std::ofstream out(regimes_out);
      if (!out) throw std::runtime_error("cannot open " + regimes_out);
      out << "step,t,regime,value\n";
      for (std::size_t i = 0; i < parsed.times.size(); ++i) {
        const teachopt::PMPPoint point = teachopt::evaluate_pmp_point(
            parsed.ws[i], parsed.ps[i], spec, tol_align);
        char value[64];
        std::snprintf(value, sizeof(value), "%.17g", point.value);
        out << i << "," << parsed.times[i] << ","
            << teachopt::regime_name(point.regime) << "," << value << "\n";
      }
      return 0;
    }

    if (reachable->parsed()) {
      const Vector w = parse_vector(reach_w_text);
      teachopt::ProblemSpec spec;
      spec.w0 = w;
      spec.w_star = w;
      spec.eta = eta;
      spec.Rx = rx;
      spec.Ry = ry;
      spec.validate();
      const auto boundary = teachopt::reachable_boundary(w, spec, samples);
      std::ofstream out(reach_out);
      if (!out) throw std::runtime_error("cannot open " + reach_out);
      out << "theta,w1,w2\n";
      for (int i = 0; i < samples; ++i) {
        char b1[64], b2[64];
        std::snprintf(b1, sizeof(b1), "%.17g", boundary[i](0));
        std::snprintf(b2, sizeof(b2), "%.17g", boundary[i](1));
        out << (2.0 * M_PI * i / samples) << "," << b1 << "," << b2 << "\n";
      }
      return 0;
    }

    if (method.empty() || w0_text.empty() || wstar_text.empty()) {
      std::cerr << "usage: teach --method <greedy|straight|nlp|cnlp|shoot> "
                   "--w0 <v> --wstar <v> [options]\n"
                   "       teach regimes --in <csv> --out <csv>\n"
                   "       teach reachable --w <v> --out <csv>\n";
      return 1;
    }

    teachopt::ProblemSpec spec;
    spec.w0 = parse_vector(w0_text);
    spec.w_star = parse_vector(wstar_text);
    spec.eta = eta;
    spec.Rx = rx;
    spec.Ry = ry;
    spec.validate();
    if (max_steps < 1) throw std::invalid_argument("max-steps must be >= 1");
    if (mesh < 10) throw std::invalid_argument("mesh must be >= 10");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");

    return run_method(method, spec, max_steps, tol, tol_opt->count() > 0, mesh,
                      dt, t_max, angle_samples, seed, out_path, report_path,
                      pmp_out_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
