#include "teachopt/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace teachopt {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string header_for(Eigen::Index n) {
  std::string h = "step,t";
  for (Eigen::Index i = 1; i <= n; ++i) h += ",w" + std::to_string(i);
  for (Eigen::Index i = 1; i <= n; ++i) h += ",x" + std::to_string(i);
  h += ",y";
  return h;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

void emit_trajectory(const Trajectory& traj, const std::string& path) {
  std::ofstream out = open_out(path);
  const Eigen::Index n = traj.states.empty() ? 0 : traj.states[0].size();
  out << header_for(n) << "\n";
  for (std::size_t t = 0; t < traj.states.size(); ++t) {
    out << t << "," << fmt(static_cast<double>(t) * traj.eta);
    for (Eigen::Index i = 0; i < n; ++i) out << "," << fmt(traj.states[t](i));
    const bool has_input = t < traj.inputs.size();
    for (Eigen::Index i = 0; i < n; ++i)
      out << "," << fmt(has_input ? traj.inputs[t].x(i) : 0.0);
    out << "," << fmt(has_input ? traj.inputs[t].y : 0.0) << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void emit_trajectory_samples(const std::vector<double>& times,
                             const std::vector<Vector>& states,
                             const std::vector<Vector>& inputs, double y,
                             const std::string& path) {
  if (times.size() != states.size() || times.size() != inputs.size())
    throw std::invalid_argument("emit_trajectory_samples: length mismatch");
  std::ofstream out = open_out(path);
  const Eigen::Index n = states.empty() ? 0 : states[0].size();
  out << header_for(n) << "\n";
  for (std::size_t t = 0; t < states.size(); ++t) {
    out << t << "," << fmt(times[t]);
    for (Eigen::Index i = 0; i < n; ++i) out << "," << fmt(states[t](i));
    for (Eigen::Index i = 0; i < n; ++i) out << "," << fmt(inputs[t](i));
    out << "," << fmt(y) << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

ParsedTrajectory parse_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty trajectory file: " + path);
  const auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "step" || header[1] != "t" ||
      header.back() != "y")
    throw std::runtime_error("unexpected trajectory header in " + path);
  const Eigen::Index n = static_cast<Eigen::Index>((header.size() - 3) / 2);

  ParsedTrajectory parsed;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw std::runtime_error("malformed trajectory row in " + path);
    parsed.steps.push_back(std::stod(fields[0]));
    parsed.times.push_back(std::stod(fields[1]));
    Vector w(n), x(n);
    for (Eigen::Index i = 0; i < n; ++i) w(i) = std::stod(fields[2 + i]);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = std::stod(fields[2 + n + i]);
    parsed.states.push_back(std::move(w));
    parsed.xs.push_back(std::move(x));
    parsed.ys.push_back(std::stod(fields[2 + 2 * n]));
  }
  return parsed;
}

void emit_costate_csv(const ContinuousTrajectory& traj, const std::string& path) {
  std::ofstream out = open_out(path);
  const Eigen::Index n = traj.states_w.empty() ? 0 : traj.states_w[0].size();
  std::string header = "step,t";
  for (Eigen::Index i = 1; i <= n; ++i) header += ",w" + std::to_string(i);
  for (Eigen::Index i = 1; i <= n; ++i) header += ",p" + std::to_string(i);
  out << header << "\n";
  for (std::size_t t = 0; t < traj.times.size(); ++t) {
    out << t << "," << fmt(traj.times[t]);
    for (Eigen::Index i = 0; i < n; ++i) out << "," << fmt(traj.states_w[t](i));
    for (Eigen::Index i = 0; i < n; ++i) out << "," << fmt(traj.states_p[t](i));
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

ParsedCostateTrajectory parse_costate_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty costate file: " + path);
  const auto header = split_csv_line(line);
  if (header.size() < 4 || header[0] != "step" || header[1] != "t")
    throw std::runtime_error("unexpected costate header in " + path);
  const Eigen::Index n = static_cast<Eigen::Index>((header.size() - 2) / 2);

  ParsedCostateTrajectory parsed;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw std::runtime_error("malformed costate row in " + path);
    parsed.times.push_back(std::stod(fields[1]));
    Vector w(n), p(n);
    for (Eigen::Index i = 0; i < n; ++i) w(i) = std::stod(fields[2 + i]);
    for (Eigen::Index i = 0; i < n; ++i) p(i) = std::stod(fields[2 + n + i]);
    parsed.ws.push_back(std::move(w));
    parsed.ps.push_back(std::move(p));
  }
  return parsed;
}

std::string report_to_json(const SolveReport& report) {
  nlohmann::json j;
  j["method"] = report.method;
  j["spec"] = {
      {"w0", std::vector<double>(report.spec.w0.data(),
                                 report.spec.w0.data() + report.spec.w0.size())},
      {"wstar",
       std::vector<double>(report.spec.w_star.data(),
                           report.spec.w_star.data() + report.spec.w_star.size())},
      {"eta", report.spec.eta},
      {"rx", report.spec.Rx},
      {"ry", report.spec.Ry},
  };
  if (report.T)
    j["T"] = *report.T;
  else
    j["T"] = nullptr;
  if (report.t_f)
    j["t_f"] = *report.t_f;
  else
    j["t_f"] = nullptr;
  j["converged"] = report.converged;
  j["terminal_residual"] = report.terminal_residual;
  j["wall_time_seconds"] = report.wall_time_seconds;
  if (report.candidate_count)
    j["candidate_count"] = *report.candidate_count;
  else
    j["candidate_count"] = nullptr;
  return j.dump(2);
}

void write_report(const SolveReport& report, const std::string& path) {
  std::ofstream out = open_out(path);
  out << report_to_json(report) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace teachopt
