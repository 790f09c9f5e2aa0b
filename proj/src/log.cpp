#include "tiltsim/log.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tiltsim {

namespace {

std::vector<std::string> make_columns() {
  std::vector<std::string> cols = {"t"};
  const auto add3 = [&cols](const std::string& base,
                            const char* suffixes = "xyz") {
    for (int i = 0; i < 3; ++i)
      cols.push_back(base + "_" + std::string(1, suffixes[i]));
  };
  add3("p");
  add3("v");
  add3("phi", "123");
  add3("omega", "123");
  cols.push_back("eta");
  add3("ptilde");
  add3("ref_p");
  add3("ref_v");
  add3("ref_phi", "123");
  add3("ref_omega", "123");
  cols.push_back("ref_eta");
  add3("ref_ptilde");
  cols.push_back("e_u");
  for (int i = 1; i <= 5; ++i) cols.push_back("e_f_" + std::to_string(i));
  cols.push_back("f_x");
  cols.push_back("f_z");
  add3("tau", "123");
  cols.push_back("eta_d");
  for (int i = 1; i <= 4; ++i) cols.push_back("F_" + std::to_string(i));
  cols.push_back("sat_flag");
  cols.push_back("attach_flag");
  return cols;
}

std::vector<double> row_values(const LogRow& r) {
  std::vector<double> v;
  v.reserve(51);
  const auto push3 = [&v](const Vec3& x) {
    v.push_back(x.x());
    v.push_back(x.y());
    v.push_back(x.z());
  };
  v.push_back(r.t);
  push3(r.p);
  push3(r.v);
  push3(r.phi);
  push3(r.omega);
  v.push_back(r.eta);
  push3(r.p_tilde);
  push3(r.ref_p);
  push3(r.ref_v);
  push3(r.ref_phi);
  push3(r.ref_omega);
  v.push_back(r.ref_eta);
  push3(r.ref_p_tilde);
  v.push_back(r.e_u);
  for (int i = 0; i < 5; ++i) v.push_back(r.e_f(i));
  v.push_back(r.f_x);
  v.push_back(r.f_z);
  push3(r.tau);
  v.push_back(r.eta_d);
  for (int i = 0; i < 4; ++i) v.push_back(r.F(i));
  v.push_back(static_cast<double>(r.sat_flag));
  v.push_back(static_cast<double>(r.attach_flag));
  return v;
}

LogRow row_from_values(const std::vector<double>& v) {
  if (v.size() != 51)
    throw std::runtime_error("log row has " + std::to_string(v.size()) +
                             " fields, expected 51");
  LogRow r;
  size_t k = 0;
  const auto pop = [&v, &k]() { return v[k++]; };
  const auto pop3 = [&]() {
    Vec3 x(v[k], v[k + 1], v[k + 2]);
    k += 3;
    return x;
  };
  r.t = pop();
  r.p = pop3();
  r.v = pop3();
  r.phi = pop3();
  r.omega = pop3();
  r.eta = pop();
  r.p_tilde = pop3();
  r.ref_p = pop3();
  r.ref_v = pop3();
  r.ref_phi = pop3();
  r.ref_omega = pop3();
  r.ref_eta = pop();
  r.ref_p_tilde = pop3();
  r.e_u = pop();
  for (int i = 0; i < 5; ++i) r.e_f(i) = pop();
  r.f_x = pop();
  r.f_z = pop();
  r.tau = pop3();
  r.eta_d = pop();
  for (int i = 0; i < 4; ++i) r.F(i) = pop();
  r.sat_flag = static_cast<int>(pop());
  r.attach_flag = static_cast<int>(pop());
  return r;
}

}  // namespace

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = make_columns();
  return cols;
}

void write_csv(const SimulationLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");

  const auto& cols = csv_columns();
  for (size_t i = 0; i < cols.size(); ++i)
    out << (i ? "," : "") << cols[i];
  out << "\n";

  char buf[32];
  for (const LogRow& row : log.rows) {
    const std::vector<double> vals = row_values(row);
    for (size_t i = 0; i < vals.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.12g", vals[i]);
      out << (i ? "," : "") << buf;
    }
    out << "\n";
  }
}

SimulationLog read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  SimulationLog log;
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(path + ": missing header row");

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> vals;
    vals.reserve(51);
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) vals.push_back(std::stod(field));
    LogRow row = row_from_values(vals);
    if (row.sat_flag) ++log.saturation_count;
    if (row.attach_flag && log.attach_time < 0.0) log.attach_time = row.t;
    log.rows.push_back(std::move(row));
  }
  return log;
}

}  // namespace tiltsim
