#pragma once

#include <string>
#include <vector>

#include "tiltsim/types.hpp"

namespace tiltsim {

// One record per control cycle. Reference columns mirror the state block;
// the reference roll slot carries the cascade's phi1_d and ref_eta the
// allocated tilt command.
struct LogRow {
  double t = 0.0;
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 phi = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
  double eta = 0.0;
  Vec3 p_tilde = Vec3::Zero();

  Vec3 ref_p = Vec3::Zero();
  Vec3 ref_v = Vec3::Zero();
  Vec3 ref_phi = Vec3::Zero();
  Vec3 ref_omega = Vec3::Zero();
  double ref_eta = 0.0;
  Vec3 ref_p_tilde = Vec3::Zero();

  double e_u = 0.0;
  Vec5 e_f = Vec5::Zero();
  double f_x = 0.0;
  double f_z = 0.0;
  Vec3 tau = Vec3::Zero();
  double eta_d = 0.0;
  Vec4 F = Vec4::Zero();
  int sat_flag = 0;
  int attach_flag = 0;
};

struct SimulationLog {
  std::string scenario;
  std::vector<LogRow> rows;
  int saturation_count = 0;
  double attach_time = -1.0;   // < 0 when no attach occurred
  bool aborted = false;
  std::string abort_reason;

  bool attached() const { return attach_time >= 0.0; }
};

// Canonical column names, in the fixed on-disk order.
const std::vector<std::string>& csv_columns();

// Decimal CSV with >= 9 significant digits; byte-identical for identical
// inputs.
void write_csv(const SimulationLog& log, const std::string& path);

SimulationLog read_csv(const std::string& path);

}  // namespace tiltsim
