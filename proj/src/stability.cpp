#include "tiltsim/stability.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tiltsim/errors.hpp"
#include "tiltsim/so3.hpp"

namespace tiltsim {

Mat2 b_matrix(const EulerZYX& phi) {
  const double c1 = std::cos(phi.phi1), s1 = std::sin(phi.phi1);
  const double c2 = std::cos(phi.phi2), s2 = std::sin(phi.phi2);
  const double c3 = std::cos(phi.phi3), s3 = std::sin(phi.phi3);
  Mat2 B;
  B << c2 * c3, s1 * s3 + c1 * s2 * c3,
       -s2, c1 * c2;
  return B;
}

double det_b(const EulerZYX& phi) {
  return std::cos(phi.phi1) * std::cos(phi.phi3) +
         std::sin(phi.phi1) * std::sin(phi.phi2) * std::sin(phi.phi3);
}

bool routh_hurwitz_cubic(const CubicGains& g) {
  return g.k_d > 0.0 && g.k_i > 0.0 && g.k_d * g.k_p > g.k_i;
}

std::array<std::complex<double>, 3> cubic_roots(const CubicGains& g) {
  Mat3 companion;
  companion << 0, 0, -g.k_i,
               1, 0, -g.k_p,
               0, 1, -g.k_d;
  const Eigen::EigenSolver<Mat3> es(companion);
  std::array<std::complex<double>, 3> roots = {
      es.eigenvalues()(0), es.eigenvalues()(1), es.eigenvalues()(2)};
  std::sort(roots.begin(), roots.end(),
            [](const auto& a, const auto& b) { return a.real() > b.real(); });
  return roots;
}

double slowest_pole(const GainSet& gains) {
  double slowest = cubic_roots({gains.K_ud, gains.K_up, gains.K_ui})[0].real();
  for (int j = 0; j < 5; ++j) {
    const auto roots =
        cubic_roots({gains.K_fd(j), gains.K_fp(j), gains.K_fi(j)});
    slowest = std::max(slowest, roots[0].real());
  }
  return slowest;
}

std::string ConvergenceReport::to_string() const {
  std::ostringstream os;
  os << "cascade convergence certificate: " << (pass ? "PASS" : "FAIL") << "\n";
  os << "  terminal |e_u|        = " << std::abs(terminal_e_u) << "\n";
  os << "  terminal |e_f|        =";
  for (int j = 0; j < 5; ++j) os << " " << std::abs(terminal_e_f(j));
  os << "\n";
  os << "  terminal coupling     = " << std::abs(terminal_coupling) << "\n";
  os << "  fitted decay rate     = " << decay_rate
     << (rate_valid ? "" : " (fit residual above threshold)") << "\n";
  os << "  fit residual          = " << fit_residual << "\n";
  os << "  exponential envelope  = " << (envelope_ok ? "yes" : "no") << "\n";
  if (!detail.empty()) os << "  detail: " << detail << "\n";
  return os.str();
}

ConvergenceReport certify_cascade(const SimulationLog& log,
                                  const GainSet& gains,
                                  const ConvergenceTolerances& tol,
                                  bool require_clean) {
  if (log.rows.size() < 16)
    throw InvalidLog("certify_cascade: log too short");
  if (require_clean) {
    if (log.saturation_count > 0)
      throw InvalidLog("certify_cascade: " +
                       std::to_string(log.saturation_count) +
                       " saturation events; certificate would be vacuous");
    const GainReport gain_report = validate_gains(gains);
    if (!gain_report.ok)
      throw InvalidLog("certify_cascade: " + gain_report.violations.front());
  }

  ConvergenceReport report;
  const LogRow& last = log.rows.back();
  report.terminal_e_u = last.e_u;
  report.terminal_e_f = last.e_f;
  {
    const double phi1 = last.phi(0);
    const double phi1_d = last.ref_phi(0);
    const double fz_bar = std::cos(phi1) * last.f_z;
    report.terminal_coupling = (std::tan(phi1) - std::tan(phi1_d)) * fz_bar;
  }

  // Log-linear fit of ln|e_f| over the final window, excluding samples that
  // already sit at the numerical floor.
  const size_t n = log.rows.size();
  const size_t start = static_cast<size_t>(
      static_cast<double>(n) * (1.0 - tol.fit_window_fraction));
  std::vector<double> ts, ys;
  for (size_t i = start; i < n; ++i) {
    const double norm = log.rows[i].e_f.norm();
    if (norm > tol.fit_floor) {
      ts.push_back(log.rows[i].t);
      ys.push_back(std::log(norm));
    }
  }

  if (ts.size() >= 8) {
    const double tn = static_cast<double>(ts.size());
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (size_t i = 0; i < ts.size(); ++i) {
      st += ts[i];
      sy += ys[i];
      stt += ts[i] * ts[i];
      sty += ts[i] * ys[i];
    }
    const double denom = tn * stt - st * st;
    if (denom > 0.0) {
      report.decay_rate = (tn * sty - st * sy) / denom;
      const double intercept = (sy - report.decay_rate * st) / tn;
      double ss = 0;
      for (size_t i = 0; i < ts.size(); ++i) {
        const double r = ys[i] - (intercept + report.decay_rate * ts[i]);
        ss += r * r;
      }
      report.fit_residual = std::sqrt(ss / tn);
      report.rate_valid = report.fit_residual < tol.fit_residual_max;
      report.envelope_ok = report.rate_valid && report.decay_rate < 0.0;
    }
  } else {
    // Entire window at the floor: errors already at integration noise.
    report.envelope_ok = true;
    report.rate_valid = false;
    report.detail = "error norm at numerical floor over the fit window";
  }

  const bool terminals_ok =
      std::abs(report.terminal_e_u) < tol.terminal_e_u &&
      report.terminal_e_f.cwiseAbs().maxCoeff() < tol.terminal_e_f &&
      std::abs(report.terminal_coupling) < tol.terminal_coupling;

  report.pass = terminals_ok && report.envelope_ok && !log.aborted &&
                (!require_clean || log.saturation_count == 0);
  if (log.aborted) report.detail = "run aborted: " + log.abort_reason;
  return report;
}

}  // namespace tiltsim
