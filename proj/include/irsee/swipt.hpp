#pragma once

#include <Eigen/Dense>
#include <vector>

namespace irsee {

// Power-splitting coefficients: fraction phi_k of the received power feeds the
// harvester, 1 - phi_k the decoder. feasible(k) is false when no phi in (0,1)
// can reach the rate target for device k.
struct PsCoefficients {
  Eigen::VectorXd phi;
  std::vector<bool> feasible;

  bool all_feasible() const {
    for (bool f : feasible)
      if (!f) return false;
    return true;
  }
};

// Per-device decode SINR under splitting:
//   (1-phi_k)|f_k^H w_k|^2 / ((1-phi_k) sum_{j!=k} |f_k^H w_j|^2 + sigma2_k).
Eigen::VectorXd swipt_sinr(const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& w,
                           const Eigen::VectorXd& phi, const Eigen::VectorXd& sigma2);

// Closed-form splitter maximizing the harvested share under the rate target:
//   phi_k = 1 - gamma_k sigma2_k / (|f_k^H w_k|^2 - gamma_k sum_{j!=k}|f_k^H w_j|^2) - eps.
// Devices whose margin denominator is nonpositive (or whose phi would leave
// (0,1)) are flagged infeasible and get phi = 0.
PsCoefficients optimize_ps(const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& w,
                           const Eigen::VectorXd& gamma_min, const Eigen::VectorXd& sigma2,
                           double eps);

// E_k = phi_k mu_k sum_j |f_k^H w_j|^2 (all beams contribute).
Eigen::VectorXd harvested_energy(const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& w,
                                 const Eigen::VectorXd& phi, const Eigen::VectorXd& mu);

// sum_rate / (radiated/eta + circuit_power).
double inet_ee(double sum_rate, double radiated_power, double circuit_power, double eta);

struct SwiptReport {
  Eigen::VectorXd sinr_id;
  Eigen::VectorXd rates;      // bit/s per device (bandwidth applied by caller)
  double sum_rate = 0.0;
  Eigen::VectorXd harvested;  // W per device
  double ee = 0.0;
  std::vector<bool> rate_ok;  // SINR >= gamma_min per device
  std::vector<bool> eh_ok;    // harvested >= eh_min per device
  std::vector<bool> phi_ok;   // phi in (0,1) per device
  bool budget_ok = true;
  bool feasible = false;      // all of the above
};

}  // namespace irsee
