#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace irsee {

enum class BfScheme { kMmse, kZf, kLagrangian };

std::string to_string(BfScheme s);

// Per-user precoders (columns of w) plus the duals and power factors that
// produced them. powers(k) == ||w_k||^2.
struct BeamformingSolution {
  Eigen::MatrixXcd w;      // M x K
  Eigen::VectorXd lambda;  // K duals (common value replicated for MMSE)
  Eigen::VectorXd powers;  // K per-user power factors
  BfScheme scheme = BfScheme::kMmse;
  bool feasible = true;  // SINR targets met within tolerance

  double total_power() const { return powers.sum(); }
};

struct BfError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Achieved SINR per user: |f_k^H w_k|^2 / (sum_{i != k} |f_k^H w_i|^2 + sigma2_k).
Eigen::VectorXd achieved_sinr(const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& w,
                              const Eigen::VectorXd& sigma2);

// Second-order-cone form of the SINR constraint, checked after rotating each
// w_k so that f_k^H w_k is real nonnegative:
//   Re(f_k^H w_k)/sqrt(gamma_k sigma2_k) >= sqrt(sum_{i!=k} |f_k^H w_i|^2/sigma2_k + 1).
std::vector<bool> socp_reform_check(const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& w,
                                    const Eigen::VectorXd& gamma_min,
                                    const Eigen::VectorXd& sigma2, double tol = 1e-9);

struct FixedPointOptions {
  double tol = 1e-8;
  int max_iter = 500;
};

// Duals of the minimum-power problem at SINR targets. At the fixed point the
// targets hold with equality and sum(lambda) == sum ||w_k||^2 (strong duality).
Eigen::VectorXd solve_dual_fixed_point(const Eigen::MatrixXcd& f,
                                       const Eigen::VectorXd& gamma_min,
                                       const Eigen::VectorXd& sigma2,
                                       const FixedPointOptions& opts = {});

// Directions (I + sum_i lambda_i/sigma2_i f_i f_i^H)^{-1} f_k, normalized.
Eigen::MatrixXcd lagrangian_directions(const Eigen::MatrixXcd& f,
                                       const Eigen::VectorXd& lambda,
                                       const Eigen::VectorXd& sigma2);

// Power factors making every SINR target hold with equality for the given
// unit-norm directions; throws BfError on a singular system or negative power.
Eigen::VectorXd allocate_powers(const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& directions,
                                const Eigen::VectorXd& gamma_min,
                                const Eigen::VectorXd& sigma2);

BeamformingSolution beamform_lagrangian(const Eigen::MatrixXcd& f,
                                        const Eigen::VectorXd& lambda,
                                        const Eigen::VectorXd& gamma_min,
                                        const Eigen::VectorXd& sigma2);

// Pseudo-inverse (channel inversion) directions scaled by sqrt(powers).
BeamformingSolution beamform_zf(const Eigen::MatrixXcd& f, const Eigen::VectorXd& powers);

Eigen::MatrixXcd zf_directions(const Eigen::MatrixXcd& f);

// Regularized channel inversion W = F (I_K + lambda/sigma2 F^H F)^{-1} P^{1/2}.
BeamformingSolution beamform_mmse(const Eigen::MatrixXcd& f, double lambda,
                                  const Eigen::VectorXd& powers, double sigma2);

Eigen::MatrixXcd mmse_directions(const Eigen::MatrixXcd& f, double lambda, double sigma2);

using EeEvaluator = std::function<double(const BeamformingSolution&)>;

struct LineSearchResult {
  double lambda = 0.0;
  BeamformingSolution solution;
  double ee = 0.0;
};

// Scans a logarithmic lambda grid (step = 10^zeta per point, centred on
// budget/K which is always a grid point) and keeps the EE-best MMSE solution
// with target-equality powers. Ties resolve to the smallest lambda.
LineSearchResult mmse_line_search(const Eigen::MatrixXcd& f, double budget,
                                  const EeEvaluator& ee, double zeta,
                                  const Eigen::VectorXd& gamma_min,
                                  const Eigen::VectorXd& sigma2);

// Minimum-power solution hitting every SINR target with equality, using the
// direction family of the requested scheme.
BeamformingSolution min_power_beams(const Eigen::MatrixXcd& f, BfScheme scheme,
                                    const Eigen::VectorXd& gamma_min,
                                    const Eigen::VectorXd& sigma2, double budget,
                                    const EeEvaluator& ee_for_mmse_grid, double zeta);

}  // namespace irsee
