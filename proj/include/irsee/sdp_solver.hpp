#pragma once

#include <Eigen/Dense>
#include <vector>

namespace irsee::sdp {

// max sum_k beta_k  over Hermitian V and slacks beta, subject to
//   <C_k, V> + c_k = beta_k >= 0   (k = 0..K-1)
//   diag(V) = 1,  V >= 0 (PSD).
// This is the problem family behind unit-modulus phase relaxations: the K
// inequality rows carry lifted SINR margins, the diagonal is pinned at one.
struct UnitDiagProblem {
  Eigen::Index n = 0;                    // PSD block size
  std::vector<Eigen::MatrixXcd> cons;    // K Hermitian n x n matrices C_k
  Eigen::VectorXd offsets;               // K scalars c_k
};

struct SolverOptions {
  double tol = 1e-9;       // target for gap and residuals
  double accept_tol = 1e-7;  // worst residual still reported as converged
  int max_iter = 100;
  double step_fraction = 0.98;
};

struct SolveResult {
  Eigen::MatrixXcd v;      // n x n, PSD, unit diagonal
  Eigen::VectorXd slack;   // beta_k = <C_k, V> + c_k
  double objective = 0.0;  // sum(slack)
  Eigen::VectorXd dual;    // multipliers of the K margin rows
  int iterations = 0;
  bool converged = false;
  bool infeasible = false;   // no PSD unit-diagonal V satisfies every margin
  double kkt_residual = 0.0; // max of relative gap / primal / dual residuals
};

// Infeasible-start primal-dual path following (predictor-corrector) over the
// product cone (Hermitian PSD block) x (nonnegative slacks).
SolveResult solve_unit_diag_sdp(const UnitDiagProblem& prob, const SolverOptions& opts = {});

}  // namespace irsee::sdp
