#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "irsee/beamforming.hpp"
#include "irsee/channel.hpp"
#include "irsee/sdp_solver.hpp"

namespace irsee {

// Quadratic lifting of the per-user SINR terms. For beam i and user k,
//   a(i,k) = conj(diag(h_k^H) G w_i),   b(i,k) = conj(g_k^H w_i),
// so that nu^H a(i,k) + b(i,k) has exactly the magnitude of f_k^H w_i when the
// physical reflection is Theta = diag(nu). The (N+1)x(N+1) block matrices
//   X(i,k) = [[a a^H, a b*], [b a^H, 0]]
// satisfy nubar^H X nubar + |b|^2 = |nu^H a + b|^2 for nubar = [nu; 1].
struct LiftedInstance {
  Eigen::Index n_irs = 0;
  Eigen::Index users = 0;
  std::vector<Eigen::VectorXcd> a;  // users*users entries, index (i, k) = beam i, user k
  Eigen::MatrixXcd b;               // b(i, k)
  Eigen::VectorXd gamma_min;        // per user
  Eigen::VectorXd sigma2;           // per user

  const Eigen::VectorXcd& a_vec(Eigen::Index beam, Eigen::Index user) const {
    return a[static_cast<std::size_t>(beam * users + user)];
  }
  Eigen::MatrixXcd x_mat(Eigen::Index beam, Eigen::Index user) const;
  double b_abs2(Eigen::Index beam, Eigen::Index user) const { return std::norm(b(beam, user)); }

  // Normalized SINR margin of user k at phases nu:
  //   |nu^H a(k,k) + b(k,k)|^2/sigma2 - gamma*(sum_{i!=k}|nu^H a(i,k) + b(i,k)|^2/sigma2 + 1).
  double margin(const Eigen::VectorXcd& nu, Eigen::Index user) const;
  double margin_sum(const Eigen::VectorXcd& nu) const;
};

LiftedInstance lift(const Eigen::MatrixXcd& g_mat, const std::vector<Eigen::VectorXcd>& h_r,
                    const std::vector<Eigen::VectorXcd>& g_dir, const Eigen::MatrixXcd& w,
                    const Eigen::VectorXd& gamma_min, const Eigen::VectorXd& sigma2);

struct SdpSolution {
  Eigen::MatrixXcd v;       // (N+1) x (N+1), PSD, unit diagonal
  Eigen::VectorXd slack;    // beta_k >= 0 margins
  double objective = 0.0;   // sum(beta)
  bool converged = false;
  bool infeasible_at_target = false;  // solved only after relaxing gamma
  double gamma_relax = 1.0;           // factor applied to gamma_min to restore feasibility
  int iterations = 0;
  double kkt_residual = 0.0;
};

// Solves the slack-maximization relaxation over V. If the instance is
// infeasible at gamma_min, retries with progressively halved targets and
// flags the result.
SdpSolution solve_sdp(const LiftedInstance& inst, const sdp::SolverOptions& opts = {});

struct RandomizationResult {
  PhaseShifts phases;
  double objective = 0.0;  // margin_sum at the returned phases
  Eigen::Index best_draw = 0;
};

// Draws nubar = U Sigma^{1/2} r from the eigendecomposition of V, projects
// each draw to exact unit modulus via nu_n = unit(nubar_n / nubar_{N+1}), and
// keeps the first draw maximizing the summed margins.
RandomizationResult gaussian_randomize(const SdpSolution& sol, const LiftedInstance& inst,
                                       int count, Rng& rng);

// Eigenvalue spectrum of V as CSV (index,eigenvalue), for rank inspection.
void dump_spectrum_csv(const SdpSolution& sol, const std::string& path);

}  // namespace irsee
