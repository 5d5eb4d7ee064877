#pragma once

#include <Eigen/Dense>
#include <vector>

#include "irsee/channel.hpp"

namespace irsee {

// Sum-of-effective-gains objective over unit-modulus phases:
//   f(nu) = sum_k ||nu^H A_k + d_k^H||^2
//         = nu^H Q nu + 2 Re(nu^H t) + S,
// with A_k = conj(diag(h_k^H) G) (so the row products match the physical
// effective channels at Theta = diag(nu)), Q = sum_k A_k A_k^H,
// t = sum_k A_k d_k and S = sum_k ||d_k||^2.
struct EbcdInstance {
  Eigen::MatrixXcd q;                  // N x N Hermitian PSD
  Eigen::VectorXcd vartheta_tilde;     // t, length N
  double const_s = 0.0;                // S
  std::vector<Eigen::MatrixXcd> a_rk;  // per user, N x M
  std::vector<Eigen::VectorXcd> d_k;   // per user, length M

  Eigen::Index n() const { return q.rows(); }
  // Quadratic-form evaluation of f(nu).
  double objective(const PhaseShifts& nu) const;
};

EbcdInstance build_instance(const Eigen::MatrixXcd& g_mat,
                            const std::vector<Eigen::VectorXcd>& h_r,
                            const std::vector<Eigen::VectorXcd>& g_dir);

// One exact coordinate update: nu_n maximizes f over the unit circle with the
// other elements fixed (closed form from the linearized objective); ties on a
// vanishing coefficient resolve to nu_n = 1. Never decreases f.
PhaseShifts update_element(const EbcdInstance& inst, const PhaseShifts& nu, Eigen::Index n);

struct EbcdOptions {
  double xi = 1e-3;       // relative objective-change stopping threshold
  int max_sweeps = 3000;
};

struct EbcdTrace {
  std::vector<double> objective;  // value after each sweep (front = initial)
  int sweeps = 0;
  bool converged = false;
};

// Cyclic sweeps n = 1..N of the closed-form update until the relative
// objective change drops below xi. Per-user running aggregates make one sweep
// O(N K M) work.
PhaseShifts run_ebcd(const EbcdInstance& inst, const PhaseShifts& nu0,
                     const EbcdOptions& opts = {}, EbcdTrace* trace = nullptr);

void dump_trace_csv(const EbcdTrace& trace, const std::string& path);

}  // namespace irsee
