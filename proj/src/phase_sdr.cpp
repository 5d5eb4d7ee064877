#include "irsee/phase_sdr.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace irsee {

Eigen::MatrixXcd LiftedInstance::x_mat(Eigen::Index beam, Eigen::Index user) const {
  const Eigen::VectorXcd& av = a_vec(beam, user);
  const std::complex<double> bv = b(beam, user);
  Eigen::MatrixXcd x(n_irs + 1, n_irs + 1);
  x.topLeftCorner(n_irs, n_irs).noalias() = av * av.adjoint();
  x.topRightCorner(n_irs, 1) = av * std::conj(bv);
  x.bottomLeftCorner(1, n_irs) = bv * av.adjoint();
  x(n_irs, n_irs) = 0.0;
  return x;
}

double LiftedInstance::margin(const Eigen::VectorXcd& nu, Eigen::Index user) const {
  double signal = 0.0, interference = 0.0;
  for (Eigen::Index i = 0; i < users; ++i) {
    const double p = std::norm(nu.dot(a_vec(i, user)) + b(i, user));
    if (i == user)
      signal = p;
    else
      interference += p;
  }
  return signal / sigma2(user) - gamma_min(user) * (interference / sigma2(user) + 1.0);
}

double LiftedInstance::margin_sum(const Eigen::VectorXcd& nu) const {
  double sum = 0.0;
  for (Eigen::Index k = 0; k < users; ++k) sum += margin(nu, k);
  return sum;
}

LiftedInstance lift(const Eigen::MatrixXcd& g_mat, const std::vector<Eigen::VectorXcd>& h_r,
                    const std::vector<Eigen::VectorXcd>& g_dir, const Eigen::MatrixXcd& w,
                    const Eigen::VectorXd& gamma_min, const Eigen::VectorXd& sigma2) {
  const Eigen::Index users = static_cast<Eigen::Index>(h_r.size());
  if (w.cols() != users || static_cast<Eigen::Index>(g_dir.size()) != users)
    throw std::invalid_argument("lift: beam/user count mismatch");
  if (gamma_min.size() != users || sigma2.size() != users)
    throw std::invalid_argument("lift: per-user vector mismatch");

  LiftedInstance inst;
  inst.n_irs = g_mat.rows();
  inst.users = users;
  inst.gamma_min = gamma_min;
  inst.sigma2 = sigma2;
  inst.a.resize(static_cast<std::size_t>(users * users));
  inst.b.resize(users, users);
  for (Eigen::Index k = 0; k < users; ++k) {
    if (h_r[k].size() != inst.n_irs || g_dir[k].size() != g_mat.cols())
      throw std::invalid_argument("lift: channel dimension mismatch");
    for (Eigen::Index i = 0; i < users; ++i) {
      const Eigen::VectorXcd gw = g_mat * w.col(i);
      inst.a[static_cast<std::size_t>(i * users + k)] =
          (h_r[k].conjugate().cwiseProduct(gw)).conjugate();
      inst.b(i, k) = std::conj(g_dir[k].dot(w.col(i)));
    }
  }
  return inst;
}

SdpSolution solve_sdp(const LiftedInstance& inst, const sdp::SolverOptions& opts) {
  const Eigen::Index n = inst.n_irs + 1;

  auto build = [&](double relax) {
    sdp::UnitDiagProblem prob;
    prob.n = n;
    prob.offsets.resize(inst.users);
    for (Eigen::Index k = 0; k < inst.users; ++k) {
      const double gamma = inst.gamma_min(k) * relax;
      const double s2 = inst.sigma2(k);
      Eigen::MatrixXcd c = inst.x_mat(k, k);
      double offset = inst.b_abs2(k, k);
      for (Eigen::Index i = 0; i < inst.users; ++i) {
        if (i == k) continue;
        c -= gamma * inst.x_mat(i, k);
        offset -= gamma * inst.b_abs2(i, k);
      }
      prob.cons.push_back(c / s2);
      prob.offsets(k) = offset / s2 - gamma;
    }
    return prob;
  };

  SdpSolution out;
  double relax = 1.0;
  for (int attempt = 0; attempt < 4; ++attempt) {
    const sdp::SolveResult res = sdp::solve_unit_diag_sdp(build(relax), opts);
    out.v = res.v;
    out.slack = res.slack;
    out.objective = res.objective;
    out.converged = res.converged;
    out.iterations = res.iterations;
    out.kkt_residual = res.kkt_residual;
    out.gamma_relax = relax;
    out.infeasible_at_target = attempt > 0;
    if (!res.infeasible) return out;
    relax *= 0.5;
  }
  out.infeasible_at_target = true;
  return out;
}

RandomizationResult gaussian_randomize(const SdpSolution& sol, const LiftedInstance& inst,
                                       int count, Rng& rng) {
  const Eigen::Index n = sol.v.rows();
  if (n != inst.n_irs + 1) throw std::invalid_argument("gaussian_randomize: size mismatch");
  if (count < 1) throw std::invalid_argument("gaussian_randomize: count must be >= 1");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(sol.v);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("gaussian_randomize: eigendecomposition failed");
  const Eigen::VectorXd evals = eig.eigenvalues();
  const double emax = std::max(evals.maxCoeff(), 0.0);

  // Keep the part of the spectrum above the solver's own accuracy floor;
  // directions below it are interior-point noise, not solution structure.
  const double cutoff = 3e-7 * std::max(emax, 1e-300);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (evals(i) > cutoff) ++rank;
  Eigen::MatrixXcd factor(n, std::max<Eigen::Index>(rank, 1));
  if (rank == 0) {
    factor.setZero();
  } else {
    Eigen::Index c = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (evals(i) > cutoff) factor.col(c++) = eig.eigenvectors().col(i) * std::sqrt(evals(i));
  }

  // Stacked [a; b] columns evaluate every |nu^H a + b| as one product.
  Eigen::MatrixXcd abar(n, inst.users * inst.users);
  for (Eigen::Index i = 0; i < inst.users; ++i)
    for (Eigen::Index k = 0; k < inst.users; ++k) {
      abar.col(i * inst.users + k).head(inst.n_irs) = inst.a_vec(i, k);
      abar(n - 1, i * inst.users + k) = inst.b(i, k);
    }

  RandomizationResult best;
  best.objective = -std::numeric_limits<double>::infinity();

  const Eigen::Index batch_max = 512;
  Eigen::Index done = 0;
  while (done < count) {
    const Eigen::Index batch = std::min<Eigen::Index>(batch_max, count - done);
    const Eigen::MatrixXcd r = rng.cnormal_matrix(factor.cols(), batch);
    Eigen::MatrixXcd draws = factor * r;  // columns nubar

    // Project: nu_n = unit(nubar_n * conj(nubar_{N+1})); unit(0) := 1.
    for (Eigen::Index c = 0; c < batch; ++c) {
      std::complex<double> ref = std::conj(draws(n - 1, c));
      if (std::abs(ref) == 0.0) ref = 1.0;
      for (Eigen::Index i = 0; i < n - 1; ++i) {
        const std::complex<double> u = draws(i, c) * ref;
        const double mag = std::abs(u);
        draws(i, c) = mag > 0.0 ? u / mag : 1.0;
      }
      draws(n - 1, c) = 1.0;
    }

    const Eigen::MatrixXcd prod = abar.adjoint() * draws;  // (i,k) row blocks x draws
    for (Eigen::Index c = 0; c < batch; ++c) {
      double obj = 0.0;
      for (Eigen::Index k = 0; k < inst.users; ++k) {
        double signal = 0.0, interference = 0.0;
        for (Eigen::Index i = 0; i < inst.users; ++i) {
          const double p = std::norm(prod(i * inst.users + k, c));
          if (i == k)
            signal = p;
          else
            interference += p;
        }
        obj += signal / inst.sigma2(k) -
               inst.gamma_min(k) * (interference / inst.sigma2(k) + 1.0);
      }
      if (obj > best.objective) {
        best.objective = obj;
        best.best_draw = done + c;
        best.phases = PhaseShifts(draws.col(c).head(n - 1));
      }
    }
    done += batch;
  }
  return best;
}

void dump_spectrum_csv(const SdpSolution& sol, const std::string& path) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(sol.v);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "index,eigenvalue\n";
  const Eigen::VectorXd ev = eig.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) out << i << "," << ev(ev.size() - 1 - i) << "\n";
}

}  // namespace irsee
