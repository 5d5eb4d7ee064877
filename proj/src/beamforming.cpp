#include "irsee/beamforming.hpp"

#include <cmath>
#include <limits>

namespace irsee {

namespace {

void check_dims(const Eigen::MatrixXcd& f, const Eigen::VectorXd& gamma,
                const Eigen::VectorXd& sigma2) {
  if (f.cols() != gamma.size() || f.cols() != sigma2.size())
    throw BfError("beamforming: per-user vector length mismatch");
  if (f.cols() > f.rows())
    throw BfError("beamforming: more users than antennas");
}

Eigen::MatrixXcd normalize_columns(Eigen::MatrixXcd m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const double n = m.col(c).norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw BfError("beamforming: degenerate direction");
    m.col(c) /= n;
  }
  return m;
}

Eigen::MatrixXcd scale_directions(const Eigen::MatrixXcd& dirs, const Eigen::VectorXd& powers) {
  Eigen::MatrixXcd w = dirs;
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    if (powers(c) < 0.0) throw BfError("beamforming: negative power factor");
    w.col(c) *= std::sqrt(powers(c));
  }
  return w;
}

}  // namespace

std::string to_string(BfScheme s) {
  switch (s) {
    case BfScheme::kMmse: return "mmse";
    case BfScheme::kZf: return "zf";
    case BfScheme::kLagrangian: return "lagrangian";
  }
  return "?";
}

Eigen::VectorXd achieved_sinr(const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& w,
                              const Eigen::VectorXd& sigma2) {
  if (f.rows() != w.rows() || f.cols() != w.cols() || f.cols() != sigma2.size())
    throw BfError("achieved_sinr: dimension mismatch");
  const Eigen::MatrixXcd g = f.adjoint() * w;  // g(k, i) = f_k^H w_i
  Eigen::VectorXd out(f.cols());
  for (Eigen::Index k = 0; k < f.cols(); ++k) {
    double interference = 0.0;
    for (Eigen::Index i = 0; i < f.cols(); ++i)
      if (i != k) interference += std::norm(g(k, i));
    out(k) = std::norm(g(k, k)) / (interference + sigma2(k));
  }
  return out;
}

std::vector<bool> socp_reform_check(const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& w,
                                    const Eigen::VectorXd& gamma_min,
                                    const Eigen::VectorXd& sigma2, double tol) {
  check_dims(f, gamma_min, sigma2);
  const Eigen::MatrixXcd g = f.adjoint() * w;
  std::vector<bool> ok(f.cols());
  for (Eigen::Index k = 0; k < f.cols(); ++k) {
    // Rotating w_k so f_k^H w_k is real nonnegative turns its real part into
    // the magnitude.
    const double lhs = std::abs(g(k, k)) / std::sqrt(gamma_min(k) * sigma2(k));
    double sum = 1.0;
    for (Eigen::Index i = 0; i < f.cols(); ++i)
      if (i != k) sum += std::norm(g(k, i)) / sigma2(k);
    ok[k] = lhs >= std::sqrt(sum) - tol;
  }
  return ok;
}

Eigen::VectorXd solve_dual_fixed_point(const Eigen::MatrixXcd& f,
                                       const Eigen::VectorXd& gamma_min,
                                       const Eigen::VectorXd& sigma2,
                                       const FixedPointOptions& opts) {
  check_dims(f, gamma_min, sigma2);
  const Eigen::Index m = f.rows(), k = f.cols();

  // lambda_k = gamma_k sigma2_k / ((1 + gamma_k) f_k^H C^{-1} f_k),
  // C = I + sum_i lambda_i/sigma2_i f_i f_i^H. Monotone from zero.
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(k);
  for (int it = 0; it < opts.max_iter; ++it) {
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Identity(m, m);
    for (Eigen::Index i = 0; i < k; ++i)
      c.noalias() += (lambda(i) / sigma2(i)) * (f.col(i) * f.col(i).adjoint());
    Eigen::LDLT<Eigen::MatrixXcd> ldlt(c);
    if (ldlt.info() != Eigen::Success)
      throw BfError("dual fixed point: singular system");
    const Eigen::MatrixXcd cif = ldlt.solve(f);
    Eigen::VectorXd next(k);
    double rel = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      const double quad = std::real(f.col(i).dot(cif.col(i)));  // f_i^H C^{-1} f_i
      if (!(quad > 0.0) || !std::isfinite(quad))
        throw BfError("dual fixed point: degenerate channel");
      next(i) = gamma_min(i) * sigma2(i) / ((1.0 + gamma_min(i)) * quad);
      rel = std::max(rel, std::abs(next(i) - lambda(i)) / std::max(next(i), 1e-300));
    }
    lambda = next;
    if (rel < opts.tol) return lambda;
  }
  throw BfError("dual fixed point: no convergence (infeasible geometry)");
}

Eigen::MatrixXcd lagrangian_directions(const Eigen::MatrixXcd& f,
                                       const Eigen::VectorXd& lambda,
                                       const Eigen::VectorXd& sigma2) {
  if (f.cols() != lambda.size() || f.cols() != sigma2.size())
    throw BfError("lagrangian_directions: dimension mismatch");
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Identity(f.rows(), f.rows());
  for (Eigen::Index i = 0; i < f.cols(); ++i)
    c.noalias() += (lambda(i) / sigma2(i)) * (f.col(i) * f.col(i).adjoint());
  return normalize_columns(Eigen::LDLT<Eigen::MatrixXcd>(c).solve(f));
}

Eigen::VectorXd allocate_powers(const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& directions,
                                const Eigen::VectorXd& gamma_min,
                                const Eigen::VectorXd& sigma2) {
  check_dims(f, gamma_min, sigma2);
  const Eigen::Index k = f.cols();
  const Eigen::MatrixXcd g = f.adjoint() * directions;  // g(i, j) = f_i^H dir_j
  Eigen::MatrixXd a(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      a(i, j) = (i == j) ? std::norm(g(i, i)) / gamma_min(i) : -std::norm(g(i, j));
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) throw BfError("power allocation: singular system (degenerate channels)");
  const Eigen::VectorXd p = lu.solve(sigma2);
  for (Eigen::Index i = 0; i < k; ++i)
    if (!(p(i) >= 0.0) || !std::isfinite(p(i)))
      throw BfError("power allocation: negative power (infeasible targets)");
  return p;
}

BeamformingSolution beamform_lagrangian(const Eigen::MatrixXcd& f,
                                        const Eigen::VectorXd& lambda,
                                        const Eigen::VectorXd& gamma_min,
                                        const Eigen::VectorXd& sigma2) {
  BeamformingSolution sol;
  sol.scheme = BfScheme::kLagrangian;
  const Eigen::MatrixXcd dirs = lagrangian_directions(f, lambda, sigma2);
  sol.powers = allocate_powers(f, dirs, gamma_min, sigma2);
  sol.w = scale_directions(dirs, sol.powers);
  sol.lambda = lambda;
  sol.feasible = true;
  return sol;
}

Eigen::MatrixXcd zf_directions(const Eigen::MatrixXcd& f) {
  const Eigen::Index k = f.cols();
  if (k > f.rows()) throw BfError("zf: more users than antennas");
  const Eigen::MatrixXcd gram = f.adjoint() * f;
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(gram);
  lu.setThreshold(1e-12);
  if (lu.rank() < k) throw BfError("zf: rank-deficient channel matrix");
  return normalize_columns(f * lu.inverse());
}

BeamformingSolution beamform_zf(const Eigen::MatrixXcd& f, const Eigen::VectorXd& powers) {
  if (powers.size() != f.cols()) throw BfError("zf: power vector length mismatch");
  BeamformingSolution sol;
  sol.scheme = BfScheme::kZf;
  sol.w = scale_directions(zf_directions(f), powers);
  sol.powers = powers;
  sol.lambda = Eigen::VectorXd::Zero(f.cols());
  return sol;
}

Eigen::MatrixXcd mmse_directions(const Eigen::MatrixXcd& f, double lambda, double sigma2) {
  if (!(lambda >= 0.0)) throw BfError("mmse: lambda must be nonnegative");
  const Eigen::Index k = f.cols();
  Eigen::MatrixXcd inner = Eigen::MatrixXcd::Identity(k, k);
  inner.noalias() += (lambda / sigma2) * (f.adjoint() * f);
  return normalize_columns(f * inner.inverse());
}

BeamformingSolution beamform_mmse(const Eigen::MatrixXcd& f, double lambda,
                                  const Eigen::VectorXd& powers, double sigma2) {
  if (powers.size() != f.cols()) throw BfError("mmse: power vector length mismatch");
  BeamformingSolution sol;
  sol.scheme = BfScheme::kMmse;
  sol.w = scale_directions(mmse_directions(f, lambda, sigma2), powers);
  sol.powers = powers;
  sol.lambda = Eigen::VectorXd::Constant(f.cols(), lambda);
  return sol;
}

namespace {

bool scan_lambda_grid(const Eigen::MatrixXcd& f, double center, double zeta,
                      const Eigen::VectorXd& gamma_min, const Eigen::VectorXd& sigma2,
                      const EeEvaluator& ee, LineSearchResult& best) {
  const double sigma_mean = sigma2.mean();
  const int half = static_cast<int>(std::ceil(3.0 / zeta));
  bool any = false;
  for (int step = -half; step <= half; ++step) {
    const double lambda = center * std::pow(10.0, zeta * step);
    BeamformingSolution cand;
    cand.scheme = BfScheme::kMmse;
    try {
      const Eigen::MatrixXcd dirs = mmse_directions(f, lambda, sigma_mean);
      cand.powers = allocate_powers(f, dirs, gamma_min, sigma2);
      cand.w = scale_directions(dirs, cand.powers);
      cand.lambda = Eigen::VectorXd::Constant(f.cols(), lambda);
    } catch (const BfError&) {
      continue;  // targets infeasible for this regularization
    }
    const double value = ee(cand);
    if (value > best.ee) {
      best.ee = value;
      best.lambda = lambda;
      best.solution = std::move(cand);
    }
    any = true;
  }
  return any;
}

}  // namespace

LineSearchResult mmse_line_search(const Eigen::MatrixXcd& f, double budget,
                                  const EeEvaluator& ee, double zeta,
                                  const Eigen::VectorXd& gamma_min,
                                  const Eigen::VectorXd& sigma2) {
  if (!(budget > 0.0)) throw BfError("mmse line search: budget must be positive");
  LineSearchResult best;
  best.ee = -std::numeric_limits<double>::infinity();
  bool any = scan_lambda_grid(f, budget / double(f.cols()), zeta, gamma_min, sigma2, ee, best);
  if (!any) {
    // A pathological anchor (e.g. a starved budget) can miss the feasible
    // range entirely; recenter on the exact duals of the minimum-power
    // problem, which always sit in it.
    const Eigen::VectorXd duals = solve_dual_fixed_point(f, gamma_min, sigma2);
    any = scan_lambda_grid(f, duals.mean(), zeta, gamma_min, sigma2, ee, best);
  }
  if (!any) throw BfError("mmse line search: no feasible regularization on the grid");
  return best;
}

BeamformingSolution min_power_beams(const Eigen::MatrixXcd& f, BfScheme scheme,
                                    const Eigen::VectorXd& gamma_min,
                                    const Eigen::VectorXd& sigma2, double budget,
                                    const EeEvaluator& ee_for_mmse_grid, double zeta) {
  switch (scheme) {
    case BfScheme::kLagrangian: {
      const Eigen::VectorXd lambda = solve_dual_fixed_point(f, gamma_min, sigma2);
      return beamform_lagrangian(f, lambda, gamma_min, sigma2);
    }
    case BfScheme::kZf: {
      const Eigen::MatrixXcd dirs = zf_directions(f);
      BeamformingSolution sol;
      sol.scheme = BfScheme::kZf;
      sol.powers = allocate_powers(f, dirs, gamma_min, sigma2);
      sol.w = scale_directions(dirs, sol.powers);
      sol.lambda = Eigen::VectorXd::Zero(f.cols());
      return sol;
    }
    case BfScheme::kMmse:
      return mmse_line_search(f, budget, ee_for_mmse_grid, zeta, gamma_min, sigma2).solution;
  }
  throw BfError("unknown beamforming scheme");
}

}  // namespace irsee
