#include "irsee/sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace irsee::sdp {

namespace {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;

double inner(const Mat& a, const Mat& b) { return (a.array() * b.transpose().array()).sum().real(); }

// Largest alpha <= cap keeping X + alpha*D positive definite, given the
// Cholesky factor of X. A power-iteration estimate of the smallest eigenvalue
// of L^{-1} D L^{-H} seeds the value; with verify=true a Cholesky check
// backtracks if the estimate was optimistic (predictor steps only feed the
// centering heuristic and skip it).
double max_step(const Eigen::LLT<Mat>& llt, const Mat& x, const Mat& d, double cap,
                bool verify) {
  const Eigen::Index n = x.rows();
  if (llt.info() != Eigen::Success) return 0.0;
  Mat s = llt.matrixL().solve(d);
  s = llt.matrixL().solve(s.adjoint()).adjoint();
  s = 0.5 * (s + s.adjoint()).eval();

  // Gershgorin lower bound on lambda_min(S); when it already clears the cap
  // the power estimate is unnecessary.
  double gersh = std::numeric_limits<double>::infinity();
  const Eigen::VectorXd abs_rows = s.cwiseAbs().rowwise().sum();
  for (Eigen::Index i = 0; i < n; ++i)
    gersh = std::min(gersh, s(i, i).real() - (abs_rows(i) - std::abs(s(i, i))));
  double alpha = cap;
  if (gersh < 0.0 && -1.0 / gersh < cap) {
    // Power iteration on bound*I - S converges to bound - lambda_min(S).
    const double bound = abs_rows.maxCoeff();
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(n) / std::sqrt(double(n));
    double mu = 0.0;
    for (int it = 0; it < 40; ++it) {
      Eigen::VectorXcd w = bound * v - s * v;
      const double norm = w.norm();
      if (norm == 0.0) break;
      v = w / norm;
      if (it > 3 && std::abs(norm - mu) < 1e-4 * norm) {
        mu = norm;
        break;
      }
      mu = norm;
    }
    const double lambda_min = bound - mu;
    if (lambda_min < 0.0) alpha = std::min(cap, -0.995 / lambda_min);
  }
  if (!verify) return alpha;
  for (int tries = 0; tries < 60; ++tries) {
    Mat cand = x + alpha * d;
    if (Eigen::LLT<Mat>(cand).info() == Eigen::Success) return alpha;
    alpha *= 0.75;
  }
  return 0.0;
}

double lp_max_step(const Vec& x, const Vec& d, double cap) {
  double alpha = cap;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (d(i) < 0.0) alpha = std::min(alpha, -x(i) / d(i));
  return alpha;
}

struct Workspace {
  // primal
  Mat x;
  Vec s;
  // dual
  Vec y;  // size m = kk + n; first kk entries pair with the margin rows
  Mat z;
  Vec zs;
};

}  // namespace

SolveResult solve_unit_diag_sdp(const UnitDiagProblem& prob, const SolverOptions& opts) {
  const Eigen::Index n = prob.n;
  const Eigen::Index kk = static_cast<Eigen::Index>(prob.cons.size());
  if (prob.offsets.size() != kk) throw std::invalid_argument("sdp: offsets size mismatch");
  for (const auto& c : prob.cons)
    if (c.rows() != n || c.cols() != n) throw std::invalid_argument("sdp: constraint size mismatch");
  const Eigen::Index m = kk + n;

  // Scale the margin rows to O(1); V is unaffected, slacks rescale back later.
  double scale = 1.0;
  for (Eigen::Index k = 0; k < kk; ++k)
    scale = std::max({scale, prob.cons[k].cwiseAbs().maxCoeff(), std::abs(prob.offsets(k))});
  std::vector<Mat> cons(kk);
  Vec offsets(kk);
  for (Eigen::Index k = 0; k < kk; ++k) {
    cons[k] = ((prob.cons[k] + prob.cons[k].adjoint()) / (2.0 * scale)).eval();
    offsets(k) = prob.offsets(k) / scale;
  }

  // Internal min form: min <Cobj, X> s.t. <C_k,X> - s_k = -c_k, diag(X) = 1.
  Mat cobj = Mat::Zero(n, n);
  for (const auto& c : cons) cobj -= c;
  Vec b(m);
  b.head(kk) = -offsets;
  b.tail(n).setOnes();

  Workspace w;
  w.x = Mat::Identity(n, n);
  w.s = Vec::Ones(kk);
  for (Eigen::Index k = 0; k < kk; ++k)
    w.s(k) = std::max(1.0, std::abs(cons[k].trace().real() + offsets(k)));
  w.y = Vec::Zero(m);
  const double rho = 1.0 + cobj.norm();
  w.z = rho * Mat::Identity(n, n);
  w.zs = Vec::Constant(kk, rho);

  auto apply_a = [&](const Mat& v, const Vec& slack) {
    Vec out(m);
    for (Eigen::Index k = 0; k < kk; ++k) out(k) = inner(cons[k], v) - slack(k);
    out.tail(n) = v.diagonal().real();
    return out;
  };
  auto adjoint_a = [&](const Vec& y) {
    Mat out = Mat::Zero(n, n);
    for (Eigen::Index k = 0; k < kk; ++k) out += y(k) * cons[k];
    out.diagonal().array() += y.tail(n).array().cast<std::complex<double>>();
    return out;
  };
  // Real part of <A_j, G> for a general (non-Hermitian) G.
  auto project_a = [&](const Mat& g) {
    Vec out(m);
    for (Eigen::Index k = 0; k < kk; ++k) out(k) = inner(cons[k], g);
    out.tail(n) = g.diagonal().real();
    return out;
  };

  SolveResult res;
  res.v = w.x;
  const double bnorm = 1.0 + b.lpNorm<Eigen::Infinity>();
  const double cnorm = 1.0 + cobj.norm();

  double mu = (inner(w.x, w.z) + w.s.dot(w.zs)) / double(n + kk);
  int stalls = 0;
  double margin_residual = std::numeric_limits<double>::infinity();
  Workspace snapshot = w;
  double snapshot_kkt = std::numeric_limits<double>::infinity();

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    res.iterations = iter;

    const Vec rp = b - apply_a(w.x, w.s);
    const Mat rd = cobj - adjoint_a(w.y) - w.z;
    const Vec rds = w.y.head(kk) - w.zs;

    const double pobj = inner(cobj, w.x);
    const double dobj = b.dot(w.y);
    const double gap_rel = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double rp_rel = rp.lpNorm<Eigen::Infinity>() / bnorm;
    const double rd_rel = (rd.norm() + rds.norm()) / cnorm;
    const double kkt = std::max({gap_rel, rp_rel, rd_rel});
    if (!std::isfinite(kkt)) break;  // diverged (typically an infeasible instance)
    res.kkt_residual = kkt;
    snapshot = w;
    snapshot_kkt = kkt;
    margin_residual = rp.head(kk).lpNorm<Eigen::Infinity>();
    if (res.kkt_residual <= opts.tol) {
      res.converged = true;
      break;
    }

    const Eigen::LLT<Mat> zllt(w.z);
    if (zllt.info() != Eigen::Success) break;
    const Mat zi = zllt.solve(Mat::Identity(n, n));

    // Schur complement M(i,j) = Re<A_i, Z^{-1} A_j X> plus the slack diagonal.
    Eigen::MatrixXd schur(m, m);
    std::vector<Mat> t(kk);
    for (Eigen::Index k = 0; k < kk; ++k) t[k] = zi * cons[k] * w.x;
    for (Eigen::Index k = 0; k < kk; ++k)
      for (Eigen::Index l = 0; l < kk; ++l) schur(k, l) = inner(cons[k], t[l]);
    for (Eigen::Index k = 0; k < kk; ++k) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const double v = t[k](i, i).real();
        schur(kk + i, k) = v;
        schur(k, kk + i) = v;
      }
      schur(k, k) += w.s(k) / w.zs(k);
    }
    schur.bottomRightCorner(n, n) = (zi.array() * w.x.transpose().array()).real();
    schur = 0.5 * (schur + schur.transpose()).eval();

    Eigen::LDLT<Eigen::MatrixXd> mldlt(schur);
    if (mldlt.info() != Eigen::Success) {
      schur.diagonal().array() += 1e-12 * schur.trace() / double(m);
      mldlt.compute(schur);
      if (mldlt.info() != Eigen::Success) break;
    }

    const Mat zi_rd_x = zi * (rd * w.x);

    auto solve_direction = [&](double nu, const Mat& corr_m, const Vec& corr_lp, Mat& dx,
                               Vec& ds, Vec& dy, Mat& dz, Vec& dzs) {
      Mat fixed = nu * zi - w.x - zi_rd_x;
      if (corr_m.size() > 0) fixed -= zi * corr_m;
      Vec rhs = rp - project_a(fixed);
      for (Eigen::Index k = 0; k < kk; ++k) {
        const double corr = corr_lp.size() > 0 ? corr_lp(k) : 0.0;
        rhs(k) += (nu - w.zs(k) * w.s(k) - corr) / w.zs(k) - (w.s(k) / w.zs(k)) * rds(k);
      }
      dy = mldlt.solve(rhs);
      dz = rd - adjoint_a(dy);
      dzs = rds + dy.head(kk);
      Mat raw = fixed + zi * (adjoint_a(dy) * w.x);
      dx = 0.5 * (raw + raw.adjoint());
      ds.resize(kk);
      for (Eigen::Index k = 0; k < kk; ++k) {
        const double corr = corr_lp.size() > 0 ? corr_lp(k) : 0.0;
        ds(k) = (nu - w.zs(k) * w.s(k) - corr) / w.zs(k) - (w.s(k) / w.zs(k)) * dzs(k);
      }
    };

    const Eigen::LLT<Mat> xllt(w.x);
    if (xllt.info() != Eigen::Success) break;

    // Predictor (affine scaling).
    Mat dx_a, dz_a;
    Vec ds_a, dy_a, dzs_a;
    solve_direction(0.0, Mat(), Vec(), dx_a, ds_a, dy_a, dz_a, dzs_a);
    double ap = std::min(max_step(xllt, w.x, dx_a, 1.0, false), lp_max_step(w.s, ds_a, 1.0));
    double ad = std::min(max_step(zllt, w.z, dz_a, 1.0, false), lp_max_step(w.zs, dzs_a, 1.0));
    const double mu_aff = (inner(w.x + ap * dx_a, w.z + ad * dz_a) +
                           (w.s + ap * ds_a).dot(w.zs + ad * dzs_a)) /
                          double(n + kk);
    const double sigma =
        std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 1e-8, 0.99);

    // Corrector.
    Mat dx, dz;
    Vec ds, dy, dzs;
    const Mat corr_m = dz_a * dx_a;
    const Vec corr_lp = dzs_a.cwiseProduct(ds_a);
    solve_direction(sigma * mu, corr_m, corr_lp, dx, ds, dy, dz, dzs);

    ap = opts.step_fraction *
         std::min(max_step(xllt, w.x, dx, 1.0 / opts.step_fraction, true),
                  lp_max_step(w.s, ds, 1.0 / opts.step_fraction));
    ad = opts.step_fraction *
         std::min(max_step(zllt, w.z, dz, 1.0 / opts.step_fraction, true),
                  lp_max_step(w.zs, dzs, 1.0 / opts.step_fraction));
    ap = std::min(ap, 1.0);
    ad = std::min(ad, 1.0);

    if (ap < 1e-10 && ad < 1e-10) {
      if (++stalls >= 3) break;
    } else {
      stalls = 0;
    }

    w.x += ap * dx;
    w.s += ap * ds;
    w.y += ad * dy;
    w.z += ad * dz;
    w.zs += ad * dzs;
    w.x = 0.5 * (w.x + w.x.adjoint()).eval();
    w.z = 0.5 * (w.z + w.z.adjoint()).eval();

    mu = (inner(w.x, w.z) + w.s.dot(w.zs)) / double(n + kk);
  }

  Workspace& fin = snapshot;
  res.kkt_residual = snapshot_kkt;
  if (!res.converged && res.kkt_residual <= opts.accept_tol) res.converged = true;

  // The last finite margin residual decides the infeasibility verdict: the
  // margins cannot all be met if the slacks never became consistent.
  if (!res.converged && margin_residual > 1e2 * opts.accept_tol) res.infeasible = true;

  res.v = fin.x;
  for (Eigen::Index i = 0; i < n; ++i) res.v(i, i) = res.v(i, i).real();
  res.slack.resize(kk);
  for (Eigen::Index k = 0; k < kk; ++k)
    res.slack(k) = inner(prob.cons[k], res.v) + prob.offsets(k);
  res.objective = res.slack.sum();
  res.dual = fin.y.head(kk);  // margin-row multipliers (scaled space)
  return res;
}

}  // namespace irsee::sdp
