#include "irsee/swipt.hpp"

#include <cmath>
#include <stdexcept>

namespace irsee {

namespace {

void check(const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& w) {
  if (f.rows() != w.rows() || f.cols() != w.cols())
    throw std::invalid_argument("swipt: beam/channel dimension mismatch");
}

}  // namespace

Eigen::VectorXd swipt_sinr(const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& w,
                           const Eigen::VectorXd& phi, const Eigen::VectorXd& sigma2) {
  check(f, w);
  const Eigen::Index k = f.cols();
  if (phi.size() != k || sigma2.size() != k)
    throw std::invalid_argument("swipt_sinr: per-device vector mismatch");
  const Eigen::MatrixXcd g = f.adjoint() * w;
  Eigen::VectorXd out(k);
  for (Eigen::Index d = 0; d < k; ++d) {
    const double split = 1.0 - phi(d);
    double interference = 0.0;
    for (Eigen::Index j = 0; j < k; ++j)
      if (j != d) interference += std::norm(g(d, j));
    out(d) = split * std::norm(g(d, d)) / (split * interference + sigma2(d));
  }
  return out;
}

PsCoefficients optimize_ps(const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& w,
                           const Eigen::VectorXd& gamma_min, const Eigen::VectorXd& sigma2,
                           double eps) {
  check(f, w);
  const Eigen::Index k = f.cols();
  if (gamma_min.size() != k || sigma2.size() != k)
    throw std::invalid_argument("optimize_ps: per-device vector mismatch");
  if (!(eps > 0.0)) throw std::invalid_argument("optimize_ps: eps must be positive");

  const Eigen::MatrixXcd g = f.adjoint() * w;
  PsCoefficients ps;
  ps.phi = Eigen::VectorXd::Zero(k);
  ps.feasible.assign(static_cast<std::size_t>(k), false);
  for (Eigen::Index d = 0; d < k; ++d) {
    double interference = 0.0;
    for (Eigen::Index j = 0; j < k; ++j)
      if (j != d) interference += std::norm(g(d, j));
    const double denom = std::norm(g(d, d)) - gamma_min(d) * interference;
    if (denom <= gamma_min(d) * sigma2(d)) continue;  // no phi > 0 can meet the rate
    const double phi = 1.0 - gamma_min(d) * sigma2(d) / denom - eps;
    if (phi <= 0.0 || phi >= 1.0) continue;
    ps.phi(d) = phi;
    ps.feasible[static_cast<std::size_t>(d)] = true;
  }
  return ps;
}

Eigen::VectorXd harvested_energy(const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& w,
                                 const Eigen::VectorXd& phi, const Eigen::VectorXd& mu) {
  check(f, w);
  const Eigen::Index k = f.cols();
  if (phi.size() != k || mu.size() != k)
    throw std::invalid_argument("harvested_energy: per-device vector mismatch");
  const Eigen::MatrixXcd g = f.adjoint() * w;
  Eigen::VectorXd out(k);
  for (Eigen::Index d = 0; d < k; ++d) {
    double received = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) received += std::norm(g(d, j));
    out(d) = phi(d) * mu(d) * received;
  }
  return out;
}

double inet_ee(double sum_rate, double radiated_power, double circuit_power, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("inet_ee: eta must be in (0, 1]");
  return sum_rate / (radiated_power / eta + circuit_power);
}

}  // namespace irsee
