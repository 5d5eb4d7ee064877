#include "irsee/phase_ebcd.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace irsee {

double EbcdInstance::objective(const PhaseShifts& nu) const {
  if (nu.size() != n()) throw std::invalid_argument("ebcd objective: size mismatch");
  const std::complex<double> quad = nu.nu.dot(q * nu.nu);  // nu^H Q nu
  const std::complex<double> cross = nu.nu.dot(vartheta_tilde);
  return quad.real() + 2.0 * cross.real() + const_s;
}

EbcdInstance build_instance(const Eigen::MatrixXcd& g_mat,
                            const std::vector<Eigen::VectorXcd>& h_r,
                            const std::vector<Eigen::VectorXcd>& g_dir) {
  if (h_r.size() != g_dir.size())
    throw std::invalid_argument("ebcd build: user count mismatch");
  const Eigen::Index n = g_mat.rows();

  EbcdInstance inst;
  inst.q = Eigen::MatrixXcd::Zero(n, n);
  inst.vartheta_tilde = Eigen::VectorXcd::Zero(n);
  inst.const_s = 0.0;
  for (std::size_t k = 0; k < h_r.size(); ++k) {
    if (h_r[k].size() != n || g_dir[k].size() != g_mat.cols())
      throw std::invalid_argument("ebcd build: channel dimension mismatch");
    // A_k(n, m) = conj(conj(h_k(n)) G(n, m)) = h_k(n) conj(G(n, m)).
    Eigen::MatrixXcd a = g_mat.conjugate();
    for (Eigen::Index row = 0; row < n; ++row) a.row(row) *= h_r[k](row);
    Eigen::VectorXcd d = g_dir[k].conjugate();
    inst.q.noalias() += a * a.adjoint();
    inst.vartheta_tilde.noalias() += a * d;
    inst.const_s += d.squaredNorm();
    inst.a_rk.push_back(std::move(a));
    inst.d_k.push_back(std::move(d));
  }
  return inst;
}

PhaseShifts update_element(const EbcdInstance& inst, const PhaseShifts& nu, Eigen::Index n) {
  if (nu.size() != inst.n()) throw std::invalid_argument("ebcd update: size mismatch");
  if (n < 0 || n >= inst.n()) throw std::out_of_range("ebcd update: element index");
  // f as a function of nu_n alone is const + 2 Re(conj(nu_n) c_n) with
  //   c_n = sum_{l != n} Q(n,l) nu_l + t_n.
  const std::complex<double> c_n =
      (inst.q.row(n) * nu.nu)(0) - inst.q(n, n) * nu.nu(n) + inst.vartheta_tilde(n);
  PhaseShifts out = nu;
  const double mag = std::abs(c_n);
  out.nu(n) = mag > 0.0 ? c_n / mag : 1.0;
  return out;
}

PhaseShifts run_ebcd(const EbcdInstance& inst, const PhaseShifts& nu0,
                     const EbcdOptions& opts, EbcdTrace* trace) {
  const Eigen::Index n = inst.n();
  const std::size_t users = inst.a_rk.size();
  if (nu0.size() != n) throw std::invalid_argument("run_ebcd: size mismatch");

  Eigen::VectorXcd nu = nu0.nu;
  // Running aggregates y_k = A_k^H nu + d_k; the element update and the
  // objective both come from them in O(K M) per element.
  std::vector<Eigen::VectorXcd> y(users);
  for (std::size_t k = 0; k < users; ++k) y[k] = inst.a_rk[k].adjoint() * nu + inst.d_k[k];

  auto objective_now = [&]() {
    double f = 0.0;
    for (const auto& yk : y) f += yk.squaredNorm();
    return f;
  };

  double obj = objective_now();
  if (trace) {
    trace->objective.clear();
    trace->objective.push_back(obj);
    trace->sweeps = 0;
    trace->converged = false;
  }

  Eigen::VectorXd q_diag(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double q_ii = 0.0;
    for (std::size_t k = 0; k < users; ++k) q_ii += inst.a_rk[k].row(i).squaredNorm();
    q_diag(i) = q_ii;
  }

  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    for (Eigen::Index i = 0; i < n; ++i) {
      // c_i = sum_k A_k.row(i) y_k - Q(i,i) nu_i; same value the Q-row form
      // in update_element produces.
      std::complex<double> c{0.0, 0.0};
      for (std::size_t k = 0; k < users; ++k) c += (inst.a_rk[k].row(i) * y[k])(0);
      c -= q_diag(i) * nu(i);
      const double mag = std::abs(c);
      const std::complex<double> next = mag > 0.0 ? c / mag : std::complex<double>(1.0, 0.0);
      const std::complex<double> delta = next - nu(i);
      if (delta != 0.0) {
        for (std::size_t k = 0; k < users; ++k)
          y[k] += delta * inst.a_rk[k].row(i).conjugate().transpose();
        nu(i) = next;
      }
    }
    const double prev = obj;
    obj = objective_now();
    if (trace) {
      trace->objective.push_back(obj);
      trace->sweeps = sweep;
    }
    if (std::abs(obj - prev) < opts.xi * std::max(std::abs(obj), 1e-300)) {
      if (trace) trace->converged = true;
      break;
    }
  }
  PhaseShifts out;
  out.nu = std::move(nu);
  return out;
}

void dump_trace_csv(const EbcdTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "sweep,objective\n";
  for (std::size_t i = 0; i < trace.objective.size(); ++i)
    out << i << "," << trace.objective[i] << "\n";
}

}  // namespace irsee
