#include "irsee/channel.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace irsee {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

Eigen::MatrixXcd cnormal_block(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  return rng.cnormal_matrix(rows, cols);
}

double direction_cosine(const Vec3& from, const Vec3& to) {
  // Arrays are laid out along the x axis; the steering phase depends on the
  // direction cosine of the link onto that axis.
  const double d = distance(from, to);
  if (d == 0.0) return 0.0;
  return (to.x - from.x) / d;
}

Eigen::MatrixXcd rician_matrix(double pl, double k_lin, const Eigen::VectorXcd& a_rx,
                               const Eigen::VectorXcd& a_tx, Rng& rng) {
  const double w_los = std::sqrt(k_lin / (1.0 + k_lin));
  const double w_nlos = std::sqrt(1.0 / (1.0 + k_lin));
  Eigen::MatrixXcd m = w_los * (a_rx * a_tx.adjoint());
  m.noalias() += w_nlos * cnormal_block(rng, a_rx.size(), a_tx.size());
  return std::sqrt(pl) * m;
}

}  // namespace

PhaseShifts::PhaseShifts(Eigen::VectorXcd v) : nu(std::move(v)) {
  for (Eigen::Index i = 0; i < nu.size(); ++i) {
    const double mag = std::abs(nu(i));
    if (mag <= 0.0) throw std::invalid_argument("phase coefficient with zero magnitude");
    nu(i) /= mag;
  }
}

PhaseShifts PhaseShifts::all_ones(Eigen::Index n) {
  PhaseShifts p;
  p.nu = Eigen::VectorXcd::Ones(n);
  return p;
}

PhaseShifts PhaseShifts::from_angles(const Eigen::VectorXd& theta) {
  PhaseShifts p;
  p.nu = (kI * theta.cast<std::complex<double>>()).array().exp();
  return p;
}

Eigen::VectorXd PhaseShifts::theta() const {
  Eigen::VectorXd t(nu.size());
  for (Eigen::Index i = 0; i < nu.size(); ++i) {
    double a = std::arg(nu(i));
    if (a < 0.0) a += 2.0 * M_PI;
    t(i) = a;
  }
  return t;
}

double path_loss(double dist, double exponent, double c0, double d0) {
  if (dist <= 0.0) throw std::invalid_argument("path_loss: distance must be positive");
  return c0 * std::pow(dist / d0, -exponent);
}

Eigen::VectorXcd ula_steering(Eigen::Index n, double cos_psi) {
  Eigen::VectorXcd a(n);
  for (Eigen::Index m = 0; m < n; ++m) a(m) = std::exp(kI * (M_PI * double(m) * cos_psi));
  return a;
}

ChannelRealization draw_channels(const Scenario& s, const std::vector<Vec3>& users,
                                 const std::vector<Vec3>& devices, std::uint64_t trial) {
  if (static_cast<int>(users.size()) != s.k_i ||
      static_cast<int>(devices.size()) != s.k_ei)
    throw std::invalid_argument("draw_channels: position count mismatch");

  ChannelRealization ch;
  ch.user_pos = users;
  ch.device_pos = devices;

  const double c0 = s.c0();
  const double k_lin = s.rician_k();
  const double pl_ap_irs = path_loss(distance(s.ap_pos, s.irs_pos), s.a_ap_irs, c0, s.d0);
  const Eigen::VectorXcd a_irs =
      ula_steering(s.n_irs, direction_cosine(s.irs_pos, s.ap_pos));
  const Eigen::VectorXcd a_ap_u =
      ula_steering(s.m_u, direction_cosine(s.ap_pos, s.irs_pos));
  const Eigen::VectorXcd a_ap_i =
      ula_steering(s.m_i, direction_cosine(s.ap_pos, s.irs_pos));

  {
    Rng rng(s.seed, trial, Stream::kApIrsUnet);
    ch.g_r = rician_matrix(pl_ap_irs, k_lin, a_irs, a_ap_u, rng);
  }
  {
    Rng rng(s.seed, trial, Stream::kApIrsInet);
    ch.g_d_mat = rician_matrix(pl_ap_irs, k_lin, a_irs, a_ap_i, rng);
  }
  // IRS -> receiver links share the Rician structure: the LoS part is the
  // steering vector toward the receiver, so receivers in the same region see
  // correlated phase alignment (what phase cooperation exploits).
  auto reflected_link = [&](const Vec3& pos, Rng& rng) {
    const double pl = path_loss(distance(s.irs_pos, pos), s.a_irs_user, c0, s.d0);
    const double w_los = std::sqrt(k_lin / (1.0 + k_lin));
    const double w_nlos = std::sqrt(1.0 / (1.0 + k_lin));
    Eigen::VectorXcd h = w_los * ula_steering(s.n_irs, direction_cosine(s.irs_pos, pos));
    h.noalias() += w_nlos * rng.cnormal_vector(s.n_irs);
    return (std::sqrt(pl) * h).eval();
  };
  {
    Rng rng(s.seed, trial, Stream::kIrsUserFading);
    for (const auto& pos : users) ch.h_r_users.push_back(reflected_link(pos, rng));
  }
  {
    Rng rng(s.seed, trial, Stream::kIrsDeviceFading);
    for (const auto& pos : devices) ch.h_r_devices.push_back(reflected_link(pos, rng));
  }
  {
    Rng rng(s.seed, trial, Stream::kDirectUsers);
    for (const auto& pos : users) {
      const double pl = path_loss(distance(s.ap_pos, pos), s.a_ap_user, c0, s.d0);
      ch.g_dir_users.push_back(std::sqrt(pl) * rng.cnormal_vector(s.m_u));
    }
  }
  {
    Rng rng(s.seed, trial, Stream::kDirectDevices);
    for (const auto& pos : devices) {
      const double pl = path_loss(distance(s.ap_pos, pos), s.a_ap_user, c0, s.d0);
      ch.g_dir_devices.push_back(std::sqrt(pl) * rng.cnormal_vector(s.m_i));
    }
  }
  return ch;
}

ChannelRealization draw_trial(const Scenario& s, std::uint64_t trial) {
  Rng rng_u(s.seed, trial, Stream::kPlaceUsers);
  Rng rng_d(s.seed, trial, Stream::kPlaceDevices);
  const auto users = place_receivers(s.user_region, s.k_i, rng_u);
  const auto devices = place_receivers(s.device_region, s.k_ei, rng_d);
  return draw_channels(s, users, devices, trial);
}

Eigen::VectorXcd effective_channel(const Eigen::VectorXcd& h_r, const PhaseShifts& nu,
                                   const Eigen::MatrixXcd& g_mat,
                                   const Eigen::VectorXcd& g_dir) {
  if (h_r.size() != g_mat.rows() || nu.size() != g_mat.rows() ||
      g_dir.size() != g_mat.cols())
    throw std::invalid_argument("effective_channel: dimension mismatch");
  // f^H = h^H diag(nu) G + g^H  =>  f = G^H (conj(nu) .* h) + g.
  return g_mat.adjoint() * nu.nu.conjugate().cwiseProduct(h_r) + g_dir;
}

Eigen::MatrixXcd effective_channels(const Eigen::MatrixXcd& g_mat,
                                    const std::vector<Eigen::VectorXcd>& h_r,
                                    const std::vector<Eigen::VectorXcd>& g_dir,
                                    const PhaseShifts& nu, bool with_irs) {
  if (h_r.size() != g_dir.size())
    throw std::invalid_argument("effective_channels: user count mismatch");
  const Eigen::Index m = g_mat.cols();
  Eigen::MatrixXcd f(m, static_cast<Eigen::Index>(h_r.size()));
  for (std::size_t k = 0; k < h_r.size(); ++k)
    f.col(static_cast<Eigen::Index>(k)) =
        with_irs ? effective_channel(h_r[k], nu, g_mat, g_dir[k]) : g_dir[k];
  return f;
}

}  // namespace irsee
