#pragma once

#include <Eigen/Dense>
#include <vector>

#include "irsee/scenario.hpp"

namespace irsee {

// Unit-modulus reflection coefficients: Theta = diag(nu), nu_n = e^{j theta_n}.
struct PhaseShifts {
  Eigen::VectorXcd nu;

  PhaseShifts() = default;
  explicit PhaseShifts(Eigen::VectorXcd v);
  static PhaseShifts all_ones(Eigen::Index n);
  static PhaseShifts from_angles(const Eigen::VectorXd& theta);

  Eigen::Index size() const { return nu.size(); }
  // Angles in [0, 2*pi).
  Eigen::VectorXd theta() const;
};

// One Monte Carlo draw of every channel in both networks.
struct ChannelRealization {
  Eigen::MatrixXcd g_r;      // N x M_U, user-network AP -> IRS
  Eigen::MatrixXcd g_d_mat;  // N x M_I, IoT-network AP -> IRS
  std::vector<Eigen::VectorXcd> h_r_users;     // K_I vectors of length N, IRS -> user
  std::vector<Eigen::VectorXcd> h_r_devices;   // K_EI vectors of length N, IRS -> device
  std::vector<Eigen::VectorXcd> g_dir_users;   // K_I vectors of length M_U, AP -> user
  std::vector<Eigen::VectorXcd> g_dir_devices; // K_EI vectors of length M_I, AP -> device
  std::vector<Vec3> user_pos;
  std::vector<Vec3> device_pos;
};

// C0 * (d/d0)^-a, linear power gain.
double path_loss(double dist, double exponent, double c0, double d0);

// Half-wavelength ULA steering vector; cos_psi is the direction cosine of the
// link onto the array axis.
Eigen::VectorXcd ula_steering(Eigen::Index n, double cos_psi);

// Draws every link: AP-IRS Rician (rank-one LoS steering outer product plus
// i.i.d. NLoS), IRS->receiver Rayleigh, direct links complex Gaussian, each
// scaled so E|entry|^2 equals the link path loss. Each block draws from its
// own substream of (scenario.seed, trial).
ChannelRealization draw_channels(const Scenario& s, const std::vector<Vec3>& users,
                                 const std::vector<Vec3>& devices, std::uint64_t trial);

// Convenience: placement + draw for one trial.
ChannelRealization draw_trial(const Scenario& s, std::uint64_t trial);

// f with f^H = h_r^H diag(nu) G + g_dir^H.
Eigen::VectorXcd effective_channel(const Eigen::VectorXcd& h_r, const PhaseShifts& nu,
                                   const Eigen::MatrixXcd& g_mat,
                                   const Eigen::VectorXcd& g_dir);

// Columns f_k for every user of one network; with_irs=false drops the
// reflected path (direct links only).
Eigen::MatrixXcd effective_channels(const Eigen::MatrixXcd& g_mat,
                                    const std::vector<Eigen::VectorXcd>& h_r,
                                    const std::vector<Eigen::VectorXcd>& g_dir,
                                    const PhaseShifts& nu, bool with_irs = true);

}  // namespace irsee
