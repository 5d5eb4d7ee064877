#include "irsee/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace irsee {

namespace {

double log2_1p(double x) { return std::log2(1.0 + x); }

Eigen::VectorXd uniform_vec(double v, Eigen::Index k) { return Eigen::VectorXd::Constant(k, v); }

struct ScaledMetrics {
  double sum_rate_bps = 0.0;
  Eigen::VectorXd sinrs;
};

ScaledMetrics metrics_at_scale(const Eigen::VectorXd& signal, const Eigen::VectorXd& interf,
                               const Eigen::VectorXd& sigma2, double bandwidth, double t) {
  ScaledMetrics m;
  m.sinrs.resize(signal.size());
  for (Eigen::Index k = 0; k < signal.size(); ++k) {
    m.sinrs(k) = t * signal(k) / (t * interf(k) + sigma2(k));
    m.sum_rate_bps += bandwidth * log2_1p(m.sinrs(k));
  }
  return m;
}

}  // namespace

std::string to_string(const SchemeId& id) {
  std::string base;
  switch (id.alg) {
    case PhaseAlg::kAoSdr: base = "ao_sdr"; break;
    case PhaseAlg::kLcasEbcd: base = "lcas_ebcd"; break;
    case PhaseAlg::kDps:
      base = "dps:" + std::to_string(id.dps_bits);
      if (id.dps_source == PhaseAlg::kLcasEbcd) base += "@lcas";
      break;
    case PhaseAlg::kRps: base = "rps"; break;
    case PhaseAlg::kNoIrs: base = "no_irs"; break;
  }
  return base + "/" + to_string(id.bf);
}

SchemeId parse_scheme(const std::string& text, BfScheme bf) {
  SchemeId id;
  id.bf = bf;
  if (text == "ao_sdr") {
    id.alg = PhaseAlg::kAoSdr;
  } else if (text == "lcas_ebcd") {
    id.alg = PhaseAlg::kLcasEbcd;
  } else if (text.rfind("dps", 0) == 0) {
    id.alg = PhaseAlg::kDps;
    std::string rest = text.substr(3);
    if (!rest.empty() && rest[0] == ':') rest = rest.substr(1);
    const auto at = rest.find('@');
    if (at != std::string::npos) {
      const std::string src = rest.substr(at + 1);
      if (src == "lcas")
        id.dps_source = PhaseAlg::kLcasEbcd;
      else if (src == "ao")
        id.dps_source = PhaseAlg::kAoSdr;
      else
        throw std::invalid_argument("unknown dps source '" + src + "'");
      rest = rest.substr(0, at);
    }
    if (!rest.empty()) {
      id.dps_bits = std::stoi(rest);
      if (id.dps_bits < 1) throw std::invalid_argument("dps bits must be >= 1");
    }
  } else if (text == "rps") {
    id.alg = PhaseAlg::kRps;
  } else if (text == "no_irs") {
    id.alg = PhaseAlg::kNoIrs;
  } else {
    throw std::invalid_argument("unknown scheme '" + text + "'");
  }
  return id;
}

UnetDesign design_unet(const Scenario& s, const Eigen::MatrixXcd& f, BfScheme scheme) {
  const Eigen::Index k = f.cols();
  const Eigen::VectorXd gamma = uniform_vec(s.sinr_min(), k);
  const Eigen::VectorXd sigma2 = uniform_vec(s.noise_variance(), k);
  const double budget = s.p_ap_u_max();
  const double p_c = s.circuit_power_unet();
  const double eta = s.amp_efficiency;
  const double bw = s.bandwidth_hz;

  // EE of a candidate after its own optimal up-scaling; used both to rank
  // MMSE regularizations on the lambda grid and to pick the final scale.
  auto best_scaled = [&](const BeamformingSolution& sol) {
    const Eigen::MatrixXcd g = f.adjoint() * sol.w;
    Eigen::VectorXd signal(k), interf(k);
    for (Eigen::Index u = 0; u < k; ++u) {
      signal(u) = std::norm(g(u, u));
      double sum = 0.0;
      for (Eigen::Index j = 0; j < k; ++j)
        if (j != u) sum += std::norm(g(u, j));
      interf(u) = sum;
    }
    const double p0 = sol.total_power();
    const double tmax = p0 > 0.0 ? std::max(1.0, budget / p0) : 1.0;

    auto ee_at = [&](double t) {
      const ScaledMetrics m = metrics_at_scale(signal, interf, sigma2, bw, t);
      return m.sum_rate_bps / (t * p0 / eta + p_c);
    };
    // Absolute log grid (independent of the budget, which only truncates it):
    // enlarging the budget can then never lower the chosen rate.
    constexpr double kStep = 0.025;  // decades
    double best_t = 1.0, best_ee = ee_at(1.0);
    for (int i = 1;; ++i) {
      const double t = std::min(std::pow(10.0, kStep * i), tmax);
      const double v = ee_at(t);
      if (v > best_ee) {
        best_ee = v;
        best_t = t;
      }
      if (t >= tmax) break;
    }
    for (int i = -10; i <= 10; ++i) {
      const double t = std::min(tmax, std::max(1.0, best_t * std::pow(10.0, kStep * i / 10.0)));
      const double v = ee_at(t);
      if (v > best_ee) {
        best_ee = v;
        best_t = t;
      }
    }
    return std::pair<double, double>(best_t, best_ee);
  };

  auto ee_eval = [&](const BeamformingSolution& sol) { return best_scaled(sol).second; };

  BeamformingSolution base =
      min_power_beams(f, scheme, gamma, sigma2, budget, ee_eval, s.line_search_step);

  UnetDesign d;
  const auto [t, ee] = best_scaled(base);
  d.scale = t;
  d.bf = base;
  d.bf.w *= std::sqrt(t);
  d.bf.powers *= t;

  const double radiated = d.bf.total_power();
  d.report.radiated_power_w = radiated;
  d.report.circuit_power_w = p_c;
  d.report.sinrs = achieved_sinr(f, d.bf.w, sigma2);
  d.report.sum_rate_bps = 0.0;
  for (Eigen::Index u = 0; u < k; ++u)
    d.report.sum_rate_bps += bw * log2_1p(d.report.sinrs(u));
  d.report.ee = d.report.sum_rate_bps / (radiated / eta + p_c);
  d.report.budget_ok = radiated <= budget * (1.0 + 1e-9);
  d.report.sinr_ok = true;
  for (Eigen::Index u = 0; u < k; ++u)
    if (d.report.sinrs(u) < gamma(u) * (1.0 - 1e-6)) d.report.sinr_ok = false;
  d.report.feasible = d.report.budget_ok && d.report.sinr_ok;
  d.bf.feasible = d.report.feasible;
  return d;
}

namespace {

Eigen::MatrixXcd unet_channels(const ChannelRealization& ch, const PhaseShifts& nu,
                               bool with_irs) {
  return effective_channels(ch.g_r, ch.h_r_users, ch.g_dir_users, nu, with_irs);
}

UnetResult finish_fixed(const Scenario& s, const ChannelRealization& ch, BfScheme bf,
                        const PhaseShifts& nu, bool with_irs) {
  UnetResult r;
  r.phases = nu;
  r.design = design_unet(s, unet_channels(ch, nu, with_irs), bf);
  r.trace = {r.design.report.ee};
  r.iterations = 1;
  r.converged = true;
  return r;
}

}  // namespace

UnetResult design_fixed_phases(const Scenario& s, const ChannelRealization& ch, BfScheme bf,
                               const PhaseShifts& nu, bool with_irs) {
  return finish_fixed(s, ch, bf, nu, with_irs);
}

UnetResult run_ao(const Scenario& s, const ChannelRealization& ch, BfScheme bf, double xi,
                  Rng& randomization_rng) {
  const Eigen::VectorXd gamma = uniform_vec(s.sinr_min(), s.k_i);
  const Eigen::VectorXd sigma2 = uniform_vec(s.noise_variance(), s.k_i);

  UnetResult r;
  r.phases = PhaseShifts::all_ones(s.n_irs);
  r.design = design_unet(s, unet_channels(ch, r.phases, true), bf);
  r.trace = {r.design.report.ee};

  for (int iter = 1; iter <= s.max_outer; ++iter) {
    r.iterations = iter;
    try {
      const LiftedInstance inst =
          lift(ch.g_r, ch.h_r_users, ch.g_dir_users, r.design.bf.w, gamma, sigma2);
      sdp::SolverOptions opts;
      opts.tol = 1e-7;  // margins are consumed at 1e-6 relative
      opts.accept_tol = 1e-6;
      const SdpSolution sdp = solve_sdp(inst, opts);
      const RandomizationResult rand =
          gaussian_randomize(sdp, inst, s.randomizations, randomization_rng);
      const UnetDesign cand = design_unet(s, unet_channels(ch, rand.phases, true), bf);
      // The randomized update is stochastic; keep the previous iterate unless
      // it actually improves the objective.
      if (cand.report.ee > r.design.report.ee) {
        r.phases = rand.phases;
        r.design = cand;
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("ao iteration " + std::to_string(iter) + ": " + e.what());
    }
    r.trace.push_back(r.design.report.ee);
    const double prev = r.trace[r.trace.size() - 2];
    if (std::abs(r.design.report.ee - prev) <
        xi * std::max(std::abs(r.design.report.ee), 1e-300)) {
      r.converged = true;
      break;
    }
  }
  return r;
}

UnetResult run_lcas(const Scenario& s, const ChannelRealization& ch, BfScheme bf, double xi) {
  const EbcdInstance inst = build_instance(ch.g_r, ch.h_r_users, ch.g_dir_users);
  EbcdOptions opts;
  opts.xi = xi;
  opts.max_sweeps = s.max_sweeps;

  UnetResult r;
  r.phases = PhaseShifts::all_ones(s.n_irs);
  r.design = design_unet(s, unet_channels(ch, r.phases, true), bf);
  r.trace = {r.design.report.ee};

  for (int iter = 1; iter <= s.max_outer; ++iter) {
    r.iterations = iter;
    try {
      const PhaseShifts cand_nu = run_ebcd(inst, r.phases, opts);
      const UnetDesign cand = design_unet(s, unet_channels(ch, cand_nu, true), bf);
      if (cand.report.ee > r.design.report.ee) {
        r.phases = cand_nu;
        r.design = cand;
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("lcas iteration " + std::to_string(iter) + ": " + e.what());
    }
    r.trace.push_back(r.design.report.ee);
    const double prev = r.trace[r.trace.size() - 2];
    if (std::abs(r.design.report.ee - prev) <
        xi * std::max(std::abs(r.design.report.ee), 1e-300)) {
      r.converged = true;
      break;
    }
  }
  return r;
}

PhaseShifts quantize_phases(const PhaseShifts& nu, int bits) {
  if (bits < 1) throw std::invalid_argument("quantize_phases: bits must be >= 1");
  const double levels = std::pow(2.0, bits);
  const double step = 2.0 * M_PI / levels;
  Eigen::VectorXd theta = nu.theta();
  for (Eigen::Index i = 0; i < theta.size(); ++i)
    theta(i) = step * std::round(theta(i) / step);
  return PhaseShifts::from_angles(theta);
}

InetSolution phase_cooperation(const PhaseShifts& phases, const Scenario& s,
                               const ChannelRealization& ch, BfScheme bf, bool with_irs) {
  const Eigen::Index k = s.k_ei;
  const Eigen::VectorXd gamma = uniform_vec(s.sinr_min(), k);
  const Eigen::VectorXd sigma2 = uniform_vec(s.noise_variance(), k);
  const Eigen::VectorXd mu = uniform_vec(s.eh_efficiency, k);
  const double eps = s.ps_slack;
  const double budget = s.p_ap_i_max();
  const double p_c = s.circuit_power_inet();
  const double bw = s.bandwidth_hz;

  const Eigen::MatrixXcd f =
      effective_channels(ch.g_d_mat, ch.h_r_devices, ch.g_dir_devices, phases, with_irs);

  // Rates are pinned near the target by the splitter closed form, so the EE
  // objective is decreasing in radiated power: minimum-power beams, then the
  // smallest up-scaling whose splitters clear every harvesting threshold.
  const double rate_at_targets = bw * k * log2_1p(s.sinr_min());
  auto ee_eval = [&](const BeamformingSolution& sol) {
    return rate_at_targets / (sol.total_power() / s.amp_efficiency + p_c);
  };

  BeamformingSolution base =
      min_power_beams(f, bf, gamma, sigma2, budget, ee_eval, s.line_search_step);

  const Eigen::MatrixXcd g = f.adjoint() * base.w;
  double t_needed = 1.0;
  const double eh_min = s.eh_min();
  for (Eigen::Index d = 0; d < k; ++d) {
    double interference = 0.0, received = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
      const double p = std::norm(g(d, j));
      received += p;
      if (j != d) interference += p;
    }
    const double margin = std::norm(g(d, d)) - gamma(d) * interference;
    if (margin <= 0.0 || received <= 0.0) continue;  // hopeless device, flagged later
    // phi_d(t) = 1 - gamma sigma2 / (t * margin) - eps and harvested_d(t) =
    // phi_d(t) mu t received >= eh_min solve to a per-device minimal scale.
    const double t_eh =
        (eh_min / (mu(d) * received) + gamma(d) * sigma2(d) / margin) / (1.0 - eps);
    const double t_phi = (1.0 + 1e-6) * gamma(d) * sigma2(d) / margin / (1.0 - eps);
    t_needed = std::max({t_needed, t_eh * (1.0 + 1e-9), t_phi});
  }
  const double p0 = base.total_power();
  const double t_cap = p0 > 0.0 ? std::max(1.0, budget / p0) : 1.0;
  const double t = std::min(t_needed, t_cap);

  InetSolution sol;
  sol.w = base.w * std::sqrt(t);
  sol.ps = optimize_ps(f, sol.w, gamma, sigma2, eps);

  // With the splitters fixed, decoding sees noise sigma2/(1-phi): re-solve the
  // beams at the inflated noise, then correct the scale if harvesting dipped.
  Eigen::VectorXd sigma2_eff = sigma2;
  for (Eigen::Index d = 0; d < k; ++d) {
    const double split = 1.0 - sol.ps.phi(d);
    if (split > 0.0 && sol.ps.feasible[static_cast<std::size_t>(d)]) sigma2_eff(d) = sigma2(d) / split;
  }
  try {
    BeamformingSolution resolved =
        min_power_beams(f, bf, gamma, sigma2_eff, budget, ee_eval, s.line_search_step);
    Eigen::VectorXd harvested = harvested_energy(f, resolved.w, sol.ps.phi, mu);
    double t2 = 1.0;
    for (Eigen::Index d = 0; d < k; ++d)
      if (sol.ps.feasible[static_cast<std::size_t>(d)] && harvested(d) > 0.0)
        t2 = std::max(t2, eh_min / harvested(d) * (1.0 + 1e-9));
    const double p1 = resolved.total_power();
    t2 = std::min(t2, p1 > 0.0 ? std::max(1.0, budget / p1) : 1.0);
    sol.w = resolved.w * std::sqrt(t2);
  } catch (const BfError&) {
    // keep the scaled base solution
  }

  sol.swipt.sinr_id = swipt_sinr(f, sol.w, sol.ps.phi, sigma2);
  sol.swipt.harvested = harvested_energy(f, sol.w, sol.ps.phi, mu);
  sol.swipt.rates.resize(k);
  sol.swipt.rate_ok.assign(static_cast<std::size_t>(k), false);
  sol.swipt.eh_ok.assign(static_cast<std::size_t>(k), false);
  sol.swipt.phi_ok.assign(static_cast<std::size_t>(k), false);
  sol.swipt.sum_rate = 0.0;
  for (Eigen::Index d = 0; d < k; ++d) {
    sol.swipt.rates(d) = bw * log2_1p(sol.swipt.sinr_id(d));
    const bool rate_ok = sol.swipt.sinr_id(d) >= gamma(d) * (1.0 - 1e-6);
    const bool phi_ok = sol.ps.phi(d) > 0.0 && sol.ps.phi(d) < 1.0;
    const bool eh_ok = sol.swipt.harvested(d) >= eh_min * (1.0 - 1e-9);
    sol.swipt.rate_ok[static_cast<std::size_t>(d)] = rate_ok;
    sol.swipt.phi_ok[static_cast<std::size_t>(d)] = phi_ok;
    sol.swipt.eh_ok[static_cast<std::size_t>(d)] = eh_ok;
    // Devices with no feasible splitter are flagged and excluded from the sum.
    if (rate_ok && phi_ok) sol.swipt.sum_rate += sol.swipt.rates(d);
  }
  const double radiated = sol.w.colwise().squaredNorm().sum();
  sol.swipt.budget_ok = radiated <= budget * (1.0 + 1e-9);
  sol.swipt.ee = inet_ee(sol.swipt.sum_rate, radiated, p_c, s.amp_efficiency);
  sol.swipt.feasible = sol.swipt.budget_ok;
  for (Eigen::Index d = 0; d < k; ++d)
    if (!sol.swipt.rate_ok[d] || !sol.swipt.eh_ok[d] || !sol.swipt.phi_ok[d])
      sol.swipt.feasible = false;

  sol.report.sum_rate_bps = sol.swipt.sum_rate;
  sol.report.radiated_power_w = radiated;
  sol.report.circuit_power_w = p_c;
  sol.report.ee = sol.swipt.ee;
  sol.report.sinrs = sol.swipt.sinr_id;
  sol.report.budget_ok = sol.swipt.budget_ok;
  sol.report.sinr_ok = true;
  for (bool ok : sol.swipt.rate_ok)
    if (!ok) sol.report.sinr_ok = false;
  sol.report.feasible = sol.swipt.feasible;
  return sol;
}

TrialOutcome apply_baseline(const SchemeId& id, const Scenario& s, const ChannelRealization& ch,
                            std::uint64_t trial) {
  UnetResult unet;
  bool with_irs = true;
  switch (id.alg) {
    case PhaseAlg::kAoSdr: {
      Rng rng(s.seed, trial, Stream::kRandomization);
      unet = run_ao(s, ch, id.bf, s.xi, rng);
      break;
    }
    case PhaseAlg::kLcasEbcd:
      unet = run_lcas(s, ch, id.bf, s.xi);
      break;
    case PhaseAlg::kDps: {
      UnetResult cont;
      if (id.dps_source == PhaseAlg::kLcasEbcd) {
        cont = run_lcas(s, ch, id.bf, s.xi);
      } else {
        Rng rng(s.seed, trial, Stream::kRandomization);
        cont = run_ao(s, ch, id.bf, s.xi, rng);
      }
      unet = design_fixed_phases(s, ch, id.bf, quantize_phases(cont.phases, id.dps_bits), true);
      unet.iterations = cont.iterations;
      unet.converged = cont.converged;
      break;
    }
    case PhaseAlg::kRps: {
      Rng rng(s.seed, trial, Stream::kRandomPhases);
      Eigen::VectorXd theta(s.n_irs);
      for (Eigen::Index i = 0; i < s.n_irs; ++i) theta(i) = 2.0 * M_PI * rng.uniform();
      unet = design_fixed_phases(s, ch, id.bf, PhaseShifts::from_angles(theta), true);
      break;
    }
    case PhaseAlg::kNoIrs:
      with_irs = false;
      unet = design_fixed_phases(s, ch, id.bf, PhaseShifts::all_ones(s.n_irs), false);
      break;
  }

  TrialOutcome out;
  out.phases = unet.phases;
  out.unet_bf = unet.design.bf;
  out.inet = phase_cooperation(unet.phases, s, ch, id.bf, with_irs);

  out.report.scheme = id;
  out.report.unet = unet.design.report;
  out.report.inet = out.inet.report;
  out.report.inet_eh_ok = true;
  out.report.inet_phi_ok = true;
  for (bool ok : out.inet.swipt.eh_ok)
    if (!ok) out.report.inet_eh_ok = false;
  for (bool ok : out.inet.swipt.phi_ok)
    if (!ok) out.report.inet_phi_ok = false;
  out.report.iterations_outer = unet.iterations;
  out.report.converged = unet.converged;
  out.report.trace = unet.trace;
  return out;
}

void emit_trace(const EEReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "iteration,ee\n";
  for (std::size_t i = 0; i < report.trace.size(); ++i) out << i << "," << report.trace[i] << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace irsee
