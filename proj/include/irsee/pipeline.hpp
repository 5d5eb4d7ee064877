#pragma once

#include <string>
#include <vector>

#include "irsee/beamforming.hpp"
#include "irsee/channel.hpp"
#include "irsee/phase_ebcd.hpp"
#include "irsee/phase_sdr.hpp"
#include "irsee/scenario.hpp"
#include "irsee/swipt.hpp"

namespace irsee {

enum class PhaseAlg { kAoSdr, kLcasEbcd, kDps, kRps, kNoIrs };

struct SchemeId {
  PhaseAlg alg = PhaseAlg::kAoSdr;
  BfScheme bf = BfScheme::kMmse;
  int dps_bits = 2;  // phase resolution bits when alg == kDps
  PhaseAlg dps_source = PhaseAlg::kAoSdr;  // continuous solution being quantized
};

std::string to_string(const SchemeId& id);
// Accepts "ao_sdr", "lcas_ebcd", "dps:<bits>" (optionally "dps:<bits>@lcas"
// to quantize the coordinate-descent solution instead), "rps", "no_irs".
SchemeId parse_scheme(const std::string& text, BfScheme bf);

struct NetReport {
  double sum_rate_bps = 0.0;
  double radiated_power_w = 0.0;
  double circuit_power_w = 0.0;
  double ee = 0.0;  // bit/J
  Eigen::VectorXd sinrs;
  bool sinr_ok = true;
  bool budget_ok = true;
  bool feasible = true;
};

struct EEReport {
  SchemeId scheme;
  NetReport unet;
  NetReport inet;
  bool inet_eh_ok = true;
  bool inet_phi_ok = true;
  int iterations_outer = 0;
  bool converged = true;
  std::vector<double> trace;  // U-net EE after each outer iteration
};

// U-net beamforming stage: minimum-power beams at the SINR targets for the
// requested scheme, then a deterministic search over uniform power up-scaling
// t in [1, budget/P_min] maximizing EE (up-scaling preserves the targets).
struct UnetDesign {
  BeamformingSolution bf;  // final (scaled) beams
  double scale = 1.0;
  NetReport report;
};

UnetDesign design_unet(const Scenario& s, const Eigen::MatrixXcd& f, BfScheme scheme);

struct UnetResult {
  PhaseShifts phases;
  UnetDesign design;
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
};

// Alternating optimization: beamformer update at fixed phases, lifted-SDP
// phase update (with Gaussian randomization) at fixed beams; a candidate is
// kept only when it improves EE, so the trace is monotone.
UnetResult run_ao(const Scenario& s, const ChannelRealization& ch, BfScheme bf, double xi,
                  Rng& randomization_rng);

// Low-complexity alternative: coordinate-descent phases on the summed channel
// gains (beam-free objective), then the same beamforming stage.
UnetResult run_lcas(const Scenario& s, const ChannelRealization& ch, BfScheme bf, double xi);

// Fixed-phase variants (quantized, random, absent IRS).
UnetResult design_fixed_phases(const Scenario& s, const ChannelRealization& ch, BfScheme bf,
                               const PhaseShifts& nu, bool with_irs);

PhaseShifts quantize_phases(const PhaseShifts& nu, int bits);

// IoT-network stage at fixed (cooperated) phases: minimum-power beams, the
// smallest uniform up-scaling whose closed-form splitters satisfy every
// harvesting threshold, the phi closed form, a beam re-solve at the
// splitting-inflated noise, and a final scale correction for harvesting.
struct InetSolution {
  Eigen::MatrixXcd w;
  PsCoefficients ps;
  SwiptReport swipt;
  NetReport report;
};

InetSolution phase_cooperation(const PhaseShifts& phases, const Scenario& s,
                               const ChannelRealization& ch, BfScheme bf, bool with_irs = true);

struct TrialOutcome {
  EEReport report;
  PhaseShifts phases;
  BeamformingSolution unet_bf;
  InetSolution inet;
};

// Runs one scheme end to end on one realization (U-net phase+beam design,
// then phase cooperation to the I-net).
TrialOutcome apply_baseline(const SchemeId& id, const Scenario& s, const ChannelRealization& ch,
                            std::uint64_t trial);

// Iteration-vs-EE trace as CSV.
void emit_trace(const EEReport& report, const std::string& path);

}  // namespace irsee
