#pragma once

#include <string>
#include <vector>

#include "irsee/pipeline.hpp"

namespace irsee {

enum class SweepVar {
  kPApU,        // unet.p_ap_max_dbm
  kPApI,        // inet.p_ap_max_dbm
  kNIrs,        // system.n_irs
  kPC,          // algorithm.p_static_ap_dbm (lumped circuit power)
  kIrsX,        // geometry: irs x coordinate (m)
  kIrsY,        // geometry: irs y coordinate (m)
  kAExponents,  // channel: a_ap_irs = v, a_irs_user = v + 0.5
  kEhMin,       // inet.eh_min_dbm
  kNone,        // single-point run
};

std::string to_string(SweepVar v);
SweepVar parse_sweep_var(const std::string& name);

struct SweepSpec {
  SweepVar variable = SweepVar::kNone;
  std::vector<double> values;  // nonempty, strictly monotone (kNone: one dummy)
  int trials = 1;
  std::vector<SchemeId> schemes;

  void validate() const;
};

Scenario apply_sweep_value(const Scenario& base, SweepVar var, double value);

struct TrialRow {
  double value = 0.0;
  SchemeId scheme;
  std::uint64_t trial = 0;
  bool failed = false;
  std::string error;
  EEReport report;
};

struct AggregateRow {
  double value = 0.0;
  SchemeId scheme;
  int trials = 0;
  int failures = 0;
  double mean_unet_ee = 0.0, se_unet_ee = 0.0;
  double mean_unet_rate = 0.0, se_unet_rate = 0.0;
  double mean_inet_ee = 0.0, se_inet_ee = 0.0;
  double mean_inet_rate = 0.0, se_inet_rate = 0.0;
  double mean_iterations = 0.0;
  double converged_fraction = 0.0;
  double unet_feasible_fraction = 0.0;
  double inet_feasible_fraction = 0.0;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<TrialRow> rows;       // fixed order: value-major, scheme, trial
  std::vector<AggregateRow> aggregate;
  int failures = 0;
};

// Runs trials (optionally across threads; aggregation order is fixed by the
// row index, so the thread count never changes the output).
SweepResult run_sweep(const SweepSpec& spec, const Scenario& base, int threads = 1);

extern const char* const kTrialCsvHeader;
extern const char* const kAggregateCsvHeader;

std::string trial_csv(const SweepResult& result, const Scenario& base);
std::string aggregate_csv(const SweepResult& result);

void write_file(const std::string& path, const std::string& content);

}  // namespace irsee
