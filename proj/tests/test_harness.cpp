#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "irsee/sweep.hpp"

using namespace irsee;

namespace {

Scenario tiny() {
  Scenario s = build_scenario({});
  s.n_irs = 8;
  s.m_u = 4;
  s.m_i = 4;
  s.k_i = 2;
  s.k_ei = 2;
  s.seed = 21;
  return s;
}

SweepSpec spec_for(SweepVar var, std::vector<double> values, int trials,
                   const std::string& schemes) {
  SweepSpec spec;
  spec.variable = var;
  spec.values = std::move(values);
  spec.trials = trials;
  std::size_t pos = 0;
  std::string text = schemes;
  while (!text.empty()) {
    const auto comma = text.find(',');
    spec.schemes.push_back(
        parse_scheme(text.substr(0, comma), BfScheme::kMmse));
    if (comma == std::string::npos) break;
    text = text.substr(comma + 1);
    (void)pos;
  }
  return spec;
}

}  // namespace

TEST_CASE("sweep specs validate") {
  SweepSpec s = spec_for(SweepVar::kNIrs, {8, 16}, 2, "no_irs");
  CHECK_NOTHROW(s.validate());
  s.values = {};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.values = {8, 8};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.values = {16, 8};  // decreasing is fine as long as strictly monotone
  CHECK_NOTHROW(s.validate());
  s.trials = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("sweep values map onto the scenario") {
  const Scenario base = tiny();
  CHECK(apply_sweep_value(base, SweepVar::kPApU, 17.0).p_ap_u_max_dbm == 17.0);
  CHECK(apply_sweep_value(base, SweepVar::kPApI, 11.0).p_ap_i_max_dbm == 11.0);
  CHECK(apply_sweep_value(base, SweepVar::kNIrs, 16.0).n_irs == 16);
  CHECK_THROWS_AS(apply_sweep_value(base, SweepVar::kNIrs, 7.5), std::invalid_argument);
  CHECK(apply_sweep_value(base, SweepVar::kPC, 8.0).p_static_ap_dbm == 8.0);
  CHECK(apply_sweep_value(base, SweepVar::kIrsX, -3.0).irs_pos.x == -3.0);
  CHECK(apply_sweep_value(base, SweepVar::kIrsY, 4.0).irs_pos.y == 4.0);
  const Scenario exps = apply_sweep_value(base, SweepVar::kAExponents, 2.2);
  CHECK(exps.a_ap_irs == 2.2);
  CHECK(exps.a_irs_user == 2.7);
  CHECK(apply_sweep_value(base, SweepVar::kEhMin, -45.0).eh_min_dbm == -45.0);
  for (SweepVar v : {SweepVar::kPApU, SweepVar::kPApI, SweepVar::kNIrs, SweepVar::kPC,
                     SweepVar::kIrsX, SweepVar::kIrsY, SweepVar::kAExponents, SweepVar::kEhMin})
    CHECK(parse_sweep_var(to_string(v)) == v);
}

TEST_CASE("csv headers are stable") {
  CHECK(std::string(kTrialCsvHeader) ==
        "variable,value,scheme,bf,trial,seed,n_irs,m_u,m_i,k_i,k_ei,p_ap_u_dbm,p_ap_i_dbm,"
        "p_c_dbm,unet_sum_rate_bps,unet_power_w,unet_ee,unet_feasible,inet_sum_rate_bps,"
        "inet_power_w,inet_ee,inet_feasible,iterations,converged,failed,error");
  CHECK(std::string(kAggregateCsvHeader) ==
        "variable,value,scheme,bf,trials,failures,mean_unet_ee,se_unet_ee,mean_unet_rate,"
        "se_unet_rate,mean_inet_ee,se_inet_ee,mean_inet_rate,se_inet_rate,mean_iterations,"
        "converged_fraction,unet_feasible_fraction,inet_feasible_fraction");
}

TEST_CASE("single-point no-IRS sweep is reproducible byte for byte") {
  const Scenario base = tiny();
  const SweepSpec spec = spec_for(SweepVar::kNone, {0.0}, 1, "no_irs");
  const SweepResult a = run_sweep(spec, base, 1);
  const SweepResult b = run_sweep(spec, base, 1);
  CHECK(trial_csv(a, base) == trial_csv(b, base));
  CHECK(aggregate_csv(a) == aggregate_csv(b));
  CHECK(a.failures == 0);
  REQUIRE(a.rows.size() == 1);
  CHECK(!a.rows[0].failed);
}

TEST_CASE("thread count does not change the output") {
  const Scenario base = tiny();
  const SweepSpec spec = spec_for(SweepVar::kNIrs, {4, 8}, 3, "lcas_ebcd,no_irs");
  const SweepResult serial = run_sweep(spec, base, 1);
  const SweepResult threaded = run_sweep(spec, base, 4);
  CHECK(trial_csv(serial, base) == trial_csv(threaded, base));
  CHECK(aggregate_csv(serial) == aggregate_csv(threaded));
}

TEST_CASE("aggregates combine per point and scheme in order") {
  const Scenario base = tiny();
  const SweepSpec spec = spec_for(SweepVar::kNIrs, {4, 8}, 4, "lcas_ebcd,rps");
  const SweepResult res = run_sweep(spec, base, 2);
  REQUIRE(res.rows.size() == 2 * 2 * 4);
  REQUIRE(res.aggregate.size() == 4);
  CHECK(res.aggregate[0].value == 4.0);
  CHECK(to_string(res.aggregate[0].scheme) == "lcas_ebcd/mmse");
  CHECK(res.aggregate[1].value == 4.0);
  CHECK(to_string(res.aggregate[1].scheme) == "rps/mmse");
  CHECK(res.aggregate[2].value == 8.0);
  for (const AggregateRow& agg : res.aggregate) {
    CHECK(agg.trials == 4);
    CHECK(agg.failures == 0);
    CHECK(agg.mean_unet_ee > 0.0);
    CHECK(agg.se_unet_ee >= 0.0);
    CHECK(agg.converged_fraction == 1.0);
  }
  // Trial rows are value-major, then scheme, then trial.
  CHECK(res.rows[0].value == 4.0);
  CHECK(res.rows[0].trial == 0);
  CHECK(to_string(res.rows[0].scheme) == "lcas_ebcd/mmse");
  CHECK(to_string(res.rows[4].scheme) == "rps/mmse");
  CHECK(res.rows[8].value == 8.0);
}

TEST_CASE("failed trials are recorded as rows, not crashes") {
  SweepResult res;
  res.spec = spec_for(SweepVar::kNone, {0.0}, 1, "no_irs");
  TrialRow row;
  row.value = 0.0;
  row.scheme = res.spec.schemes[0];
  row.trial = 0;
  row.failed = true;
  row.error = "synthetic, with, commas";
  res.rows.push_back(row);
  res.failures = 1;
  const std::string csv = trial_csv(res, tiny());
  CHECK(csv.find(",1,synthetic_ with_ commas") != std::string::npos);
}

TEST_CASE("write_file round trip") {
  const std::string path = "harness_tmp.csv";
  write_file(path, "a,b\n1,2\n");
  std::ifstream in(path);
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(all == "a,b\n1,2\n");
  std::remove(path.c_str());
}
