#include "irsee/sweep.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "irsee/parallel.hpp"

namespace irsee {

const char* const kTrialCsvHeader =
    "variable,value,scheme,bf,trial,seed,n_irs,m_u,m_i,k_i,k_ei,p_ap_u_dbm,p_ap_i_dbm,"
    "p_c_dbm,unet_sum_rate_bps,unet_power_w,unet_ee,unet_feasible,inet_sum_rate_bps,"
    "inet_power_w,inet_ee,inet_feasible,iterations,converged,failed,error";

const char* const kAggregateCsvHeader =
    "variable,value,scheme,bf,trials,failures,mean_unet_ee,se_unet_ee,mean_unet_rate,"
    "se_unet_rate,mean_inet_ee,se_inet_ee,mean_inet_rate,se_inet_rate,mean_iterations,"
    "converged_fraction,unet_feasible_fraction,inet_feasible_fraction";

std::string to_string(SweepVar v) {
  switch (v) {
    case SweepVar::kPApU: return "p_ap_u";
    case SweepVar::kPApI: return "p_ap_i";
    case SweepVar::kNIrs: return "n_irs";
    case SweepVar::kPC: return "p_c";
    case SweepVar::kIrsX: return "irs_x";
    case SweepVar::kIrsY: return "irs_y";
    case SweepVar::kAExponents: return "a_exponents";
    case SweepVar::kEhMin: return "eh_min";
    case SweepVar::kNone: return "none";
  }
  return "?";
}

SweepVar parse_sweep_var(const std::string& name) {
  for (SweepVar v : {SweepVar::kPApU, SweepVar::kPApI, SweepVar::kNIrs, SweepVar::kPC,
                     SweepVar::kIrsX, SweepVar::kIrsY, SweepVar::kAExponents, SweepVar::kEhMin,
                     SweepVar::kNone})
    if (to_string(v) == name) return v;
  throw std::invalid_argument("unknown sweep variable '" + name + "'");
}

void SweepSpec::validate() const {
  if (values.empty()) throw std::invalid_argument("sweep: values must be nonempty");
  if (trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
  if (schemes.empty()) throw std::invalid_argument("sweep: schemes must be nonempty");
  for (std::size_t i = 1; i < values.size(); ++i) {
    const bool up = values[1] > values[0];
    if ((up && values[i] <= values[i - 1]) || (!up && values[i] >= values[i - 1]))
      throw std::invalid_argument("sweep: values must be strictly monotone");
  }
}

Scenario apply_sweep_value(const Scenario& base, SweepVar var, double value) {
  Scenario s = base;
  switch (var) {
    case SweepVar::kPApU: s.p_ap_u_max_dbm = value; break;
    case SweepVar::kPApI: s.p_ap_i_max_dbm = value; break;
    case SweepVar::kNIrs:
      if (value != std::floor(value) || value < 1.0)
        throw std::invalid_argument("sweep: n_irs values must be positive integers");
      s.n_irs = static_cast<int>(value);
      break;
    case SweepVar::kPC: s.p_static_ap_dbm = value; break;
    case SweepVar::kIrsX: s.irs_pos.x = value; break;
    case SweepVar::kIrsY: s.irs_pos.y = value; break;
    case SweepVar::kAExponents:
      s.a_ap_irs = value;
      s.a_irs_user = value + 0.5;
      break;
    case SweepVar::kEhMin: s.eh_min_dbm = value; break;
    case SweepVar::kNone: break;
  }
  s.validate();
  return s;
}

namespace {

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / double(xs.size());
}

double stderr_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / double(xs.size() - 1) / double(xs.size()));
}

std::string csv_escape(const std::string& s) {
  std::string out;
  for (char c : s) out += (c == ',' || c == '\n' || c == '"') ? '_' : c;
  return out;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, const Scenario& base, int threads) {
  spec.validate();
  SweepResult result;
  result.spec = spec;

  struct Task {
    double value;
    SchemeId scheme;
    std::uint64_t trial;
    const Scenario* scenario;
  };
  std::vector<Scenario> scenarios;
  scenarios.reserve(spec.values.size());
  for (double v : spec.values) scenarios.push_back(apply_sweep_value(base, spec.variable, v));

  std::vector<Task> tasks;
  for (std::size_t vi = 0; vi < spec.values.size(); ++vi)
    for (const SchemeId& scheme : spec.schemes)
      for (int t = 0; t < spec.trials; ++t)
        tasks.push_back({spec.values[vi], scheme, static_cast<std::uint64_t>(t), &scenarios[vi]});

  result.rows.resize(tasks.size());
  parallel_for(tasks.size(), threads, [&](std::size_t i) {
    const Task& task = tasks[i];
    TrialRow row;
    row.value = task.value;
    row.scheme = task.scheme;
    row.trial = task.trial;
    try {
      const ChannelRealization ch = draw_trial(*task.scenario, task.trial);
      row.report = apply_baseline(task.scheme, *task.scenario, ch, task.trial).report;
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
    result.rows[i] = std::move(row);
  });

  for (const TrialRow& row : result.rows)
    if (row.failed) ++result.failures;

  // Aggregate per (value, scheme) in the fixed task order.
  for (double v : spec.values)
    for (const SchemeId& scheme : spec.schemes) {
      AggregateRow agg;
      agg.value = v;
      agg.scheme = scheme;
      std::vector<double> uee, urate, iee, irate;
      int converged = 0, ufeas = 0, ifeas = 0;
      double iters = 0.0;
      for (const TrialRow& row : result.rows) {
        if (row.value != v || to_string(row.scheme) != to_string(scheme)) continue;
        ++agg.trials;
        if (row.failed) {
          ++agg.failures;
          continue;
        }
        uee.push_back(row.report.unet.ee);
        urate.push_back(row.report.unet.sum_rate_bps);
        iee.push_back(row.report.inet.ee);
        irate.push_back(row.report.inet.sum_rate_bps);
        iters += row.report.iterations_outer;
        converged += row.report.converged ? 1 : 0;
        ufeas += row.report.unet.feasible ? 1 : 0;
        ifeas += row.report.inet.feasible ? 1 : 0;
      }
      const int ok = agg.trials - agg.failures;
      agg.mean_unet_ee = mean_of(uee);
      agg.se_unet_ee = stderr_of(uee);
      agg.mean_unet_rate = mean_of(urate);
      agg.se_unet_rate = stderr_of(urate);
      agg.mean_inet_ee = mean_of(iee);
      agg.se_inet_ee = stderr_of(iee);
      agg.mean_inet_rate = mean_of(irate);
      agg.se_inet_rate = stderr_of(irate);
      agg.mean_iterations = ok > 0 ? iters / ok : 0.0;
      agg.converged_fraction = ok > 0 ? double(converged) / ok : 0.0;
      agg.unet_feasible_fraction = ok > 0 ? double(ufeas) / ok : 0.0;
      agg.inet_feasible_fraction = ok > 0 ? double(ifeas) / ok : 0.0;
      result.aggregate.push_back(agg);
    }
  return result;
}

std::string trial_csv(const SweepResult& result, const Scenario& base) {
  std::ostringstream out;
  out << kTrialCsvHeader << "\n";
  for (const TrialRow& row : result.rows) {
    const Scenario s = apply_sweep_value(base, result.spec.variable, row.value);
    out << to_string(result.spec.variable) << "," << num(row.value) << ","
        << to_string(row.scheme) << "," << to_string(row.scheme.bf) << "," << row.trial << ","
        << s.seed << "," << s.n_irs << "," << s.m_u << "," << s.m_i << "," << s.k_i << ","
        << s.k_ei << "," << num(s.p_ap_u_max_dbm) << "," << num(s.p_ap_i_max_dbm) << ","
        << num(s.p_static_ap_dbm) << ",";
    if (row.failed) {
      out << ",,,,,,,," << row.report.iterations_outer << ",0,1," << csv_escape(row.error)
          << "\n";
      continue;
    }
    const EEReport& r = row.report;
    out << num(r.unet.sum_rate_bps) << "," << num(r.unet.radiated_power_w) << ","
        << num(r.unet.ee) << "," << (r.unet.feasible ? 1 : 0) << ","
        << num(r.inet.sum_rate_bps) << "," << num(r.inet.radiated_power_w) << ","
        << num(r.inet.ee) << "," << (r.inet.feasible ? 1 : 0) << "," << r.iterations_outer
        << "," << (r.converged ? 1 : 0) << ",0,\n";
  }
  return out.str();
}

std::string aggregate_csv(const SweepResult& result) {
  std::ostringstream out;
  out << kAggregateCsvHeader << "\n";
  for (const AggregateRow& a : result.aggregate) {
    out << to_string(result.spec.variable) << "," << num(a.value) << "," << to_string(a.scheme)
        << "," << to_string(a.scheme.bf) << "," << a.trials << "," << a.failures << ","
        << num(a.mean_unet_ee) << "," << num(a.se_unet_ee) << "," << num(a.mean_unet_rate)
        << "," << num(a.se_unet_rate) << "," << num(a.mean_inet_ee) << "," << num(a.se_inet_ee)
        << "," << num(a.mean_inet_rate) << "," << num(a.se_inet_rate) << ","
        << num(a.mean_iterations) << "," << num(a.converged_fraction) << ","
        << num(a.unet_feasible_fraction) << "," << num(a.inet_feasible_fraction) << "\n";
  }
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace irsee
