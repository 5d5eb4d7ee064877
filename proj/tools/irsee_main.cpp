#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

#include "irsee/matio.hpp"
#include "irsee/sweep.hpp"

namespace {

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"irsee: IRS-assisted two-network energy-efficiency simulator"};

  std::string config_path, sweep_arg, schemes_arg = "lcas_ebcd", bf_arg = "mmse";
  std::string out_dir = ".";
  int trials = 1;
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  std::uint64_t seed = 0;
  bool seed_set = false, trace = false, dump_channels = false;
  std::vector<std::string> overrides;

  app.add_option("--config", config_path, "scenario config file (key = value sections)");
  app.add_option("--sweep", sweep_arg, "VAR=v1,v2,... over p_ap_u|p_ap_i|n_irs|p_c|irs_x|irs_y|a_exponents|eh_min");
  app.add_option("--schemes", schemes_arg, "comma list: ao_sdr,lcas_ebcd,dps:<bits>,rps,no_irs");
  app.add_option("--bf", bf_arg, "beamformer family: mmse|zf")->check(CLI::IsMember({"mmse", "zf"}));
  app.add_option("--trials", trials, "Monte Carlo trials per sweep point")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "override scenario seed");
  app.add_option("--out", out_dir, "output directory for CSV files");
  app.add_flag("--trace", trace, "emit per-trial convergence traces");
  app.add_flag("--dump-channels", dump_channels, "dump trial 0 channel realization (regression format)");
  app.add_option("--set", overrides, "section.key=value config overrides (repeatable)");
  app.add_option("--threads", threads, "worker threads for trials")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  seed_set = seed_opt->count() > 0;

  try {
    irsee::ConfigDoc doc;
    if (!config_path.empty()) doc = irsee::load_config_file(config_path);
    for (const std::string& ov : overrides) {
      const auto eq = ov.find('=');
      if (eq == std::string::npos)
        throw irsee::ConfigError("--set expects section.key=value, got '" + ov + "'");
      doc[ov.substr(0, eq)] = ov.substr(eq + 1);
    }
    if (seed_set) doc["system.seed"] = std::to_string(seed);
    irsee::Scenario scenario = irsee::build_scenario(doc);

    irsee::SweepSpec spec;
    spec.trials = trials;
    if (!sweep_arg.empty()) {
      const auto eq = sweep_arg.find('=');
      if (eq == std::string::npos)
        throw irsee::ConfigError("--sweep expects VAR=v1,v2,..., got '" + sweep_arg + "'");
      spec.variable = irsee::parse_sweep_var(sweep_arg.substr(0, eq));
      spec.values = parse_values(sweep_arg.substr(eq + 1));
    } else {
      spec.variable = irsee::SweepVar::kNone;
      spec.values = {0.0};
    }
    const irsee::BfScheme bf = bf_arg == "zf" ? irsee::BfScheme::kZf : irsee::BfScheme::kMmse;
    {
      std::stringstream ss(schemes_arg);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) spec.schemes.push_back(irsee::parse_scheme(item, bf));
    }
    spec.validate();

    std::filesystem::create_directories(out_dir);
    const irsee::SweepResult result = irsee::run_sweep(spec, scenario, threads);
    irsee::write_file(out_dir + "/trials.csv", irsee::trial_csv(result, scenario));
    irsee::write_file(out_dir + "/aggregate.csv", irsee::aggregate_csv(result));

    if (trace) {
      std::size_t idx = 0;
      for (const irsee::TrialRow& row : result.rows) {
        if (!row.failed && !row.report.trace.empty()) {
          std::ostringstream name;
          name << out_dir << "/trace_" << idx << ".csv";
          irsee::emit_trace(row.report, name.str());
        }
        ++idx;
      }
    }
    if (dump_channels) {
      const irsee::Scenario s0 =
          irsee::apply_sweep_value(scenario, spec.variable, spec.values.front());
      irsee::save_realization(out_dir + "/channels_trial0.mat", irsee::draw_trial(s0, 0));
    }

    std::cout << "wrote " << result.rows.size() << " trial rows ("
              << result.failures << " failures) to " << out_dir << "\n";
    return result.failures == 0 ? 0 : 2;
  } catch (const irsee::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
