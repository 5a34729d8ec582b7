// Command-line front end: scenario runs, presets, convergence studies and
// Monte Carlo ensembles.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "grw/scenarios.hpp"
#include "grw/verification.hpp"

namespace {

std::string default_out_dir() {
  const char* env = std::getenv("GRW_OUT_DIR");
  return env ? env : "out";
}

// Dotted-path overrides into the scenario JSON document, e.g.
// transport.d1=2.5e-3 or time.T=5.
grw::Scenario apply_overrides(const grw::Scenario& s,
                              const std::vector<std::string>& overrides) {
  if (overrides.empty()) return s;
  nlohmann::json doc = nlohmann::json::parse(grw::scenario_to_json(s));
  for (const std::string& ov : overrides) {
    auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw grw::ConfigError("override must look like path.to.key=value: " + ov);
    std::string path = ov.substr(0, eq);
    std::string value = ov.substr(eq + 1);
    nlohmann::json* node = &doc;
    size_t pos = 0;
    for (;;) {
      auto dot = path.find('.', pos);
      std::string key = path.substr(pos, dot == std::string::npos ? dot : dot - pos);
      if (dot == std::string::npos) {
        nlohmann::json parsed;
        try {
          parsed = nlohmann::json::parse(value);
        } catch (...) {
          parsed = value;  // bare strings
        }
        (*node)[key] = parsed;
        break;
      }
      node = &(*node)[key];
      pos = dot + 1;
    }
  }
  return grw::scenario_from_json(doc.dump());
}

void print_report(const grw::RunReport& r) {
  std::printf("steps=%d dt=%.6g wall=%.2fs\n", r.steps, r.dt, r.wall_seconds);
  if (r.flow_iter_max > 0)
    std::printf("flow iterations (max per level): %d%s\n", r.flow_iter_max,
                r.flow_converged ? "" : "  [NOT CONVERGED]");
  if (r.transport_iter_max > 0)
    std::printf("transport iterations (max per level): %d%s\n", r.transport_iter_max,
                r.transport_converged ? "" : "  [NOT CONVERGED]");
  for (const auto& sp : r.species) {
    std::printf("%s: mean=%.6e initial=%s remaining=%s mass_ledger=%s\n", sp.name.c_str(),
                sp.lattice_mean_final, grw::count_to_string(sp.initial).c_str(),
                grw::count_to_string(sp.remaining).c_str(),
                sp.mass_identity_ok ? "exact" : "BROKEN");
  }
  if (r.biomass_mean_initial > 0)
    std::printf("biomass mean: %.6e -> %.6e\n", r.biomass_mean_initial, r.biomass_mean_final);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice random-walk solvers for flow and reactive transport"};
  app.require_subcommand(1);

  std::string config_path, preset_name, out_dir = default_out_dir();
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool print_only = false;

  auto* run = app.add_subcommand("run", "run a scenario from a JSON config");
  run->add_option("config", config_path, "scenario JSON file")->required();
  run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--override", overrides, "dotted-path config overrides (key=value)");

  auto* pre = app.add_subcommand("preset", "run (or print) a named preset scenario");
  pre->add_option("name", preset_name, "preset name")->required();
  pre->add_option("--override", overrides, "dotted-path config overrides (key=value)");
  pre->add_option("--seed", seed, "override the scenario seed");
  pre->add_option("--out", out_dir, "output directory");
  pre->add_flag("--print", print_only, "print the scenario JSON and exit");

  std::string case_name, solver_name = "bgrw";
  int levels = 4;
  double base_dx = 0.2;
  bool deterministic = false;
  auto* eoc = app.add_subcommand("eoc", "manufactured-solution refinement study");
  eoc->add_option("case", case_name, "verification case name")->required();
  eoc->add_option("solver", solver_name, "bgrw | grw | bgrw_lscheme")->required();
  eoc->add_option("--levels", levels, "number of refinement levels");
  eoc->add_option("--base-dx", base_dx, "coarsest spatial step");
  eoc->add_option("--seed", seed, "random seed");
  eoc->add_option("--out", out_dir, "output directory");
  eoc->add_flag("--deterministic", deterministic, "deterministic particle allocation");

  int n_real = 16, workers = 1;
  auto* ens = app.add_subcommand("ensemble", "Monte Carlo ensemble over realizations");
  ens->add_option("config", config_path, "scenario JSON file or preset:<name>")->required();
  ens->add_option("--n", n_real, "number of realizations");
  ens->add_option("--workers", workers, "worker threads");
  ens->add_option("--seed", seed, "override the scenario seed");
  ens->add_option("--out", out_dir, "output directory");
  ens->add_option("--override", overrides, "dotted-path config overrides (key=value)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run || *pre) {
      grw::Scenario s = *run ? grw::load_scenario_file(config_path) : grw::preset(preset_name);
      s = apply_overrides(s, overrides);
      if (seed) s.seed = seed;
      if (s.output.directory.empty()) s.output.directory = out_dir + "/" + s.name;
      if (print_only) {
        std::cout << grw::scenario_to_json(s) << "\n";
        return 0;
      }
      grw::RunReport r = grw::run_scenario(s);
      print_report(r);
      return 0;
    }
    if (*eoc) {
      grw::SolverKind solver = solver_name == "bgrw"  ? grw::SolverKind::Bgrw
                               : solver_name == "grw" ? grw::SolverKind::Grw
                               : solver_name == "bgrw_lscheme"
                                   ? grw::SolverKind::BgrwLscheme
                                   : throw grw::ConfigError("unknown solver: " + solver_name);
      grw::RefinementStudy study = grw::run_refinement_study(
          grw::case_from_string(case_name), solver, levels, base_dx, seed ? seed : 1234,
          deterministic);
      std::filesystem::create_directories(out_dir);
      std::string csv = out_dir + "/eoc_" + case_name + "_" + solver_name + ".csv";
      study.write_csv(csv);
      std::printf("%-10s", "dx");
      for (const auto& [field, errs] : study.errors) std::printf(" %12s %6s", field.c_str(), "eoc");
      std::printf("\n");
      for (size_t l = 0; l < study.dxs.size(); ++l) {
        std::printf("%-10.4g", study.dxs[l]);
        for (const auto& [field, errs] : study.errors) {
          std::printf(" %12.4e", errs[l]);
          auto it = study.eocs.find(field);
          if (it != study.eocs.end() && l > 0 && l - 1 < it->second.size())
            std::printf(" %6.2f", it->second[l - 1]);
          else
            std::printf(" %6s", "--");
        }
        std::printf("\n");
      }
      std::printf("written: %s\n", csv.c_str());
      return 0;
    }
    if (*ens) {
      grw::Scenario s = config_path.rfind("preset:", 0) == 0
                            ? grw::preset(config_path.substr(7))
                            : grw::load_scenario_file(config_path);
      s = apply_overrides(s, overrides);
      if (seed) s.seed = seed;
      if (s.output.directory.empty()) s.output.directory = out_dir + "/" + s.name;
      grw::EnsembleStats stats = grw::run_ensemble(s, n_real, workers);
      std::printf("realizations=%d\n", stats.realization_count);
      for (size_t f = 0; f < stats.lattice_mean.size(); ++f)
        std::printf("field %zu: <c>=%.6e  var=%.6e\n", f, stats.lattice_mean[f],
                    stats.lattice_variance[f]);
      return 0;
    }
  } catch (const grw::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const grw::ContractError& e) {
    std::fprintf(stderr, "solver contract violation: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
