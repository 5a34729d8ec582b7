#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "grw/scenarios.hpp"

using namespace grw;

namespace {

Scenario tiny_bench() {
  Scenario s = preset("bench_adv_dominated");
  s.dx = s.dz = 0.025;
  s.final_time = 0.5;
  s.dt = 0;
  s.seed = 4242;
  return s;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("scenario JSON round trip is stable") {
  for (const std::string& name : preset_names()) {
    Scenario s = preset(name);
    std::string a = scenario_to_json(s);
    Scenario back = scenario_from_json(a);
    std::string b = scenario_to_json(back);
    CHECK(a == b);
    CHECK(scenario_hash(s) == scenario_hash(back));
  }
}

TEST_CASE("preset parameters from the published setups") {
  CHECK(preset("aquifer_mc").heterogeneity.kraichnan.num_modes == 100);
  CHECK(preset("aquifer_mc").heterogeneity.kraichnan.mean_level == doctest::Approx(25.0));
  CHECK(preset("aquifer_mc").flow.mean_u == doctest::Approx(0.25));
  CHECK(preset("soil_loam").flow.law.k_sat == doctest::Approx(4.96e-2));
  CHECK(preset("soil_clay").flow.law.k_sat == doctest::Approx(8.2e-4));
  CHECK(preset("soil_clay").flow.law.theta_sat == doctest::Approx(0.446));
  CHECK(preset("bench_adv_dominated").transport.d1 == doctest::Approx(1e-4));
  CHECK(preset("bench_adv_dominated").reaction.monod.alpha1 == doctest::Approx(5.0));
  CHECK_THROWS_AS(preset("no_such_preset"), ConfigError);
}

TEST_CASE("scenario hash changes with any config field") {
  Scenario a = preset("bench_adv_dominated");
  Scenario b = a;
  b.transport.d1 = 2e-4;
  CHECK(scenario_hash(a) != scenario_hash(b));
  Scenario c = a;
  c.seed += 1;
  CHECK(scenario_hash(a) != scenario_hash(c));
}

TEST_CASE("variable-saturation guard rejects non-iterative transport") {
  Scenario s = preset("soil_clay");
  s.transport.solver = SolverKind::Bgrw;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.transport.force_noniterative = true;
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("mass ledger closes exactly for a benchmark run") {
  Scenario s = tiny_bench();
  RunReport r = run_scenario(s);
  REQUIRE(r.species.size() == 2);
  for (const auto& sp : r.species) CHECK(sp.mass_identity_ok);
  // The injected contaminant is advected down; some mass must be present.
  CHECK(r.species[0].lattice_mean_final > 0.0);
}

TEST_CASE("splitting conformance: zero-rate reactions match a reaction-free run bit-exactly") {
  Scenario with = tiny_bench();
  with.reaction.monod.mu_max = 0.0;
  Scenario without = tiny_bench();
  without.reaction.kind = ReactionKind::None;
  RunReport a = run_scenario(with);
  RunReport b = run_scenario(without);
  for (size_t nu = 0; nu < 2; ++nu) {
    REQUIRE(a.mobile_conc[nu].values.size() == b.mobile_conc[nu].values.size());
    for (size_t k = 0; k < a.mobile_conc[nu].values.size(); ++k)
      CHECK(a.mobile_conc[nu].values[k] == b.mobile_conc[nu].values[k]);
  }
}

TEST_CASE("snapshots: reload, determinism, manifest") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "grw_snap_test";
  fs::remove_all(dir);

  Scenario s = tiny_bench();
  s.final_time = 0.1;
  s.output.directory = (dir / "run1").string();
  s.output.snapshot_times = {0.0};
  run_scenario(s);

  // The t=0 snapshot reproduces the initial condition.
  ScalarField c2 = read_field_csv((dir / "run1" / "c2_t0.csv").string());
  for (int j = 0; j < c2.lattice.nz; ++j)
    for (int i = 0; i < c2.lattice.nx; ++i) CHECK(c2(i, j) == 0.1);

  // Same config and seed: byte-identical files.
  Scenario s2 = s;
  s2.output.directory = (dir / "run2").string();
  run_scenario(s2);
  CHECK(slurp((dir / "run1" / "c1_t0.csv").string()) ==
        slurp((dir / "run2" / "c1_t0.csv").string()));
  CHECK(slurp((dir / "run1" / "c2_t0.csv").string()) ==
        slurp((dir / "run2" / "c2_t0.csv").string()));

  // Manifest carries the scenario hash and the file list.
  std::string manifest = slurp((dir / "run1" / "manifest.json").string());
  CHECK(manifest.find("scenario_hash") != std::string::npos);
  CHECK(manifest.find("c1_t0.csv") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("ensemble statistics: degenerate and homogeneous cases") {
  Scenario s = preset("aquifer_mc_desk");
  s.dx = s.dz = 1.0;  // very coarse smoke lattice
  s.final_time = 5.0;
  s.dt = 1.0;
  s.heterogeneity.kraichnan.variance = 0.0;
  // Deterministic allocation makes zero-variance realizations bit-identical.
  s.transport.allocation = AllocMode::Deterministic;
  EnsembleStats stats = run_ensemble(s, 4, 2);
  for (double v : stats.variance_fields[0].values) CHECK(v == 0.0);
  RunReport single = run_scenario(s, 0);
  CHECK(stats.lattice_mean[0] == doctest::Approx(single.species[0].lattice_mean_final));
}
