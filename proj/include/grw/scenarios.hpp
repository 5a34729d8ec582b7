#pragma once

// Scenario presets, configuration schema, time-stepping orchestration and
// output writing. Hosts the advection-dominated benchmark, the heterogeneous
// aquifer Monte Carlo study and the variably saturated soil experiments.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "grw/flow.hpp"
#include "grw/heterogeneity.hpp"
#include "grw/lattice.hpp"
#include "grw/reactions.hpp"
#include "grw/transport.hpp"

namespace grw {

struct Box {
  double x_lo = 0, x_hi = 0, z_lo = 0, z_hi = 0;
  bool contains(double x, double z) const {
    return x >= x_lo - 1e-12 && x <= x_hi + 1e-12 && z >= z_lo - 1e-12 && z <= z_hi + 1e-12;
  }
};

// Piecewise-constant field specification: a base value overridden inside
// boxes (later boxes win).
struct ValueSpec {
  double base = 0;
  struct Region {
    Box box;
    double value = 0;
  };
  std::vector<Region> regions;

  double eval(double x, double z) const {
    double v = base;
    for (const Region& r : regions)
      if (r.box.contains(x, z)) v = r.value;
    return v;
  }
};

// Time-dependent boundary value forms used by the presets.
struct BoundaryValueSpec {
  enum class Kind { Constant, Hydrostatic, Ramp };
  Kind kind = Kind::Constant;
  double value = 0;        // Constant
  double water_table = 0;  // Hydrostatic: psi = water_table - z
  // Ramp: start + slope*t/t1 for t <= t1, `after` beyond t1.
  double start = 0, slope = 0, t1 = 1, after = 0;

  double eval(double x, double z, double t) const;
};

enum class FlowKind { None, ConstantVelocity, KraichnanVelocity, Richards };

struct FlowBoundary {
  Edge edge = Edge::Left;
  double lo = -1e300, hi = 1e300;
  BcKind kind = BcKind::NoFlux;
  BoundaryValueSpec value;
};

struct FlowSpec {
  FlowKind kind = FlowKind::None;
  double theta = 1.0;  // constant water content unless Richards
  double u = 0, v = 0;  // ConstantVelocity
  double mean_u = 0;    // KraichnanVelocity
  ConstitutiveLaw law;  // Richards
  LSchemeConfig lscheme{1.0, 1e-6, 1e-6, 50000};
  std::vector<FlowBoundary> boundaries;
  BcKind default_bc = BcKind::NoFlux;
  BoundaryValueSpec initial_psi;
  bool one_sided_boundary_velocity = false;
};

struct SpeciesBoundary {
  Edge edge = Edge::Left;
  double lo = -1e300, hi = 1e300;
  BcKind kind = BcKind::NoFlux;
  double value = 0;  // Dirichlet concentration
};

struct SpeciesSpec {
  std::string name;
  ValueSpec initial;
  std::vector<SpeciesBoundary> boundaries;
  BcKind default_bc = BcKind::NoFlux;
};

// Volumetric reset applied after every time step (continuous injection,
// boundary stripes). Listed order is application order.
struct ResetRegion {
  int species = 0;  // index into transport.species
  Box box;
  double value = 0;
};

struct TransportSpec {
  SolverKind solver = SolverKind::Bgrw;
  double d1 = 0.01, d2 = 0.01;
  AllocMode allocation = AllocMode::Randomized;
  LSchemeConfig lscheme{1.0, 1e-6, 1e-6, 2000};
  int grw_velocity_target = 1;
  bool force_noniterative = false;  // override the variable-theta guard
  bool strict_restrictions = true;  // site-wise |u|<=r_x checks (see presets)
  std::vector<SpeciesSpec> species;
  std::vector<ResetRegion> resets;
};

struct ReactionSpec {
  ReactionKind kind = ReactionKind::None;
  MonodParams monod;
  bool constant_biomass = false;
  ValueSpec c3_initial;
};

struct HeterogeneitySpec {
  enum class Target { None, Velocity, Ksat };
  Target target = Target::None;
  KraichnanConfig kraichnan;
};

struct OutputSpec {
  std::string directory;  // empty: no files
  std::vector<double> snapshot_times;
  bool write_run_log = false;
};

struct Scenario {
  int schema_version = 1;
  std::string name = "custom";
  double x0 = 0, x1 = 1, z0 = 0, z1 = 1, dx = 0.1, dz = 0.1;
  double final_time = 1.0;
  double dt = 0;  // 0: largest admissible step with a 5% margin
  std::uint64_t seed = 12345;
  FlowSpec flow;
  TransportSpec transport;
  ReactionSpec reaction;
  HeterogeneitySpec heterogeneity;
  OutputSpec output;

  Lattice2D lattice() const { return Lattice2D::make(x0, x1, z0, z1, dx, dz); }
  void validate() const;
};

// JSON round-trip of the full scenario schema.
std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const std::string& text);
Scenario load_scenario_file(const std::string& path);

// FNV-1a over the canonical JSON document.
std::uint64_t scenario_hash(const Scenario& s);

struct SpeciesReport {
  std::string name;
  Count initial = 0;
  Count remaining = 0;
  StepLedger ledger;
  double lattice_mean_final = 0;
  bool mass_identity_ok = false;
};

struct RunReport {
  std::vector<SpeciesReport> species;
  double biomass_mean_initial = 0, biomass_mean_final = 0;
  double theta_mean_final = 0;
  int flow_iter_max = 0;
  bool flow_converged = true;
  int transport_iter_max = 0;
  bool transport_converged = true;
  long reaction_clamp_events = 0;
  int steps = 0;
  double dt = 0;
  double wall_seconds = 0;
  // final states for downstream analysis
  std::vector<ScalarField> mobile_conc;
  ScalarField c3;
  FlowState flow_state;
};

// Executes the time loop: flow update, transport step per mobile species,
// reaction step, immobile update, boundary/injection resets; writes snapshots
// and the run log; returns totals and statistics. realization selects the
// random-field sample for heterogeneous scenarios.
RunReport run_scenario(const Scenario& s, int realization = 0);

// Known presets; throws ConfigError for unknown names.
Scenario preset(const std::string& name);
std::vector<std::string> preset_names();

// Runs independent realizations (derived RNG streams) and accumulates
// site-wise statistics over the mobile species and the biomass. Writes
// stats_mean_<species>.csv, stats_var_<species>.csv and ensemble_summary.csv
// when the scenario has an output directory.
EnsembleStats run_ensemble(const Scenario& s, int realizations, int workers);

// Writes one snapshot (per-field lattice CSV plus manifest.json).
void write_snapshot(const std::map<std::string, const ScalarField*>& fields, double t,
                    const Scenario& s, std::vector<std::string>* manifest_entries = nullptr);

// Side-by-side unbiased-vs-biased benchmark at T=1: relative lattice-average
// errors of the unbiased run against the biased reference. paper_scale runs
// the published discretization (hour-scale); otherwise a coarsened reference
// with both solvers at the Peclet-2 dispersion level.
struct GrwBgrwComparison {
  double eps_c1 = 0, eps_c2 = 0;
  RunReport grw, bgrw;
};
GrwBgrwComparison run_grw_vs_bgrw_benchmark(bool paper_scale, std::uint64_t seed = 777);

}  // namespace grw
