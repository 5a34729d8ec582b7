#include <cmath>

#include "grw/scenarios.hpp"

namespace grw {

namespace {

MonodParams aquifer_monod() {
  MonodParams m;
  m.mu_max = 5.0;
  m.m1 = 2.0;
  m.m2 = 0.2;
  m.alpha1 = 1.0;
  m.alpha2 = 3.0;
  m.yield = 0.09;
  m.kd = 0.05;
  m.gamma = 1;
  m.c3_max = 1.0;
  return m;
}

// Advection-dominated biodegradation benchmark: vertical uniform flow through
// a strip, contaminant injected over part of the inflow boundary, constant
// biomass.
Scenario bench_adv_dominated() {
  Scenario s;
  s.name = "bench_adv_dominated";
  s.x0 = 0;
  s.x1 = 0.5;
  s.z0 = 0;
  s.z1 = 1.0;
  s.dx = s.dz = 2e-3;
  s.final_time = 5.0;
  s.dt = 0;
  s.flow.kind = FlowKind::ConstantVelocity;
  s.flow.theta = 0.2;
  s.flow.u = 0.0;
  s.flow.v = -1.0;
  s.transport.solver = SolverKind::Grw;
  s.transport.d1 = s.transport.d2 = 1e-4;
  s.transport.grw_velocity_target = 1;

  SpeciesSpec c1;
  c1.name = "c1";
  c1.initial.base = 0.0;
  c1.default_bc = BcKind::ZeroGradient;
  c1.boundaries.push_back({Edge::Top, 0.225, 0.275, BcKind::Dirichlet, 1.0});
  c1.boundaries.push_back({Edge::Top, -1e300, 0.225 - 1e-9, BcKind::Dirichlet, 0.0});
  c1.boundaries.push_back({Edge::Top, 0.275 + 1e-9, 1e300, BcKind::Dirichlet, 0.0});

  SpeciesSpec c2;
  c2.name = "c2";
  c2.initial.base = 0.1;
  c2.default_bc = BcKind::ZeroGradient;
  c2.boundaries.push_back({Edge::Top, 0.225, 0.275, BcKind::Dirichlet, 0.0});
  c2.boundaries.push_back({Edge::Top, -1e300, 0.225 - 1e-9, BcKind::Dirichlet, 0.1});
  c2.boundaries.push_back({Edge::Top, 0.275 + 1e-9, 1e300, BcKind::Dirichlet, 0.1});

  s.transport.species = {c1, c2};

  s.reaction.kind = ReactionKind::Monod;
  MonodParams m;
  m.mu_max = 1.0;  // rate scale of the benchmark kinetics
  m.m1 = 0.1;
  m.m2 = 0.1;
  m.alpha1 = 5.0;
  m.alpha2 = 0.5;
  s.reaction.monod = m;
  s.reaction.constant_biomass = true;
  s.reaction.c3_initial.base = 1.0;
  return s;
}

// Heterogeneous aquifer Monte Carlo study: Kraichnan velocity approximation,
// double Monod kinetics with biomass growth, continuous injection.
Scenario aquifer_mc() {
  Scenario s;
  s.name = "aquifer_mc";
  s.x0 = 0;
  s.x1 = 80;
  s.z0 = 0;
  s.z1 = 20;
  s.dx = s.dz = 0.125;
  s.final_time = 300.0;
  s.dt = 1.0;
  s.flow.kind = FlowKind::KraichnanVelocity;
  s.flow.theta = 1.0;
  s.flow.mean_u = 0.25;  // -J<K> with J = -0.8/80 and <K> = 25
  s.transport.solver = SolverKind::Grw;
  s.transport.d1 = s.transport.d2 = 0.01;
  s.transport.grw_velocity_target = 2;

  s.heterogeneity.target = HeterogeneitySpec::Target::Velocity;
  s.heterogeneity.kraichnan.num_modes = 100;
  s.heterogeneity.kraichnan.variance = 0.1;
  s.heterogeneity.kraichnan.corr_len_x = 1.0;
  s.heterogeneity.kraichnan.corr_len_z = 1.0;
  s.heterogeneity.kraichnan.mean_level = 25.0;
  s.heterogeneity.kraichnan.convention = MeanConvention::ArithmeticK;

  Box injection{1.5, 3.5, 9.0, 11.0};

  SpeciesSpec c1;
  c1.name = "c1";
  c1.initial.base = 0.0;
  c1.initial.regions.push_back({injection, 2.0});
  c1.default_bc = BcKind::Outflow;  // right boundary: free particle removal
  c1.boundaries.push_back({Edge::Top, -1e300, 1e300, BcKind::Dirichlet, 0.0});
  c1.boundaries.push_back({Edge::Bottom, -1e300, 1e300, BcKind::Dirichlet, 0.0});
  c1.boundaries.push_back({Edge::Left, -1e300, 1e300, BcKind::Dirichlet, 0.0});
  c1.boundaries.push_back({Edge::Right, -1e300, 1e300, BcKind::Outflow, 0.0});

  SpeciesSpec c2;
  c2.name = "c2";
  c2.initial.base = 5.0;
  c2.initial.regions.push_back({injection, 0.0});
  c2.default_bc = BcKind::Outflow;
  c2.boundaries.push_back({Edge::Top, -1e300, 1e300, BcKind::Dirichlet, 5.0});
  c2.boundaries.push_back({Edge::Bottom, -1e300, 1e300, BcKind::Dirichlet, 5.0});
  c2.boundaries.push_back({Edge::Left, -1e300, 1e300, BcKind::Dirichlet, 5.0});
  c2.boundaries.push_back({Edge::Right, -1e300, 1e300, BcKind::Outflow, 0.0});

  s.transport.species = {c1, c2};

  // Oxygen strip of width 1.5 along top, left and bottom boundaries (applied
  // before the injection resets so the injection region wins on overlap).
  s.transport.resets.push_back({1, Box{0.0, 80.0, 18.5, 20.0}, 5.0});
  s.transport.resets.push_back({1, Box{0.0, 80.0, 0.0, 1.5}, 5.0});
  s.transport.resets.push_back({1, Box{0.0, 1.5, 0.0, 20.0}, 5.0});
  // Continuous injection: both species reset to initial values every step.
  s.transport.resets.push_back({0, injection, 2.0});
  s.transport.resets.push_back({1, injection, 0.0});

  s.reaction.kind = ReactionKind::Monod;
  s.reaction.monod = aquifer_monod();
  s.reaction.constant_biomass = false;
  s.reaction.c3_initial.base = 0.001;
  return s;
}

// Variably saturated soil infiltration with biodegradation; van
// Genuchten-Mualem closure, heterogeneous saturated conductivity.
Scenario soil(const std::string& which) {
  Scenario s;
  s.name = "soil_" + which;
  s.x0 = 0;
  s.x1 = 2;
  s.z0 = 0;
  s.z1 = 3;
  s.dx = s.dz = 0.05;
  s.final_time = 3.0;  // desk-scale default; override for longer runs
  s.dt = 0;
  s.flow.kind = FlowKind::Richards;
  if (which == "loam")
    s.flow.law = ConstitutiveLaw::van_genuchten(0.131, 0.396, 0.423, 2.06, 4.96e-2);
  else if (which == "clay")
    s.flow.law = ConstitutiveLaw::van_genuchten(0.0, 0.446, 0.152, 1.17, 8.2e-4);
  else
    throw ConfigError("unknown soil: " + which);
  s.flow.lscheme = LSchemeConfig{1.0, 1e-6, 1e-6, 50000};
  s.flow.initial_psi.kind = BoundaryValueSpec::Kind::Hydrostatic;
  s.flow.initial_psi.water_table = 0.5;
  s.flow.default_bc = BcKind::NoFlux;
  // Infiltration drive on the open top strip; fresh-water contact at
  // hydrostatic equilibrium on the lower parts of the vertical walls.
  FlowBoundary top;
  top.edge = Edge::Top;
  top.lo = 0.5;
  top.hi = 1.5;
  top.kind = BcKind::Dirichlet;
  top.value.kind = BoundaryValueSpec::Kind::Ramp;
  top.value.start = -0.2;
  top.value.slope = 2.7;
  top.value.t1 = 1.0;
  top.value.after = 0.2;
  s.flow.boundaries.push_back(top);
  FlowBoundary left;
  left.edge = Edge::Left;
  left.lo = 0.0;
  left.hi = 0.5;
  left.kind = BcKind::Dirichlet;
  left.value.kind = BoundaryValueSpec::Kind::Hydrostatic;
  left.value.water_table = 0.5;
  s.flow.boundaries.push_back(left);
  FlowBoundary right = left;
  right.edge = Edge::Right;
  s.flow.boundaries.push_back(right);

  s.transport.solver = SolverKind::BgrwLscheme;
  s.transport.d1 = s.transport.d2 = 0.003;
  s.transport.lscheme = LSchemeConfig{1.0, 1e-6, 1e-6, 2000};
  // Infiltration transients exceed the Peclet-2 bound at high-conductivity
  // sites; run with clamped upstream weights as the published study does.
  s.transport.strict_restrictions = false;

  SpeciesSpec c1;
  c1.name = "c1";
  c1.initial.base = 0.0;
  c1.initial.regions.push_back({Box{0.5, 1.5, 3.0 - s.dz / 2, 3.0}, 2.0});
  c1.default_bc = BcKind::NoFlux;
  c1.boundaries.push_back({Edge::Top, 0.5, 1.5, BcKind::Dirichlet, 2.0});
  c1.boundaries.push_back({Edge::Left, 0.0, 0.5, BcKind::Dirichlet, 0.0});
  c1.boundaries.push_back({Edge::Right, 0.0, 0.5, BcKind::Dirichlet, 0.0});

  SpeciesSpec c2;
  c2.name = "c2";
  c2.initial.base = 5.0;
  c2.initial.regions.push_back({Box{0.5, 1.5, 3.0 - s.dz / 2, 3.0}, 0.0});
  c2.default_bc = BcKind::NoFlux;
  c2.boundaries.push_back({Edge::Top, 0.5, 1.5, BcKind::Dirichlet, 0.0});
  c2.boundaries.push_back({Edge::Left, 0.0, 0.5, BcKind::Dirichlet, 5.0});
  c2.boundaries.push_back({Edge::Right, 0.0, 0.5, BcKind::Dirichlet, 5.0});

  s.transport.species = {c1, c2};

  s.reaction.kind = ReactionKind::Monod;
  s.reaction.monod = aquifer_monod();
  s.reaction.constant_biomass = false;
  s.reaction.c3_initial.base = 0.001;

  s.heterogeneity.target = HeterogeneitySpec::Target::Ksat;
  s.heterogeneity.kraichnan.num_modes = 100;
  s.heterogeneity.kraichnan.variance = 4.0;
  s.heterogeneity.kraichnan.corr_len_x = 0.1;
  s.heterogeneity.kraichnan.corr_len_z = 0.01;
  s.heterogeneity.kraichnan.mean_level = s.flow.law.k_sat;
  s.heterogeneity.kraichnan.convention = MeanConvention::GeometricK;
  return s;
}

}  // namespace

Scenario preset(const std::string& name) {
  if (name == "bench_adv_dominated") return bench_adv_dominated();
  if (name == "bench_adv_dominated_mixing") {
    Scenario s = bench_adv_dominated();
    s.name = name;
    s.transport.d1 = s.transport.d2 = 2.5e-3;
    return s;
  }
  if (name == "grw_vs_bgrw_T1") {
    // Unbiased leg of the T=1 solver comparison; the biased reference is the
    // same scenario with solver bgrw on the finer reference lattice.
    Scenario s = bench_adv_dominated();
    s.name = name;
    s.final_time = 1.0;
    s.transport.d1 = s.transport.d2 = 5e-4;
    return s;
  }
  if (name == "grw_vs_bgrw_T1_reference") {
    Scenario s = bench_adv_dominated();
    s.name = name;
    s.final_time = 1.0;
    s.transport.d1 = s.transport.d2 = 5e-4;
    s.transport.solver = SolverKind::Bgrw;
    s.dx = s.dz = 1e-3;
    s.dt = 0;
    return s;
  }
  if (name == "aquifer_mc") return aquifer_mc();
  if (name == "aquifer_mc_desk") {
    Scenario s = aquifer_mc();
    s.name = name;
    s.dx = s.dz = 0.25;
    return s;
  }
  if (name == "aquifer_bgrw_single") {
    Scenario s = aquifer_mc();
    s.name = name;
    s.transport.solver = SolverKind::Bgrw;
    s.dx = 80.0 / 2400;
    s.dz = 20.0 / 600;
    s.dt = 0;
    s.heterogeneity.kraichnan.variance = 0.5;
    s.heterogeneity.kraichnan.corr_len_x = 2.0;
    s.heterogeneity.kraichnan.corr_len_z = 2.0;
    return s;
  }
  if (name == "soil_loam") return soil("loam");
  if (name == "soil_clay") return soil("clay");
  throw ConfigError("unknown preset: " + name);
}

std::vector<std::string> preset_names() {
  return {"bench_adv_dominated", "bench_adv_dominated_mixing", "grw_vs_bgrw_T1",
          "grw_vs_bgrw_T1_reference", "aquifer_mc", "aquifer_mc_desk",
          "aquifer_bgrw_single", "soil_loam", "soil_clay"};
}

}  // namespace grw
