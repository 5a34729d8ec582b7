#include "grw/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace grw {

using nlohmann::json;

double BoundaryValueSpec::eval(double, double z, double t) const {
  switch (kind) {
    case Kind::Constant: return value;
    case Kind::Hydrostatic: return water_table - z;
    case Kind::Ramp: return t <= t1 ? start + slope * t / t1 : after;
  }
  return 0;
}

void Scenario::validate() const {
  lattice();  // geometry invariants
  if (!(final_time > 0)) throw ConfigError("scenario: final time must be positive");
  if (dt < 0) throw ConfigError("scenario: dt must be nonnegative");
  if (transport.species.size() != 2)
    throw ConfigError("scenario: exactly two mobile species are supported");
  if (reaction.kind == ReactionKind::Monod) reaction.monod.validate();
  if (flow.kind == FlowKind::Richards) {
    flow.law.validate();
    flow.lscheme.validate();
  }
  if (transport.solver == SolverKind::BgrwLscheme) transport.lscheme.validate();
  // A non-iterative step under variable water content commits the error
  // pattern of Remark-2 runs; reject unless explicitly forced.
  if (flow.kind == FlowKind::Richards && transport.solver != SolverKind::BgrwLscheme &&
      !transport.force_noniterative)
    throw ConfigError(
        "non-iterative transport with variable water content is rejected by default "
        "(set force_noniterative to override)");
  for (const ResetRegion& r : transport.resets)
    if (r.species < 0 || r.species >= static_cast<int>(transport.species.size()))
      throw ConfigError("scenario: reset region references an unknown species");
}

// --- JSON schema ----------------------------------------------------------

namespace {

std::string edge_name(Edge e) {
  switch (e) {
    case Edge::Left: return "left";
    case Edge::Right: return "right";
    case Edge::Bottom: return "bottom";
    case Edge::Top: return "top";
  }
  return "?";
}

Edge edge_from(const std::string& s) {
  if (s == "left") return Edge::Left;
  if (s == "right") return Edge::Right;
  if (s == "bottom") return Edge::Bottom;
  if (s == "top") return Edge::Top;
  throw ConfigError("unknown edge: " + s);
}

std::string bc_name(BcKind k) {
  switch (k) {
    case BcKind::Dirichlet: return "dirichlet";
    case BcKind::ZeroGradient: return "zero_gradient";
    case BcKind::Outflow: return "outflow";
    case BcKind::NoFlux: return "no_flux";
  }
  return "?";
}

BcKind bc_from(const std::string& s) {
  if (s == "dirichlet") return BcKind::Dirichlet;
  if (s == "zero_gradient") return BcKind::ZeroGradient;
  if (s == "outflow") return BcKind::Outflow;
  if (s == "no_flux") return BcKind::NoFlux;
  throw ConfigError("unknown boundary kind: " + s);
}

json box_to_json(const Box& b) {
  return json{{"x_lo", b.x_lo}, {"x_hi", b.x_hi}, {"z_lo", b.z_lo}, {"z_hi", b.z_hi}};
}

Box box_from_json(const json& j) {
  return Box{j.at("x_lo"), j.at("x_hi"), j.at("z_lo"), j.at("z_hi")};
}

json value_spec_to_json(const ValueSpec& v) {
  json regions = json::array();
  for (const auto& r : v.regions)
    regions.push_back(json{{"box", box_to_json(r.box)}, {"value", r.value}});
  return json{{"base", v.base}, {"regions", regions}};
}

ValueSpec value_spec_from_json(const json& j) {
  ValueSpec v;
  v.base = j.value("base", 0.0);
  if (j.contains("regions"))
    for (const auto& r : j.at("regions"))
      v.regions.push_back({box_from_json(r.at("box")), r.at("value")});
  return v;
}

json bvalue_to_json(const BoundaryValueSpec& v) {
  switch (v.kind) {
    case BoundaryValueSpec::Kind::Constant:
      return json{{"kind", "constant"}, {"value", v.value}};
    case BoundaryValueSpec::Kind::Hydrostatic:
      return json{{"kind", "hydrostatic"}, {"water_table", v.water_table}};
    case BoundaryValueSpec::Kind::Ramp:
      return json{{"kind", "ramp"},
                  {"start", v.start},
                  {"slope", v.slope},
                  {"t1", v.t1},
                  {"after", v.after}};
  }
  return {};
}

BoundaryValueSpec bvalue_from_json(const json& j) {
  BoundaryValueSpec v;
  std::string kind = j.at("kind");
  if (kind == "constant") {
    v.kind = BoundaryValueSpec::Kind::Constant;
    v.value = j.at("value");
  } else if (kind == "hydrostatic") {
    v.kind = BoundaryValueSpec::Kind::Hydrostatic;
    v.water_table = j.at("water_table");
  } else if (kind == "ramp") {
    v.kind = BoundaryValueSpec::Kind::Ramp;
    v.start = j.at("start");
    v.slope = j.at("slope");
    v.t1 = j.at("t1");
    v.after = j.at("after");
  } else {
    throw ConfigError("unknown boundary value kind: " + kind);
  }
  return v;
}

json law_to_json(const ConstitutiveLaw& law) {
  switch (law.kind) {
    case LawKind::Constant:
      return json{{"kind", "constant"}, {"theta", law.theta_const}, {"k", law.k_const}};
    case LawKind::TestUnsaturated:
      return json{{"kind", "test_unsaturated"}, {"step_conductivity", law.step_conductivity}};
    case LawKind::VanGenuchtenMualem:
      return json{{"kind", "van_genuchten"},   {"theta_res", law.theta_res},
                  {"theta_sat", law.theta_sat}, {"alpha", law.alpha},
                  {"n", law.n},                 {"k_sat", law.k_sat}};
  }
  return {};
}

ConstitutiveLaw law_from_json(const json& j) {
  std::string kind = j.at("kind");
  if (kind == "constant") return ConstitutiveLaw::constant(j.at("theta"), j.at("k"));
  if (kind == "test_unsaturated")
    return ConstitutiveLaw::test_unsaturated(j.value("step_conductivity", true));
  if (kind == "van_genuchten")
    return ConstitutiveLaw::van_genuchten(j.at("theta_res"), j.at("theta_sat"), j.at("alpha"),
                                          j.at("n"), j.at("k_sat"));
  throw ConfigError("unknown constitutive law kind: " + kind);
}

json lscheme_to_json(const LSchemeConfig& c) {
  return json{{"L", c.L}, {"eps_a", c.eps_a}, {"eps_r", c.eps_r}, {"max_iter", c.max_iter}};
}

LSchemeConfig lscheme_from_json(const json& j) {
  LSchemeConfig c;
  c.L = j.value("L", 1.0);
  c.eps_a = j.value("eps_a", 1e-6);
  c.eps_r = j.value("eps_r", 1e-6);
  c.max_iter = j.value("max_iter", 50000);
  return c;
}

}  // namespace

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["schema_version"] = s.schema_version;
  j["name"] = s.name;
  j["domain"] = json{{"x0", s.x0}, {"x1", s.x1}, {"z0", s.z0},
                     {"z1", s.z1}, {"dx", s.dx}, {"dz", s.dz}};
  j["time"] = json{{"T", s.final_time}, {"dt", s.dt}};
  j["seed"] = s.seed;

  json flow;
  flow["kind"] = s.flow.kind == FlowKind::None               ? "none"
                 : s.flow.kind == FlowKind::ConstantVelocity ? "constant_velocity"
                 : s.flow.kind == FlowKind::KraichnanVelocity ? "kraichnan_velocity"
                                                              : "richards";
  flow["theta"] = s.flow.theta;
  flow["u"] = s.flow.u;
  flow["v"] = s.flow.v;
  flow["mean_u"] = s.flow.mean_u;
  if (s.flow.kind == FlowKind::Richards) {
    flow["law"] = law_to_json(s.flow.law);
    flow["lscheme"] = lscheme_to_json(s.flow.lscheme);
    flow["initial_psi"] = bvalue_to_json(s.flow.initial_psi);
    json bs = json::array();
    for (const auto& b : s.flow.boundaries)
      bs.push_back(json{{"edge", edge_name(b.edge)},
                        {"lo", b.lo},
                        {"hi", b.hi},
                        {"kind", bc_name(b.kind)},
                        {"value", bvalue_to_json(b.value)}});
    flow["boundaries"] = bs;
    flow["default_bc"] = bc_name(s.flow.default_bc);
  }
  j["flow"] = flow;

  json tr;
  tr["solver"] = s.transport.solver == SolverKind::Bgrw   ? "bgrw"
                 : s.transport.solver == SolverKind::Grw  ? "grw"
                                                          : "bgrw_lscheme";
  tr["d1"] = s.transport.d1;
  tr["d2"] = s.transport.d2;
  tr["allocation"] =
      s.transport.allocation == AllocMode::Randomized ? "randomized" : "deterministic";
  tr["lscheme"] = lscheme_to_json(s.transport.lscheme);
  tr["grw_velocity_target"] = s.transport.grw_velocity_target;
  tr["force_noniterative"] = s.transport.force_noniterative;
  tr["strict_restrictions"] = s.transport.strict_restrictions;
  json species = json::array();
  for (const auto& sp : s.transport.species) {
    json bs = json::array();
    for (const auto& b : sp.boundaries)
      bs.push_back(json{{"edge", edge_name(b.edge)},
                        {"lo", b.lo},
                        {"hi", b.hi},
                        {"kind", bc_name(b.kind)},
                        {"value", b.value}});
    species.push_back(json{{"name", sp.name},
                           {"initial", value_spec_to_json(sp.initial)},
                           {"boundaries", bs},
                           {"default_bc", bc_name(sp.default_bc)}});
  }
  tr["species"] = species;
  json resets = json::array();
  for (const auto& r : s.transport.resets)
    resets.push_back(
        json{{"species", r.species}, {"box", box_to_json(r.box)}, {"value", r.value}});
  tr["resets"] = resets;
  j["transport"] = tr;

  json re;
  re["kind"] = s.reaction.kind == ReactionKind::None              ? "none"
               : s.reaction.kind == ReactionKind::BimolecularTest ? "bimolecular_test"
                                                                  : "monod";
  if (s.reaction.kind == ReactionKind::Monod) {
    const MonodParams& m = s.reaction.monod;
    re["monod"] = json{{"mu_max", m.mu_max}, {"m1", m.m1},     {"m2", m.m2},
                       {"alpha1", m.alpha1}, {"alpha2", m.alpha2}, {"yield", m.yield},
                       {"kd", m.kd},         {"gamma", m.gamma},   {"c3_max", m.c3_max}};
    re["constant_biomass"] = s.reaction.constant_biomass;
    re["c3_initial"] = value_spec_to_json(s.reaction.c3_initial);
  }
  j["reaction"] = re;

  json het;
  het["target"] = s.heterogeneity.target == HeterogeneitySpec::Target::None ? "none"
                  : s.heterogeneity.target == HeterogeneitySpec::Target::Velocity
                      ? "velocity"
                      : "ksat";
  if (s.heterogeneity.target != HeterogeneitySpec::Target::None) {
    const KraichnanConfig& k = s.heterogeneity.kraichnan;
    het["kraichnan"] =
        json{{"num_modes", k.num_modes},
             {"variance", k.variance},
             {"corr_len_x", k.corr_len_x},
             {"corr_len_z", k.corr_len_z},
             {"mean_level", k.mean_level},
             {"convention",
              k.convention == MeanConvention::ArithmeticK ? "arithmetic_k" : "geometric_k"},
             {"seed", k.seed}};
  }
  j["heterogeneity"] = het;

  j["output"] = json{{"directory", s.output.directory},
                     {"snapshot_times", s.output.snapshot_times},
                     {"write_run_log", s.output.write_run_log}};
  return j.dump(2);
}

Scenario scenario_from_json(const std::string& text) {
  json j = json::parse(text);
  Scenario s;
  s.schema_version = j.value("schema_version", 1);
  if (s.schema_version != 1) throw ConfigError("unsupported schema_version");
  s.name = j.value("name", "custom");
  const json& dom = j.at("domain");
  s.x0 = dom.at("x0");
  s.x1 = dom.at("x1");
  s.z0 = dom.at("z0");
  s.z1 = dom.at("z1");
  s.dx = dom.at("dx");
  s.dz = dom.at("dz");
  s.final_time = j.at("time").at("T");
  s.dt = j.at("time").value("dt", 0.0);
  s.seed = j.value("seed", 12345);

  const json& flow = j.at("flow");
  std::string fk = flow.at("kind");
  s.flow.kind = fk == "none"                ? FlowKind::None
                : fk == "constant_velocity" ? FlowKind::ConstantVelocity
                : fk == "kraichnan_velocity" ? FlowKind::KraichnanVelocity
                : fk == "richards"           ? FlowKind::Richards
                                             : throw ConfigError("unknown flow kind: " + fk);
  s.flow.theta = flow.value("theta", 1.0);
  s.flow.u = flow.value("u", 0.0);
  s.flow.v = flow.value("v", 0.0);
  s.flow.mean_u = flow.value("mean_u", 0.0);
  if (s.flow.kind == FlowKind::Richards) {
    s.flow.law = law_from_json(flow.at("law"));
    s.flow.lscheme = lscheme_from_json(flow.at("lscheme"));
    s.flow.initial_psi = bvalue_from_json(flow.at("initial_psi"));
    for (const auto& b : flow.at("boundaries")) {
      FlowBoundary fb;
      fb.edge = edge_from(b.at("edge"));
      fb.lo = b.value("lo", -1e300);
      fb.hi = b.value("hi", 1e300);
      fb.kind = bc_from(b.at("kind"));
      fb.value = bvalue_from_json(b.at("value"));
      s.flow.boundaries.push_back(fb);
    }
    s.flow.default_bc = bc_from(flow.value("default_bc", "no_flux"));
  }

  const json& tr = j.at("transport");
  std::string sk = tr.at("solver");
  s.transport.solver = sk == "bgrw"  ? SolverKind::Bgrw
                       : sk == "grw" ? SolverKind::Grw
                       : sk == "bgrw_lscheme"
                           ? SolverKind::BgrwLscheme
                           : throw ConfigError("unknown transport solver: " + sk);
  s.transport.d1 = tr.at("d1");
  s.transport.d2 = tr.at("d2");
  s.transport.allocation = tr.value("allocation", std::string("randomized")) == "deterministic"
                               ? AllocMode::Deterministic
                               : AllocMode::Randomized;
  if (tr.contains("lscheme")) s.transport.lscheme = lscheme_from_json(tr.at("lscheme"));
  s.transport.grw_velocity_target = tr.value("grw_velocity_target", 1);
  s.transport.force_noniterative = tr.value("force_noniterative", false);
  s.transport.strict_restrictions = tr.value("strict_restrictions", true);
  for (const auto& spj : tr.at("species")) {
    SpeciesSpec sp;
    sp.name = spj.at("name");
    sp.initial = value_spec_from_json(spj.at("initial"));
    if (spj.contains("boundaries"))
      for (const auto& b : spj.at("boundaries")) {
        SpeciesBoundary sb;
        sb.edge = edge_from(b.at("edge"));
        sb.lo = b.value("lo", -1e300);
        sb.hi = b.value("hi", 1e300);
        sb.kind = bc_from(b.at("kind"));
        sb.value = b.value("value", 0.0);
        sp.boundaries.push_back(sb);
      }
    sp.default_bc = bc_from(spj.value("default_bc", "no_flux"));
    s.transport.species.push_back(sp);
  }
  if (tr.contains("resets"))
    for (const auto& r : tr.at("resets"))
      s.transport.resets.push_back(
          ResetRegion{r.at("species"), box_from_json(r.at("box")), r.at("value")});

  const json& re = j.at("reaction");
  std::string rk = re.at("kind");
  s.reaction.kind = rk == "none"               ? ReactionKind::None
                    : rk == "bimolecular_test" ? ReactionKind::BimolecularTest
                    : rk == "monod"            ? ReactionKind::Monod
                                               : throw ConfigError("unknown reaction kind: " + rk);
  if (s.reaction.kind == ReactionKind::Monod) {
    const json& m = re.at("monod");
    s.reaction.monod.mu_max = m.at("mu_max");
    s.reaction.monod.m1 = m.at("m1");
    s.reaction.monod.m2 = m.at("m2");
    s.reaction.monod.alpha1 = m.at("alpha1");
    s.reaction.monod.alpha2 = m.at("alpha2");
    s.reaction.monod.yield = m.value("yield", 0.0);
    s.reaction.monod.kd = m.value("kd", 0.0);
    s.reaction.monod.gamma = m.value("gamma", 0);
    s.reaction.monod.c3_max = m.value("c3_max", 1.0);
    s.reaction.constant_biomass = re.value("constant_biomass", false);
    s.reaction.c3_initial = value_spec_from_json(re.at("c3_initial"));
  }

  const json& het = j.at("heterogeneity");
  std::string ht = het.value("target", "none");
  s.heterogeneity.target = ht == "none"       ? HeterogeneitySpec::Target::None
                           : ht == "velocity" ? HeterogeneitySpec::Target::Velocity
                           : ht == "ksat"
                               ? HeterogeneitySpec::Target::Ksat
                               : throw ConfigError("unknown heterogeneity target: " + ht);
  if (s.heterogeneity.target != HeterogeneitySpec::Target::None) {
    const json& k = het.at("kraichnan");
    KraichnanConfig& kc = s.heterogeneity.kraichnan;
    kc.num_modes = k.value("num_modes", 100);
    kc.variance = k.at("variance");
    kc.corr_len_x = k.at("corr_len_x");
    kc.corr_len_z = k.at("corr_len_z");
    kc.mean_level = k.at("mean_level");
    kc.convention = k.value("convention", std::string("arithmetic_k")) == "geometric_k"
                        ? MeanConvention::GeometricK
                        : MeanConvention::ArithmeticK;
    kc.seed = k.value("seed", 0);
  }

  if (j.contains("output")) {
    const json& out = j.at("output");
    s.output.directory = out.value("directory", "");
    if (out.contains("snapshot_times"))
      s.output.snapshot_times = out.at("snapshot_times").get<std::vector<double>>();
    s.output.write_run_log = out.value("write_run_log", false);
  }
  s.validate();
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return scenario_from_json(text);
}

std::uint64_t scenario_hash(const Scenario& s) {
  std::string dump = scenario_to_json(s);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace grw
