#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "grw/scenarios.hpp"
#include "json.hpp"

namespace grw {

namespace {

BoundaryConditions species_bc(const SpeciesSpec& sp) {
  BoundaryConditions bc;
  bc.default_kind = sp.default_bc;
  for (const SpeciesBoundary& b : sp.boundaries) {
    double v = b.value;
    bc.add(b.edge, b.kind,
           b.kind == BcKind::Dirichlet
               ? std::function<double(double, double, double)>(
                     [v](double, double, double) { return v; })
               : nullptr,
           b.lo, b.hi);
  }
  return bc;
}

BoundaryConditions flow_bc(const FlowSpec& f) {
  BoundaryConditions bc;
  bc.default_kind = f.default_bc;
  for (const FlowBoundary& b : f.boundaries) {
    BoundaryValueSpec vs = b.value;
    bc.add(b.edge, b.kind,
           b.kind == BcKind::Dirichlet
               ? std::function<double(double, double, double)>(
                     [vs](double x, double z, double t) { return vs.eval(x, z, t); })
               : nullptr,
           b.lo, b.hi);
  }
  return bc;
}

ScalarField field_from_value_spec(const ValueSpec& v, const Lattice2D& lat) {
  ScalarField f(lat);
  for (int j = 0; j < lat.nz; ++j)
    for (int i = 0; i < lat.nx; ++i) f(i, j) = v.eval(lat.x(i), lat.z(j));
  return f;
}

// Reset regions are prescribed-value impositions; ledger them with the
// Dirichlet category so the mass audit stays exact.
void apply_resets(const Scenario& s, const Lattice2D& lat,
                  std::vector<OccupationField>& mobile, std::vector<StepLedger>& ledgers) {
  for (const ResetRegion& r : s.transport.resets) {
    OccupationField& n = mobile[static_cast<size_t>(r.species)];
    Count target = count_from_moles(r.value, n.mole_scale);
    for (int j = 0; j < lat.nz; ++j)
      for (int i = 0; i < lat.nx; ++i) {
        if (!r.box.contains(lat.x(i), lat.z(j))) continue;
        Count& dst = n(i, j);
        ledgers[static_cast<size_t>(r.species)].dirichlet +=
            static_cast<SignedCount>(target) - static_cast<SignedCount>(dst);
        dst = target;
      }
  }
}

int auto_grw_d(const Scenario& s, const Lattice2D& lat, double dt) {
  int d = 1;
  while (2.0 * s.transport.d1 * dt / (s.flow.theta * d * d * lat.dx * lat.dx) +
             2.0 * s.transport.d2 * dt / (s.flow.theta * d * d * lat.dz * lat.dz) >
         1.0 + 1e-12)
    ++d;
  return d;
}

}  // namespace

RunReport run_scenario(const Scenario& s, int realization) {
  s.validate();
  auto t_start = std::chrono::steady_clock::now();
  const Lattice2D lat = s.lattice();
  Rng rng = Rng::for_realization(s.seed, static_cast<std::uint64_t>(realization));

  // Heterogeneity sampling.
  ConstitutiveLaw law = s.flow.law;
  ScalarField het_u, het_v;
  if (s.heterogeneity.target == HeterogeneitySpec::Target::Ksat) {
    KraichnanConfig cfg = s.heterogeneity.kraichnan;
    cfg.seed = cfg.seed ? cfg.seed : s.seed;
    law.k_sat_field = sample_k_field(cfg, lat, static_cast<std::uint64_t>(realization));
  } else if (s.heterogeneity.target == HeterogeneitySpec::Target::Velocity) {
    KraichnanConfig cfg = s.heterogeneity.kraichnan;
    cfg.seed = cfg.seed ? cfg.seed : s.seed;
    sample_velocity_field(cfg, lat, s.flow.mean_u, static_cast<std::uint64_t>(realization),
                          het_u, het_v);
  }

  // Flow state.
  FlowState flow(lat);
  BoundaryConditions psi_bc_spec;
  BoundaryTable psi_tab;
  switch (s.flow.kind) {
    case FlowKind::None:
    case FlowKind::ConstantVelocity:
      flow.theta.fill(s.flow.theta);
      flow.U.fill(s.flow.u);
      flow.V.fill(s.flow.v);
      break;
    case FlowKind::KraichnanVelocity:
      flow.theta.fill(s.flow.theta);
      flow.U = het_u;
      flow.V = het_v;
      break;
    case FlowKind::Richards: {
      psi_bc_spec = flow_bc(s.flow);
      psi_tab = compile_boundary(psi_bc_spec, lat);
      BoundaryValueSpec ic = s.flow.initial_psi;
      init_flow_state(flow, law, [&](double x, double z) { return ic.eval(x, z, 0.0); });
      break;
    }
  }

  // Mobile species and immobile biomass.
  std::vector<OccupationField> mobile;
  std::vector<BoundaryConditions> bc_specs;
  std::vector<BoundaryTable> bc_tabs;
  for (const SpeciesSpec& sp : s.transport.species) {
    OccupationField n(lat, kMoleScale);
    set_from_concentration(n, field_from_value_spec(sp.initial, lat));
    mobile.push_back(std::move(n));
    bc_specs.push_back(species_bc(sp));
  }
  for (const auto& bcs : bc_specs) bc_tabs.push_back(compile_boundary(bcs, lat));

  ScalarField c3 = s.reaction.kind == ReactionKind::Monod
                       ? field_from_value_spec(s.reaction.c3_initial, lat)
                       : ScalarField(lat, 1.0);
  ReactionSystem reaction;
  if (s.reaction.kind == ReactionKind::BimolecularTest)
    reaction = ReactionSystem::bimolecular_test();
  else if (s.reaction.kind == ReactionKind::Monod)
    reaction = ReactionSystem::monod_system(s.reaction.monod, s.reaction.constant_biomass);

  RunReport report;
  report.biomass_mean_initial = c3.mean_value();
  std::vector<Count> initial_counts;
  for (const auto& n : mobile) initial_counts.push_back(n.total());

  // Time step: largest admissible with a 5% margin, snapped to hit T.
  double dt = s.dt;
  if (dt == 0) {
    double bound = s.final_time;
    if (s.transport.solver == SolverKind::Grw) {
      double vmax = 0;
      for (int k = 0; k < lat.size(); ++k) {
        vmax = std::max(vmax, std::abs(flow.U.values[k]) / lat.dx);
        vmax = std::max(vmax, std::abs(flow.V.values[k]) / lat.dz);
      }
      if (vmax > 0)
        bound = s.transport.grw_velocity_target * s.flow.theta / vmax;
      else
        bound = 0.95 * bgrw_max_dt(s.transport.d1, s.transport.d2, lat, s.flow.theta);
    } else if (s.transport.solver == SolverKind::BgrwLscheme) {
      double theta_max =
          s.flow.kind == FlowKind::Richards ? water_content(law, 0.0) : s.flow.theta;
      bound = 0.95 * bgrw_lscheme_max_dt(s.transport.d1, s.transport.d2, lat,
                                         s.transport.lscheme.L, theta_max);
    } else {
      bound = 0.95 * bgrw_max_dt(s.transport.d1, s.transport.d2, lat, s.flow.theta);
    }
    if (s.flow.kind == FlowKind::Richards)
      bound = std::min(bound, 0.95 * flow_max_dt(law, lat, s.flow.lscheme.L));
    dt = bound;
  }
  int steps = std::max(1, static_cast<int>(std::ceil(s.final_time / dt - 1e-9)));
  dt = s.final_time / steps;
  report.steps = steps;
  report.dt = dt;

  std::vector<StepLedger> ledgers(mobile.size());
  ScalarField mu(lat, 0.0);
  ScalarField theta_prev = flow.theta;

  // Run log.
  std::FILE* flow_log = nullptr;
  std::FILE* transport_log = nullptr;
  if (!s.output.directory.empty() && s.output.write_run_log) {
    std::filesystem::create_directories(s.output.directory);
    flow_log = std::fopen((s.output.directory + "/runlog_flow.csv").c_str(), "wb");
    if (flow_log) std::fputs("t,iterations,residual\n", flow_log);
    transport_log = std::fopen((s.output.directory + "/runlog_transport.csv").c_str(), "wb");
    if (transport_log)
      std::fputs("t,species,total_particles,min_conc,max_conc,r_margin\n", transport_log);
  }
  std::vector<std::string> manifest;
  auto maybe_snapshot = [&](double t) {
    if (s.output.directory.empty()) return;
    for (double st : s.output.snapshot_times) {
      if (std::abs(st - t) > dt / 2) continue;
      std::map<std::string, const ScalarField*> fields;
      std::vector<ScalarField> conc;
      conc.reserve(mobile.size());
      for (size_t nu = 0; nu < mobile.size(); ++nu) conc.push_back(mobile[nu].concentration_field());
      for (size_t nu = 0; nu < mobile.size(); ++nu)
        fields[s.transport.species[nu].name] = &conc[nu];
      if (s.reaction.kind == ReactionKind::Monod) fields["c3"] = &c3;
      if (s.flow.kind == FlowKind::Richards) {
        fields["psi"] = &flow.psi;
        fields["theta"] = &flow.theta;
      }
      write_snapshot(fields, t, s, &manifest);
      break;
    }
  };
  maybe_snapshot(0.0);

  for (int k = 1; k <= steps; ++k) {
    const double t_new = k * dt;

    // Flow update.
    if (s.flow.kind == FlowKind::Richards) {
      theta_prev = flow.theta;
      FlowStepResult fr =
          richards_lscheme_step(flow, law, dt, psi_tab, nullptr, t_new, s.flow.lscheme);
      report.flow_iter_max = std::max(report.flow_iter_max, fr.iterations);
      if (!fr.converged) report.flow_converged = false;
      darcy_velocity(flow, law, s.flow.one_sided_boundary_velocity);
      if (flow_log) std::fprintf(flow_log, "%.9e,%d,%.6e\n", t_new, fr.iterations, fr.residual);
    }

    // Reaction + transport. The non-iterative splitting runs the reaction
    // contribution first (the arrangement behind the published verification
    // constants); the L-scheme interleaves it inside its own iterations.
    if (s.transport.solver != SolverKind::BgrwLscheme &&
        reaction.kind != ReactionKind::None) {
      const ScalarField* theta_field =
          s.flow.kind == FlowKind::Richards ? &theta_prev : nullptr;
      ReactionStats rs = reaction_step_counts(reaction, mobile[0], mobile[1], c3, theta_field,
                                              s.flow.theta, dt, &mu, &ledgers[0], &ledgers[1]);
      report.reaction_clamp_events += rs.clamp_events;
      if (s.reaction.kind == ReactionKind::Monod && !s.reaction.constant_biomass)
        immobile_step(s.reaction.monod, c3, mu, dt);
    }

    if (s.transport.solver == SolverKind::BgrwLscheme) {
      std::vector<BgrwParams> params;
      for (size_t nu = 0; nu < mobile.size(); ++nu)
        params.push_back(bgrw_params(s.transport.d1, s.transport.d2, dt, lat,
                                     s.transport.lscheme.L, flow.U, flow.V,
                                     s.transport.strict_restrictions));
      std::vector<const ScalarField*> sources(mobile.size(), nullptr);
      std::vector<const BoundaryTable*> tabs;
      for (const auto& t : bc_tabs) tabs.push_back(&t);
      LschemeTransportResult tr = bgrw_lscheme_solve(
          mobile, flow.theta, theta_prev, params, s.transport.lscheme, reaction,
          s.reaction.kind == ReactionKind::Monod ? &c3 : nullptr, sources, tabs, t_new,
          s.transport.allocation, rng, &ledgers);
      report.transport_iter_max = std::max(report.transport_iter_max, tr.iterations);
      if (!tr.converged) report.transport_converged = false;
      if (s.reaction.kind == ReactionKind::Monod && !s.reaction.constant_biomass) {
        // Immobile update from the converged mobile iterates.
        ScalarField c1f = mobile[0].concentration_field();
        ScalarField c2f = mobile[1].concentration_field();
        for (int q = 0; q < lat.size(); ++q)
          mu.values[q] = monod_rate(s.reaction.monod, c1f.values[q], c2f.values[q], c3.values[q]);
        immobile_step(s.reaction.monod, c3, mu, dt);
      }
    } else {
      if (s.transport.solver == SolverKind::Bgrw) {
        BgrwParams p;
        if (s.flow.kind == FlowKind::Richards)
          // Explicit scheme with old-level coefficients and the storage-change
          // source f = -c (theta_new - theta_old)/dt, so the allocated group
          // is -n (theta_new - theta_old)/theta_old.
          p = bgrw_params_variable_theta(s.transport.d1, s.transport.d2, dt, lat, theta_prev,
                                         flow.U, flow.V);
        else
          p = bgrw_params(s.transport.d1, s.transport.d2, dt, lat, s.flow.theta, flow.U,
                          flow.V, s.transport.strict_restrictions);
        for (size_t nu = 0; nu < mobile.size(); ++nu) {
          ScalarField f;
          const ScalarField* src = nullptr;
          if (s.flow.kind == FlowKind::Richards) {
            f = ScalarField(lat);
            for (int q = 0; q < lat.size(); ++q) {
              double c = moles_from_count(mobile[nu].counts[static_cast<size_t>(q)],
                                          mobile[nu].mole_scale);
              f.values[q] = -c * (flow.theta.values[q] - theta_prev.values[q]) / dt;
            }
            src = &f;
          }
          mobile[nu] = bgrw_step(mobile[nu], p, src, bc_tabs[nu], t_new,
                                 s.transport.allocation, rng, &ledgers[nu]);
        }
      } else {
        int d = auto_grw_d(s, lat, dt);
        GrwParams p = grw_params(s.transport.d1, s.transport.d2, dt, lat, s.flow.theta, d,
                                 flow.U, flow.V);
        for (size_t nu = 0; nu < mobile.size(); ++nu)
          mobile[nu] = grw_step(mobile[nu], p, nullptr, bc_tabs[nu], t_new,
                                s.transport.allocation, rng, &ledgers[nu]);
      }
    }

    // Injection / stripe resets.
    apply_resets(s, lat, mobile, ledgers);

    if (transport_log) {
      for (size_t nu = 0; nu < mobile.size(); ++nu) {
        ScalarField cf = mobile[nu].concentration_field();
        double margin = 1.0;
        std::fprintf(transport_log, "%.9e,%s,%s,%.6e,%.6e,%.6e\n", t_new,
                     s.transport.species[nu].name.c_str(),
                     count_to_string(mobile[nu].total()).c_str(), cf.min_value(),
                     cf.max_value(), margin);
      }
    }
    maybe_snapshot(t_new);
  }

  if (flow_log) std::fclose(flow_log);
  if (transport_log) std::fclose(transport_log);

  // Final report.
  for (size_t nu = 0; nu < mobile.size(); ++nu) {
    SpeciesReport sr;
    sr.name = s.transport.species[nu].name;
    sr.initial = initial_counts[nu];
    sr.remaining = mobile[nu].total();
    sr.ledger = ledgers[nu];
    ScalarField cf = mobile[nu].concentration_field();
    sr.lattice_mean_final = cf.mean_value();
    SignedCount expect = static_cast<SignedCount>(sr.initial) + sr.ledger.source +
                         sr.ledger.outflow + sr.ledger.dirichlet + sr.ledger.zero_gradient +
                         sr.ledger.reaction;
    sr.mass_identity_ok = expect == static_cast<SignedCount>(sr.remaining);
    report.species.push_back(sr);
    report.mobile_conc.push_back(std::move(cf));
  }
  report.biomass_mean_final = c3.mean_value();
  report.c3 = std::move(c3);
  report.theta_mean_final = flow.theta.mean_value();
  report.flow_state = std::move(flow);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

void write_snapshot(const std::map<std::string, const ScalarField*>& fields, double t,
                    const Scenario& s, std::vector<std::string>* manifest_entries) {
  namespace fs = std::filesystem;
  fs::create_directories(s.output.directory);
  std::vector<std::string> files;
  char tbuf[32];
  std::snprintf(tbuf, sizeof(tbuf), "%g", t);
  for (const auto& [name, field] : fields) {
    std::string fname = name + "_t" + tbuf + ".csv";
    write_field_csv(*field, s.output.directory + "/" + fname);
    files.push_back(fname);
    if (manifest_entries) manifest_entries->push_back(fname);
  }
  // Cumulative manifest: scenario hash, seed, snapshot times and files.
  nlohmann::json manifest;
  std::string mpath = s.output.directory + "/manifest.json";
  {
    std::ifstream in(mpath);
    if (in) {
      try {
        manifest = nlohmann::json::parse(in);
      } catch (...) {
        manifest = nlohmann::json::object();
      }
    }
  }
  char hbuf[32];
  std::snprintf(hbuf, sizeof(hbuf), "%016llx",
                static_cast<unsigned long long>(scenario_hash(s)));
  manifest["scenario_hash"] = hbuf;
  manifest["seed"] = s.seed;
  if (!manifest.contains("snapshots")) manifest["snapshots"] = nlohmann::json::array();
  manifest["snapshots"].push_back(nlohmann::json{{"t", t}, {"files", files}});
  std::ofstream out(mpath, std::ios::binary);
  out << manifest.dump(2) << "\n";
}

EnsembleStats run_ensemble(const Scenario& s, int realizations, int workers) {
  s.validate();
  int nspecies = static_cast<int>(s.transport.species.size());
  bool track_biomass = s.reaction.kind == ReactionKind::Monod;

  EnsembleStats stats = ensemble_accumulate(
      realizations, workers, [&](int r) -> std::vector<ScalarField> {
        Scenario local = s;
        local.output.directory.clear();  // realizations do not write files
        RunReport rep = run_scenario(local, r);
        std::vector<ScalarField> fields = rep.mobile_conc;
        if (track_biomass) fields.push_back(rep.c3);
        return fields;
      });

  if (!s.output.directory.empty()) {
    std::filesystem::create_directories(s.output.directory);
    for (int f = 0; f < static_cast<int>(stats.mean_fields.size()); ++f) {
      std::string name = f < nspecies ? s.transport.species[static_cast<size_t>(f)].name : "c3";
      write_field_csv(stats.mean_fields[static_cast<size_t>(f)],
                      s.output.directory + "/stats_mean_" + name + ".csv");
      write_field_csv(stats.variance_fields[static_cast<size_t>(f)],
                      s.output.directory + "/stats_var_" + name + ".csv");
    }
    std::FILE* fp = std::fopen((s.output.directory + "/ensemble_summary.csv").c_str(), "wb");
    if (fp) {
      std::fputs("lambda,sigma2,mean_c1,mean_c2,mean_c3,var_c1,var_c2,var_c3\n", fp);
      double lam = s.heterogeneity.kraichnan.corr_len_x;
      double s2 = s.heterogeneity.kraichnan.variance;
      auto get = [&](const std::vector<double>& v, size_t k) {
        return k < v.size() ? v[k] : 0.0;
      };
      std::fprintf(fp, "%.6e,%.6e,%.6e,%.6e,%.6e,%.6e,%.6e,%.6e\n", lam, s2,
                   get(stats.lattice_mean, 0), get(stats.lattice_mean, 1),
                   get(stats.lattice_mean, 2), get(stats.lattice_variance, 0),
                   get(stats.lattice_variance, 1), get(stats.lattice_variance, 2));
      std::fclose(fp);
    }
  }
  return stats;
}

GrwBgrwComparison run_grw_vs_bgrw_benchmark(bool paper_scale, std::uint64_t seed) {
  // Advection-dominated benchmark at T = 1. The published reference runs the
  // biased solver at dx = 2e-4 with D = 1e-4 (Peclet 2); the desk-scale pair
  // raises D to 5e-4 so the biased reference stays admissible at dx = 1e-3.
  double d_pair = paper_scale ? 1e-4 : 5e-4;
  double dx_ref = paper_scale ? 2e-4 : 1e-3;

  Scenario grw = preset("bench_adv_dominated");
  grw.final_time = 1.0;
  grw.transport.d1 = grw.transport.d2 = d_pair;
  grw.seed = seed;

  Scenario bgrw = grw;
  bgrw.name = "bench_bgrw_reference";
  bgrw.transport.solver = SolverKind::Bgrw;
  bgrw.dx = bgrw.dz = dx_ref;
  bgrw.dt = 0;
  bgrw.seed = seed + 1;

  GrwBgrwComparison cmp;
  cmp.grw = run_scenario(grw);
  cmp.bgrw = run_scenario(bgrw);
  double g1 = cmp.grw.species[0].lattice_mean_final;
  double g2 = cmp.grw.species[1].lattice_mean_final;
  double b1 = cmp.bgrw.species[0].lattice_mean_final;
  double b2 = cmp.bgrw.species[1].lattice_mean_final;
  cmp.eps_c1 = (g1 - b1) / b1;
  cmp.eps_c2 = (g2 - b2) / b2;
  return cmp;
}

}  // namespace grw
