#include "grw/flow.hpp"

#include <cmath>

namespace grw {

void LSchemeConfig::validate() const {
  if (!(L > 0)) throw ConfigError("L-scheme: L must be positive");
  if (eps_a < 0 || eps_r < 0 || (eps_a == 0 && eps_r == 0))
    throw ConfigError("L-scheme: tolerances must be nonnegative and not both zero");
  if (max_iter < 1) throw ConfigError("L-scheme: max_iter must be >= 1");
}

namespace {

inline double harmonic(double a, double b) {
  double s = a + b;
  return s > 0 ? 2.0 * a * b / s : 0.0;
}

}  // namespace

double flow_max_dt(const ConstitutiveLaw& law, const Lattice2D& lat, double L) {
  double kmax = law.max_conductivity();
  double denom = 2.0 * kmax * (1.0 / (lat.dx * lat.dx) + 1.0 / (lat.dz * lat.dz));
  return L / denom;
}

FlowStepResult richards_lscheme_step(FlowState& state, const ConstitutiveLaw& law, double dt,
                                     const BoundaryTable& bc, const ScalarField* source,
                                     double t_new, const LSchemeConfig& cfg) {
  cfg.validate();
  if (!(dt > 0)) throw ConfigError("richards_lscheme_step: dt must be positive");
  const Lattice2D& lat = state.psi.lattice;
  const int nx = lat.nx, nz = lat.nz;

  // Stability of the explicit sweep, from the largest site conductivity.
  double kmax = law.max_conductivity();
  double rx = 2.0 * kmax * dt / (cfg.L * lat.dx * lat.dx);
  double rz = 2.0 * kmax * dt / (cfg.L * lat.dz * lat.dz);
  if (rx + rz > 1.0 + 1e-12)
    throw ContractError("flow L-scheme unstable: r_x=" + std::to_string(rx) +
                        ", r_z=" + std::to_string(rz) + ", r_x+r_z must be <= 1 (reduce dt below " +
                        std::to_string(dt / (rx + rz)) + ")");

  ScalarField theta_prev = state.theta;  // theta(psi_{k-1})
  ScalarField psi_s = state.psi;         // iterations start from the previous time level

  // Dirichlet values are frozen at the new time level.
  std::vector<std::pair<int, double>> dirichlet;
  for (int s : bc.boundary_sites) {
    BcKind kind = bc.kind_at_site(s);
    if (kind == BcKind::Dirichlet) {
      int i = s % nx, j = s / nx;
      dirichlet.emplace_back(s, bc.dirichlet_value(i, j, t_new));
    } else if (kind != BcKind::NoFlux) {
      throw ConfigError("flow solver supports Dirichlet and NoFlux boundaries only");
    }
  }
  for (auto& [s, v] : dirichlet) psi_s.values[static_cast<size_t>(s)] = v;

  ScalarField K(lat), theta_s(lat), psi_next(lat);
  FlowStepResult res;

  for (int it = 1; it <= cfg.max_iter; ++it) {
    for (int s = 0; s < lat.size(); ++s) {
      K.values[s] = hydraulic_conductivity(law, psi_s.values[s], s);
      theta_s.values[s] = water_content(law, psi_s.values[s]);
    }

    for (int j = 0; j < nz; ++j) {
      for (int i = 0; i < nx; ++i) {
        int s = lat.index(i, j);
        if (bc.patch_of_site[s] >= 0 && bc.kind_at_site(s) == BcKind::Dirichlet) {
          psi_next.values[s] = psi_s.values[s];
          continue;
        }
        // Face fluxes of psi + z; no-flux walls mirror the opposite face.
        double fxp = 0, fxm = 0, fzp = 0, fzm = 0;
        if (i + 1 < nx)
          fxp = harmonic(K(i, j), K(i + 1, j)) * (psi_s(i + 1, j) - psi_s(i, j)) / lat.dx;
        if (i - 1 >= 0)
          fxm = harmonic(K(i - 1, j), K(i, j)) * (psi_s(i, j) - psi_s(i - 1, j)) / lat.dx;
        if (i + 1 >= nx) fxp = -fxm;
        if (i - 1 < 0) fxm = -fxp;
        if (j + 1 < nz)
          fzp = harmonic(K(i, j), K(i, j + 1)) *
                ((psi_s(i, j + 1) - psi_s(i, j)) / lat.dz + 1.0);
        if (j - 1 >= 0)
          fzm = harmonic(K(i, j - 1), K(i, j)) *
                ((psi_s(i, j) - psi_s(i, j - 1)) / lat.dz + 1.0);
        if (j + 1 >= nz) fzp = -fzm;
        if (j - 1 < 0) fzm = -fzp;

        double div = (fxp - fxm) / lat.dx + (fzp - fzm) / lat.dz;
        double f = source ? source->values[s] : 0.0;
        psi_next.values[s] =
            psi_s.values[s] +
            (dt * (div + f) - (theta_s.values[s] - theta_prev.values[s])) / cfg.L;
      }
    }

    // Stopping criterion on mesh-independent RMS norms.
    double diff = l2_diff_rms(psi_next, psi_s);
    double norm = l2_norm_rms(psi_next);
    std::swap(psi_s.values, psi_next.values);
    res.iterations = it;
    res.residual = diff;
    if (diff <= cfg.eps_a + cfg.eps_r * norm) {
      res.converged = true;
      break;
    }
  }

  state.psi = std::move(psi_s);
  for (int s = 0; s < lat.size(); ++s)
    state.theta.values[s] = water_content(law, state.psi.values[s]);
  if (!state.psi.all_finite())
    throw ContractError("flow L-scheme produced non-finite pressure head");
  return res;
}

void darcy_velocity(FlowState& state, const ConstitutiveLaw& law, bool one_sided_boundary) {
  const Lattice2D& lat = state.psi.lattice;
  const int nx = lat.nx, nz = lat.nz;
  const ScalarField& psi = state.psi;

  for (int j = 0; j < nz; ++j)
    for (int i = 1; i + 1 < nx; ++i) {
      double k = hydraulic_conductivity(law, psi(i, j), lat.index(i, j));
      state.U(i, j) = -k * (psi(i + 1, j) - psi(i - 1, j)) / (2.0 * lat.dx);
    }
  for (int j = 1; j + 1 < nz; ++j)
    for (int i = 0; i < nx; ++i) {
      double k = hydraulic_conductivity(law, psi(i, j), lat.index(i, j));
      state.V(i, j) = -k * ((psi(i, j + 1) - psi(i, j - 1)) / (2.0 * lat.dz) + 1.0);
    }

  if (one_sided_boundary) {
    for (int j = 0; j < nz; ++j) {
      double kl = hydraulic_conductivity(law, psi(0, j), lat.index(0, j));
      double kr = hydraulic_conductivity(law, psi(nx - 1, j), lat.index(nx - 1, j));
      state.U(0, j) = -kl * (psi(1, j) - psi(0, j)) / lat.dx;
      state.U(nx - 1, j) = -kr * (psi(nx - 1, j) - psi(nx - 2, j)) / lat.dx;
    }
    for (int i = 0; i < nx; ++i) {
      double kb = hydraulic_conductivity(law, psi(i, 0), lat.index(i, 0));
      double kt = hydraulic_conductivity(law, psi(i, nz - 1), lat.index(i, nz - 1));
      state.V(i, 0) = -kb * ((psi(i, 1) - psi(i, 0)) / lat.dz + 1.0);
      state.V(i, nz - 1) = -kt * ((psi(i, nz - 1) - psi(i, nz - 2)) / lat.dz + 1.0);
    }
  } else {
    // Extend from the first interior neighbor.
    for (int j = 0; j < nz; ++j) {
      state.U(0, j) = state.U(1, j);
      state.U(nx - 1, j) = state.U(nx - 2, j);
    }
    for (int i = 0; i < nx; ++i) {
      state.V(i, 0) = state.V(i, 1);
      state.V(i, nz - 1) = state.V(i, nz - 2);
    }
  }
}

void init_flow_state(FlowState& state, const ConstitutiveLaw& law,
                     const std::function<double(double, double)>& psi0) {
  const Lattice2D& lat = state.psi.lattice;
  for (int j = 0; j < lat.nz; ++j)
    for (int i = 0; i < lat.nx; ++i) {
      state.psi(i, j) = psi0(lat.x(i), lat.z(j));
      state.theta(i, j) = water_content(law, state.psi(i, j));
    }
  state.U.fill(0);
  state.V.fill(0);
}

}  // namespace grw
