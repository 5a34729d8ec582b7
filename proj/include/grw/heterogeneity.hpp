#pragma once

// Kraichnan-mode random field generation for log-hydraulic-conductivity and
// divergence-free velocity approximations, plus ensemble statistics with
// worker-count-invariant accumulation.

#include <cstdint>
#include <functional>
#include <vector>

#include "grw/lattice.hpp"

namespace grw {

enum class MeanConvention {
  ArithmeticK,  // mean of ln K shifted by -sigma^2/2 so <K> matches mean_level
  GeometricK    // mean of ln K set to ln(mean_level)
};

struct KraichnanConfig {
  int num_modes = 100;
  double variance = 1.0;      // sigma^2 of ln K
  double corr_len_x = 1.0;    // lambda_x
  double corr_len_z = 1.0;    // lambda_z
  double mean_level = 1.0;    // <K> (arithmetic) or K_g (geometric)
  MeanConvention convention = MeanConvention::ArithmeticK;
  std::uint64_t seed = 0;

  void validate() const;
  double mean_lnk() const;
};

// One realization's modes: wavevectors drawn from the spectral density of the
// Gaussian correlation exp(-(x/lambda_x)^2 - (z/lambda_z)^2) (componentwise
// normal with standard deviation sqrt(2)/lambda), phases uniform on [0,2pi).
struct KraichnanModes {
  std::vector<double> kx, kz, phase;
};

KraichnanModes sample_modes(const KraichnanConfig& cfg, std::uint64_t realization);

// ln K(x,z) = mean_lnk + sigma*sqrt(2/N)*sum cos(k_m.(x,z) + phi_m).
// Deterministic in (cfg.seed, realization).
ScalarField sample_lnk_field(const KraichnanConfig& cfg, const Lattice2D& lat,
                             std::uint64_t realization);

// exp(ln K): site-wise conductivity realization.
ScalarField sample_k_field(const KraichnanConfig& cfg, const Lattice2D& lat,
                           std::uint64_t realization);

// First-order velocity approximation built from the same modes with the
// transverse projector enforcing incompressibility of the fluctuations:
//   U = U_mean * (1 + sigma*sqrt(2/N) * sum (1 - kx^2/k^2)   cos(k.x + phi))
//   V = U_mean * (    sigma*sqrt(2/N) * sum (  - kx*kz/k^2)  cos(k.x + phi)).
void sample_velocity_field(const KraichnanConfig& cfg, const Lattice2D& lat, double mean_u,
                           std::uint64_t realization, ScalarField& U, ScalarField& V);

// Site-wise ensemble moments, unbiased (n-1) variance, accumulated in
// realization-index order so results are independent of the worker count.
struct EnsembleStats {
  std::vector<ScalarField> mean_fields;
  std::vector<ScalarField> variance_fields;
  std::vector<double> lattice_mean;       // per species, site-average of the mean field
  std::vector<double> lattice_variance;   // per species, site-average of the variance field
  int realization_count = 0;
};

// Runs `realizations` independent jobs (each returning one ScalarField per
// tracked species) across `workers` threads and folds them in index order.
EnsembleStats ensemble_accumulate(
    int realizations, int workers,
    const std::function<std::vector<ScalarField>(int)>& run_realization);

}  // namespace grw
