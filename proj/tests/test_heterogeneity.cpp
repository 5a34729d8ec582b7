#include <cmath>

#include "doctest.h"
#include "grw/heterogeneity.hpp"

using namespace grw;

TEST_CASE("zero variance collapses to the mean") {
  KraichnanConfig cfg;
  cfg.variance = 0.0;
  cfg.mean_level = 25.0;
  cfg.convention = MeanConvention::ArithmeticK;
  Lattice2D lat = Lattice2D::make(0, 10, 0, 10, 0.5, 0.5);
  ScalarField lnk = sample_lnk_field(cfg, lat, 0);
  for (double v : lnk.values) CHECK(v == doctest::Approx(std::log(25.0)));
  ScalarField U, V;
  sample_velocity_field(cfg, lat, 0.25, 0, U, V);
  for (double v : U.values) CHECK(v == doctest::Approx(0.25));
  for (double v : V.values) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("sample variance of lnK matches the configured variance within 3%") {
  KraichnanConfig cfg;
  cfg.variance = 1.0;
  cfg.corr_len_x = cfg.corr_len_z = 1.0;
  cfg.mean_level = 1.0;
  cfg.convention = MeanConvention::GeometricK;  // mean_lnk = 0
  cfg.seed = 99;
  // Many independent realizations of a moderate lattice: > 10^6 samples.
  Lattice2D lat = Lattice2D::make(0, 50, 0, 50, 1.0, 1.0);  // 2601 sites
  double sum = 0, sumsq = 0;
  long count = 0;
  for (int r = 0; r < 400; ++r) {
    ScalarField lnk = sample_lnk_field(cfg, lat, static_cast<std::uint64_t>(r));
    for (double v : lnk.values) {
      sum += v;
      sumsq += v * v;
      ++count;
    }
  }
  double mean = sum / count;
  double var = sumsq / count - mean * mean;
  CHECK(count > 1000000);
  CHECK(std::abs(var - 1.0) < 0.03);
  CHECK(std::abs(mean) < 3.0 * std::sqrt(1.0 / 400.0));  // homogeneity of the mean
}

TEST_CASE("two-point correlation at one correlation length") {
  // Correlogram against the pinned Gaussian form: rho(lambda) = exp(-1).
  KraichnanConfig cfg;
  cfg.variance = 1.0;
  cfg.corr_len_x = cfg.corr_len_z = 2.0;
  cfg.mean_level = 1.0;
  cfg.convention = MeanConvention::GeometricK;
  cfg.seed = 123;
  Lattice2D lat = Lattice2D::make(0, 40, 0, 2, 2.0, 1.0);
  double num = 0, den = 0;
  for (int r = 0; r < 4000; ++r) {
    ScalarField lnk = sample_lnk_field(cfg, lat, static_cast<std::uint64_t>(r));
    for (int i = 0; i + 1 < lat.nx; ++i) {
      num += lnk(i, 0) * lnk(i + 1, 0);  // lag = dx = lambda
      den += lnk(i, 0) * lnk(i, 0);
    }
  }
  double rho = num / den;
  CHECK(std::abs(rho - std::exp(-1.0)) < 0.05 * std::exp(-1.0) + 0.01);
}

TEST_CASE("velocity field: mean level and discrete divergence") {
  KraichnanConfig cfg;
  cfg.variance = 0.1;
  cfg.corr_len_x = cfg.corr_len_z = 1.0;
  cfg.mean_level = 25.0;
  cfg.seed = 7;
  Lattice2D lat = Lattice2D::make(0, 20, 0, 10, 0.05, 0.05);
  double mean_accum = 0;
  double div2 = 0, fluct2 = 0;
  const int nreal = 16;
  for (int r = 0; r < nreal; ++r) {
    ScalarField U, V;
    sample_velocity_field(cfg, lat, 0.25, static_cast<std::uint64_t>(r), U, V);
    mean_accum += U.mean_value();
    for (int j = 1; j + 1 < lat.nz; ++j)
      for (int i = 1; i + 1 < lat.nx; ++i) {
        double div = (U(i + 1, j) - U(i - 1, j)) / (2 * lat.dx) +
                     (V(i, j + 1) - V(i, j - 1)) / (2 * lat.dz);
        double fu = U(i, j) - 0.25;
        double fv = V(i, j);
        div2 += div * div;
        fluct2 += (fu * fu + fv * fv) / 2.0;
      }
  }
  // Lattice-mean longitudinal velocity within 2% of the Darcy mean.
  CHECK(std::abs(mean_accum / nreal - 0.25) < 0.02 * 0.25);
  // Divergence is a discretization residual of the projector-built field.
  double div_rms = std::sqrt(div2 / (fluct2 + 1e-300));
  // Normalized by the fluctuation magnitude scaled to a gradient: compare
  // rms(div) against rms(|k| |u'|) ~ rms(u') * sqrt(2)*2/lambda.
  double kscale = 2.0 * std::sqrt(2.0) / cfg.corr_len_x;
  CHECK(div_rms / kscale < 0.05);
}

TEST_CASE("velocity fluctuation variance grows with the lnK variance") {
  Lattice2D lat = Lattice2D::make(0, 20, 0, 10, 0.25, 0.25);
  double prev = -1.0;
  for (double s2 : {0.1, 0.5, 1.0}) {
    KraichnanConfig cfg;
    cfg.variance = s2;
    cfg.corr_len_x = cfg.corr_len_z = 1.0;
    cfg.mean_level = 25.0;
    cfg.seed = 31;
    double var = 0;
    long n = 0;
    for (int r = 0; r < 8; ++r) {
      ScalarField U, V;
      sample_velocity_field(cfg, lat, 0.25, static_cast<std::uint64_t>(r), U, V);
      for (double u : U.values) {
        var += (u - 0.25) * (u - 0.25);
        ++n;
      }
    }
    var /= n;
    CHECK(var > prev);
    prev = var;
  }
}

TEST_CASE("reproducibility: same seed and realization give bit-identical fields") {
  KraichnanConfig cfg;
  cfg.variance = 0.5;
  cfg.corr_len_x = 1.0;
  cfg.corr_len_z = 0.5;
  cfg.mean_level = 2.0;
  cfg.seed = 2024;
  Lattice2D lat = Lattice2D::make(0, 5, 0, 5, 0.25, 0.25);
  ScalarField a = sample_lnk_field(cfg, lat, 3);
  ScalarField b = sample_lnk_field(cfg, lat, 3);
  CHECK(a.values == b.values);
  ScalarField c = sample_lnk_field(cfg, lat, 4);
  CHECK(a.values != c.values);
}

TEST_CASE("ensemble accumulation is worker-count invariant") {
  Lattice2D lat = Lattice2D::make(0, 1, 0, 1, 0.25, 0.25);
  auto job = [&](int r) {
    Rng rng = Rng::for_realization(55, static_cast<std::uint64_t>(r));
    ScalarField f(lat);
    for (double& v : f.values) v = rng.uniform();
    return std::vector<ScalarField>{f};
  };
  EnsembleStats one = ensemble_accumulate(24, 1, job);
  EnsembleStats four = ensemble_accumulate(24, 4, job);
  EnsembleStats eight = ensemble_accumulate(24, 8, job);
  for (size_t s = 0; s < one.mean_fields[0].values.size(); ++s) {
    CHECK(one.mean_fields[0].values[s] == four.mean_fields[0].values[s]);
    CHECK(one.variance_fields[0].values[s] == eight.variance_fields[0].values[s]);
  }
  CHECK(one.lattice_mean[0] == four.lattice_mean[0]);
}

TEST_CASE("degenerate ensembles") {
  Lattice2D lat = Lattice2D::make(0, 1, 0, 1, 0.25, 0.25);
  auto job = [&](int) { return std::vector<ScalarField>{ScalarField(lat, 0.7)}; };
  EnsembleStats single = ensemble_accumulate(1, 2, job);
  for (double v : single.variance_fields[0].values) CHECK(v == 0.0);
  EnsembleStats many = ensemble_accumulate(10, 3, job);
  for (double v : many.variance_fields[0].values) CHECK(v == 0.0);
  CHECK(many.lattice_mean[0] == doctest::Approx(0.7));
}
