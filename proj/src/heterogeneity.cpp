#include "grw/heterogeneity.hpp"

#include <cmath>
#include <condition_variable>
#include <map>
#include <mutex>
#include <thread>

namespace grw {

void KraichnanConfig::validate() const {
  if (num_modes < 1) throw ConfigError("Kraichnan: num_modes must be >= 1");
  if (variance < 0) throw ConfigError("Kraichnan: variance must be nonnegative");
  if (!(corr_len_x > 0) || !(corr_len_z > 0))
    throw ConfigError("Kraichnan: correlation lengths must be positive");
  if (!(mean_level > 0)) throw ConfigError("Kraichnan: mean level must be positive");
}

double KraichnanConfig::mean_lnk() const {
  double m = std::log(mean_level);
  if (convention == MeanConvention::ArithmeticK) m -= 0.5 * variance;
  return m;
}

KraichnanModes sample_modes(const KraichnanConfig& cfg, std::uint64_t realization) {
  cfg.validate();
  Rng rng = Rng::for_realization(cfg.seed, realization);
  KraichnanModes m;
  m.kx.resize(cfg.num_modes);
  m.kz.resize(cfg.num_modes);
  m.phase.resize(cfg.num_modes);
  const double sx = std::sqrt(2.0) / cfg.corr_len_x;
  const double sz = std::sqrt(2.0) / cfg.corr_len_z;
  for (int k = 0; k < cfg.num_modes; ++k) {
    m.kx[k] = sx * rng.normal();
    m.kz[k] = sz * rng.normal();
    m.phase[k] = 6.283185307179586476925286766559 * rng.uniform();
  }
  return m;
}

ScalarField sample_lnk_field(const KraichnanConfig& cfg, const Lattice2D& lat,
                             std::uint64_t realization) {
  KraichnanModes m = sample_modes(cfg, realization);
  const double amp = std::sqrt(cfg.variance) * std::sqrt(2.0 / cfg.num_modes);
  const double mean = cfg.mean_lnk();
  ScalarField f(lat);
  for (int j = 0; j < lat.nz; ++j)
    for (int i = 0; i < lat.nx; ++i) {
      double x = lat.x(i), z = lat.z(j);
      double s = 0;
      for (int k = 0; k < cfg.num_modes; ++k)
        s += std::cos(m.kx[k] * x + m.kz[k] * z + m.phase[k]);
      f(i, j) = mean + amp * s;
    }
  return f;
}

ScalarField sample_k_field(const KraichnanConfig& cfg, const Lattice2D& lat,
                           std::uint64_t realization) {
  ScalarField f = sample_lnk_field(cfg, lat, realization);
  for (double& v : f.values) v = std::exp(v);
  return f;
}

void sample_velocity_field(const KraichnanConfig& cfg, const Lattice2D& lat, double mean_u,
                           std::uint64_t realization, ScalarField& U, ScalarField& V) {
  KraichnanModes m = sample_modes(cfg, realization);
  const double amp = std::sqrt(cfg.variance) * std::sqrt(2.0 / cfg.num_modes);
  U = ScalarField(lat, mean_u);
  V = ScalarField(lat, 0.0);
  std::vector<double> px(m.kx.size()), pz(m.kx.size());
  for (size_t k = 0; k < m.kx.size(); ++k) {
    double k2 = m.kx[k] * m.kx[k] + m.kz[k] * m.kz[k];
    px[k] = k2 > 0 ? 1.0 - m.kx[k] * m.kx[k] / k2 : 0.0;
    pz[k] = k2 > 0 ? -m.kx[k] * m.kz[k] / k2 : 0.0;
  }
  for (int j = 0; j < lat.nz; ++j)
    for (int i = 0; i < lat.nx; ++i) {
      double x = lat.x(i), z = lat.z(j);
      double su = 0, sv = 0;
      for (size_t k = 0; k < m.kx.size(); ++k) {
        double c = std::cos(m.kx[k] * x + m.kz[k] * z + m.phase[k]);
        su += px[k] * c;
        sv += pz[k] * c;
      }
      U(i, j) += mean_u * amp * su;
      V(i, j) += mean_u * amp * sv;
    }
}

EnsembleStats ensemble_accumulate(
    int realizations, int workers,
    const std::function<std::vector<ScalarField>(int)>& run_realization) {
  if (realizations < 1) throw ConfigError("ensemble: need at least one realization");
  workers = std::max(1, workers);

  EnsembleStats stats;
  stats.realization_count = realizations;

  std::map<int, std::vector<ScalarField>> ready;
  std::mutex mtx;
  std::condition_variable cv;
  int next_job = 0;
  std::exception_ptr failure;

  auto worker_fn = [&]() {
    for (;;) {
      int job;
      {
        std::lock_guard<std::mutex> lock(mtx);
        if (failure || next_job >= realizations) return;
        job = next_job++;
      }
      try {
        std::vector<ScalarField> fields = run_realization(job);
        std::lock_guard<std::mutex> lock(mtx);
        ready.emplace(job, std::move(fields));
        cv.notify_all();
      } catch (...) {
        std::lock_guard<std::mutex> lock(mtx);
        if (!failure) failure = std::current_exception();
        cv.notify_all();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker_fn);

  // Welford moments folded strictly in realization-index order: the result is
  // bit-identical for every worker count.
  std::vector<ScalarField> mean, m2;
  for (int r = 0; r < realizations; ++r) {
    std::vector<ScalarField> fields;
    {
      std::unique_lock<std::mutex> lock(mtx);
      cv.wait(lock, [&] { return failure || ready.count(r) > 0; });
      if (failure) break;
      fields = std::move(ready.at(r));
      ready.erase(r);
    }
    if (r == 0) {
      mean = fields;
      m2.assign(fields.size(), ScalarField(fields[0].lattice, 0.0));
    } else {
      for (size_t f = 0; f < fields.size(); ++f)
        for (size_t s = 0; s < fields[f].values.size(); ++s) {
          double x = fields[f].values[s];
          double delta = x - mean[f].values[s];
          mean[f].values[s] += delta / (r + 1);
          m2[f].values[s] += delta * (x - mean[f].values[s]);
        }
    }
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  stats.mean_fields = std::move(mean);
  stats.variance_fields = std::move(m2);
  for (auto& vf : stats.variance_fields)
    if (realizations > 1)
      for (double& v : vf.values) v /= (realizations - 1);
    else
      vf.fill(0.0);
  for (size_t f = 0; f < stats.mean_fields.size(); ++f) {
    stats.lattice_mean.push_back(stats.mean_fields[f].mean_value());
    stats.lattice_variance.push_back(stats.variance_fields[f].mean_value());
  }
  return stats;
}

}  // namespace grw
