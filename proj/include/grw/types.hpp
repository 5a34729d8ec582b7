#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace grw {

// Exact particle counts. Mole-scale ensembles (10^24 particles per mole)
// exceed 64-bit range, so counts carry 128-bit unsigned semantics.
using Count = unsigned __int128;
using SignedCount = __int128;

// 10^k as an exact integer.
constexpr Count pow10_count(int k) {
  Count p = 1;
  for (int i = 0; i < k; ++i) p *= 10;
  return p;
}

// Particles per mole used throughout: the Avogadro number rounded to 10^24.
inline const Count kMoleScale = pow10_count(24);

std::string count_to_string(Count n);
std::string count_to_string(SignedCount n);

// A solver admissibility contract was violated (stability bounds broken,
// negative jump probability, non-physical input). CLI exit code 3.
struct ContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid configuration or API usage. CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic generator with explicit uniform/normal mappings so that runs
// with equal seeds produce bit-identical sequences independent of the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0x9e3779b97f4a7c15ull) : eng_(seed) {}

  // Stream for one Monte Carlo realization, decorrelated from its neighbors.
  static Rng for_realization(std::uint64_t base_seed, std::uint64_t realization) {
    std::seed_seq seq{base_seed, realization, std::uint64_t(0x5bd1e995)};
    Rng r(0);
    r.eng_.seed(seq);
    return r;
  }

  std::uint64_t raw() { return eng_(); }

  // Uniform on [0,1) with 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller on the explicit uniform stream.
  double normal();

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace grw
