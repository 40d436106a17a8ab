#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "zdr/density.hpp"

namespace zdr {

/// n i.i.d. points stored row-major (point i occupies coords[i*dim, (i+1)*dim)).
struct SampleBatch {
  std::string model_id;
  std::uint64_t seed = 0;
  std::size_t dim = 1;
  std::vector<double> coords;

  std::size_t size() const noexcept { return dim == 0 ? 0 : coords.size() / dim; }
  std::span<const double> point(std::size_t i) const noexcept { return {coords.data() + i * dim, dim}; }
};

/// Generator used for every draw in the library: MT19937-64 as pinned by the
/// C++ standard ([rand.predef], 10000th output 9981545732273789042).
using Engine = std::mt19937_64;

/// Uniform double in the open interval (0, 1) from the top 53 bits.
inline double uniform01(Engine& g) { return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53; }

/// splitmix64 finalizer; a bijection on 64-bit words.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Per-trial seed. For a fixed base seed the map trial_index -> seed is injective.
std::uint64_t derive_trial_seed(std::uint64_t base_seed, std::uint64_t trial_index) noexcept;

/// Draws n points from a normalized model. Identical (model, n, seed) gives
/// bit-identical output.
///
/// Explicit1D models use closed-form inverse CDFs, univariate tails a
/// near/tail mixture with inverse CDFs per branch, and other compact models
/// rejection from a uniform envelope of height sup_density.
SampleBatch sample(const DensityModel& model, std::size_t n, std::uint64_t seed);

/// Inverse CDF of f(x) = 3/2 x^2 on [-1, 1].
double f_quadratic_quantile(double u);
/// Inverse CDF of h(x) = 3/8 (x^2 + 1) on [-1, 1] (Cardano root).
double h_parabolic_quantile(double u);
/// Inverse CDF of g(x) = 2/3 on [-1,-1/4] ∪ [1/4,1].
double g_twobumps_quantile(double u);

struct RejectionStats {
  std::size_t proposals = 0;
  std::size_t accepted = 0;
};

/// Rejection sampler for compact-support models; also reports acceptance counts.
SampleBatch sample_rejection(const DensityModel& model, std::size_t n, std::uint64_t seed,
                             RejectionStats* stats = nullptr);

/// CSV with header x1..xd, one row per point.
void write_samples_csv(std::ostream& os, const SampleBatch& batch);

}  // namespace zdr
