#include "zdr/sampling.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace zdr {

namespace {

SampleBatch make_batch(const DensityModel& model, std::size_t n, std::uint64_t seed) {
  if (!model.normalization()) throw std::logic_error(model.id() + ": normalization pending; call normalize() first");
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  SampleBatch b;
  b.model_id = model.id();
  b.seed = seed;
  b.dim = model.dim();
  b.coords.reserve(n * b.dim);
  return b;
}

SampleBatch sample_tail(const DensityModel& model, std::size_t n, std::uint64_t seed) {
  SampleBatch b = make_batch(model, n, seed);
  const double z = *model.normalization();
  const double center = std::get<SinglePoint>(model.zero_set()->components().front().variant()).at[0];
  Engine g(seed);

  double c1 = 0.0, gamma = 0.0, eps0 = 0.0;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PolynomialTail> || std::is_same_v<T, ExponentialTail>) {
          c1 = p.c1;
          gamma = p.gamma;
          eps0 = p.eps0;
        }
      },
      model.form());
  const double p_near = 2.0 * c1 * std::pow(eps0, gamma + 1.0) / (gamma + 1.0) / z;

  for (std::size_t i = 0; i < n; ++i) {
    const double branch = uniform01(g);
    const double u = uniform01(g);
    const double side = uniform01(g);
    double t;
    if (branch < p_near) {
      t = eps0 * std::pow(u, 1.0 / (gamma + 1.0));
    } else if (const auto* poly = std::get_if<PolynomialTail>(&model.form())) {
      t = eps0 * std::pow(u, 1.0 / (poly->chi + 1.0));
    } else {
      const auto& ex = std::get<ExponentialTail>(model.form());
      t = eps0 + std::log(u) / ex.beta;
    }
    b.coords.push_back(side < 0.5 ? center - t : center + t);
  }
  return b;
}

SampleBatch sample_explicit(const DensityModel& model, Explicit1DName name, std::size_t n, std::uint64_t seed) {
  SampleBatch b = make_batch(model, n, seed);
  Engine g(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = uniform01(g);
    switch (name) {
      case Explicit1DName::FQuadratic:
        b.coords.push_back(f_quadratic_quantile(u));
        break;
      case Explicit1DName::GTwoBumps:
        b.coords.push_back(g_twobumps_quantile(u));
        break;
      case Explicit1DName::HParabolic:
        b.coords.push_back(h_parabolic_quantile(u));
        break;
    }
  }
  return b;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_trial_seed(std::uint64_t base_seed, std::uint64_t trial_index) noexcept {
  // Odd-constant multiplication and xor are bijections, as is splitmix64.
  return splitmix64(base_seed ^ (trial_index * 0xD1B54A32D192ED03ull));
}

double f_quadratic_quantile(double u) { return std::cbrt(2.0 * u - 1.0); }

double g_twobumps_quantile(double u) { return u < 0.5 ? -1.0 + 1.5 * u : 0.25 + 1.5 * (u - 0.5); }

double h_parabolic_quantile(double u) {
  // x^3 + 3x + (4 - 8u) = 0 has one real root.
  const double q = 4.0 - 8.0 * u;
  const double s = std::sqrt(q * q / 4.0 + 1.0);
  return std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s);
}

SampleBatch sample_rejection(const DensityModel& model, std::size_t n, std::uint64_t seed, RejectionStats* stats) {
  SampleBatch b = make_batch(model, n, seed);
  const auto box = model.support().box();
  if (!box) throw std::invalid_argument(model.id() + ": rejection sampling needs a compact support");
  const double envelope = sup_density(model);
  const std::size_t d = model.dim();
  Engine g(seed);
  std::vector<double> x(d);
  RejectionStats local;
  while (local.accepted < n) {
    for (std::size_t i = 0; i < d; ++i) x[i] = box->lower()[i] + box->side(i) * uniform01(g);
    const double fx = model.evaluate(x);
    const double u = uniform01(g);
    ++local.proposals;
    if (fx > envelope * (1.0 + 1e-12)) {
      throw std::logic_error(model.id() + ": density exceeds the rejection envelope");
    }
    if (u * envelope < fx) {
      b.coords.insert(b.coords.end(), x.begin(), x.end());
      ++local.accepted;
    }
    if (local.proposals >= 10000 && static_cast<double>(local.accepted) < 1e-4 * static_cast<double>(local.proposals)) {
      throw std::runtime_error(model.id() + ": rejection acceptance rate below 1e-4 (envelope misconfigured)");
    }
  }
  if (stats) *stats = local;
  return b;
}

SampleBatch sample(const DensityModel& model, std::size_t n, std::uint64_t seed) {
  if (const auto* e = std::get_if<Explicit1D>(&model.form())) return sample_explicit(model, e->name, n, seed);
  if (model.is_tail()) {
    if (model.dim() != 1) throw std::invalid_argument(model.id() + ": tail sampling is univariate");
    return sample_tail(model, n, seed);
  }
  return sample_rejection(model, n, seed);
}

void write_samples_csv(std::ostream& os, const SampleBatch& batch) {
  for (std::size_t i = 0; i < batch.dim; ++i) os << (i ? ",x" : "x") << i + 1;
  os << '\n';
  char buf[32];
  for (std::size_t p = 0; p < batch.size(); ++p) {
    const auto pt = batch.point(p);
    for (std::size_t i = 0; i < batch.dim; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", pt[i]);
      if (i) os << ',';
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace zdr
