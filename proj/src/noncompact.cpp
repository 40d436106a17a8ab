#include "zdr/noncompact.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "zdr/kernels.hpp"

namespace zdr {

namespace {

struct TailParams {
  double c1, gamma, eps0;
};

TailParams tail_params(const DensityModel& model) {
  if (const auto* p = std::get_if<PolynomialTail>(&model.form())) return {p->c1, p->gamma, p->eps0};
  if (const auto* e = std::get_if<ExponentialTail>(&model.form())) return {e->c1, e->gamma, e->eps0};
  throw std::invalid_argument(model.id() + ": not a tail model");
}

std::optional<double> closed_form_B(const DensityModel& model, double delta) {
  const double z = *model.normalization();
  if (const auto* p = std::get_if<PolynomialTail>(&model.form())) {
    // 2 C2 B^(chi+1) / (-chi-1) / Z = delta
    return std::pow(delta * z * (-p->chi - 1.0) / (2.0 * p->c2), 1.0 / (p->chi + 1.0));
  }
  if (const auto* e = std::get_if<ExponentialTail>(&model.form())) {
    // 2 C2 exp(beta B) / (-beta) / Z = delta
    return std::log(delta * z * (-e->beta) / (2.0 * e->c2)) / e->beta;
  }
  return std::nullopt;
}

}  // namespace

SolveBResult solve_B(const DensityModel& model, double delta) {
  if (!model.normalization()) throw std::logic_error(model.id() + ": normalization pending");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("solve_B: delta must lie in (0, 1)");
  const TailParams tp = tail_params(model);
  const double mass_at_eps0 = tail_mass_beyond(model, tp.eps0);
  if (!(delta < mass_at_eps0)) {
    throw std::invalid_argument("solve_B: delta " + std::to_string(delta) + " leaves B <= eps0 (mass beyond eps0 is " +
                                std::to_string(mass_at_eps0) + ")");
  }
  // Bracket [eps0, hi] with mass(hi) < delta.
  double lo = tp.eps0, hi = 2.0 * tp.eps0;
  while (tail_mass_beyond(model, hi) >= delta) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi) || hi > 1e300) throw std::runtime_error("solve_B: bracket failure");
  }
  SolveBResult out{};
  while (hi - lo > 1e-13 * std::max(1.0, hi) && out.iterations < 400) {
    const double mid = 0.5 * (lo + hi);
    if (tail_mass_beyond(model, mid) >= delta) lo = mid;
    else hi = mid;
    ++out.iterations;
  }
  out.b = 0.5 * (lo + hi);
  out.closed_form = closed_form_B(model, delta);
  if (out.closed_form && std::abs(*out.closed_form - out.b) > 1e-8 * std::max(1.0, out.b)) {
    throw std::runtime_error("solve_B: closed form and bisection disagree");
  }
  return out;
}

TruncationSchedule::TruncationSchedule(DensityModel model, double eta, double xi, double m_delta)
    : model_(std::move(model)), eta_(eta), xi_(xi), m_delta_(m_delta) {
  const double d = static_cast<double>(model_.dim());
  if (!(eta > 0.0 && eta < 1.0 / d)) throw std::invalid_argument("truncation schedule: requires 0 < eta < 1/d");
  if (!(xi > 0.0 && xi < (1.0 - 2.0 * eta * d) / 2.0)) {
    throw std::invalid_argument("truncation schedule: requires 0 < xi < (1 - 2 eta d)/2");
  }
  if (!model_.normalization()) throw std::logic_error(model_.id() + ": normalization pending");
  const TailParams tp = tail_params(model_);
  if (!(m_delta > 0.0 && m_delta < tail_mass_beyond(model_, tp.eps0))) {
    throw std::invalid_argument("truncation schedule: m_delta must lie in (0, mass beyond eps0)");
  }
  gamma_ = tp.gamma;
  c1_ = tp.c1 / *model_.normalization();
  gamma1_ = std::max(gamma_, xi / eta);
  psi_ = xi / gamma1_;
  if (const auto* p = std::get_if<PolynomialTail>(&model_.form())) {
    delta_exponent_ = xi * (p->chi + 1.0) / p->chi;
  } else {
    delta_exponent_ = xi;
  }
}

double TruncationSchedule::delta(double n) const { return m_delta_ * std::pow(n, -delta_exponent_); }

double TruncationSchedule::eps(double n) const { return std::pow(std::pow(n, -xi_) / c1_, 1.0 / gamma1_); }

double TruncationSchedule::B(double n) const { return solve_B(model_, delta(n)).b; }

double TruncationSchedule::m_value(double n) const {
  const double near = c1_ * std::pow(eps(n), gamma_);
  return std::min(near, *model_.radial_profile(B(n)));
}

std::uint64_t TruncationSchedule::threshold_n1() const {
  auto ok = [&](std::uint64_t n) { return eps(static_cast<double>(n)) < B(static_cast<double>(n)); };
  if (ok(1)) return 1;
  std::uint64_t hi = 2;
  while (!ok(hi)) {
    if (hi > (std::uint64_t{1} << 62)) throw std::runtime_error("threshold_n1: no threshold below 2^62");
    hi *= 2;
  }
  std::uint64_t lo = hi / 2;  // !ok(lo)
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

TruncationSchedule build_truncation_schedule(const DensityModel& model, double eta, double xi,
                                             std::optional<double> m_delta) {
  const DensityModel m = model.normalization() ? model : normalize(model);
  const double md = m_delta ? *m_delta : 0.5 * tail_mass_beyond(m, tail_params(m).eps0);
  return TruncationSchedule(m, eta, xi, md);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 paired values");
  double mx = 0.0, my = 0.0;
  const double k = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("loglog_slope: values must be positive");
    mx += std::log(x[i]) / k;
    my += std::log(y[i]) / k;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw std::invalid_argument("loglog_slope: x values are all equal");
  return sxy / sxx;
}

namespace {

void require_two_decades(std::span<const double> ns) {
  if (ns.empty()) throw std::invalid_argument("validate_m_decay: empty n grid");
  const auto [lo, hi] = std::minmax_element(ns.begin(), ns.end());
  if (!(*lo >= 1.0) || *hi / *lo < 100.0 * (1.0 - 1e-12)) {
    throw std::invalid_argument("validate_m_decay: n grid must span at least two decades");
  }
}

}  // namespace

double validate_m_decay(const TruncationSchedule& sched, std::span<const double> ns) {
  require_two_decades(ns);
  std::vector<double> m;
  for (double n : ns) m.push_back(sched.m_value(n));
  return loglog_slope(ns, m);
}

double validate_m_decay(const DensityModel& model, const RateSchedule& sched, std::span<const double> ns) {
  require_two_decades(ns);
  const auto box = model.support().box();
  if (!box) throw std::invalid_argument("validate_m_decay: compact variant needs a bounded support");
  std::vector<double> m;
  for (double n : ns) {
    const double eps = sched.m_eps * std::pow(n, -sched.psi);
    m.push_back(model.zero_set() ? min_outside_neighborhood(model, eps, *box).value
                                 : kernels::grid_minimum(model, eps, *box, box->min_side() / 200.0));
  }
  return loglog_slope(ns, m);
}

double binomial_containment_bound(double n, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("binomial_containment_bound: delta must lie in (0, 1)");
  return std::max(0.0, 1.0 - 2.0 * std::exp(-(delta / 2.0) * (delta / 2.0) * n));
}

double binomial_containment_bound_sharp(double n, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("binomial_containment_bound: delta must lie in (0, 1)");
  return hoeffding_bound(n, delta / 2.0);
}

}  // namespace zdr
