#include "zdr/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "zdr/kernels.hpp"
#include "zdr/sampling.hpp"

namespace zdr {

namespace {

// Shortest round-trip decimal, so 0.4 prints as 0.4.
std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fixed(double v, int digits = 2) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

SampleBatch draw(const DensityModel& model, std::uint64_t n, std::uint64_t seed) {
  if (n == 0) {
    SampleBatch b;
    b.model_id = model.id();
    b.seed = seed;
    b.dim = model.dim();
    return b;
  }
  return sample(model, static_cast<std::size_t>(n), seed);
}

ClassifiedCovering classify_any(const GridCovering& c, const std::optional<ZeroSet>& s, double eps) {
  if (s) return classify_covering(c, *s, eps);
  if (eps < 2.0 * c.radius()) throw std::invalid_argument("classify_covering: requires r <= eps/2");
  ClassifiedCovering out{c, eps, std::vector<BallClass>(c.size(), BallClass::EpsOutside),
                         std::vector<double>(c.size(), std::numeric_limits<double>::infinity()), {}};
  out.counts[static_cast<std::size_t>(BallClass::EpsOutside)] = c.size();
  return out;
}

// Points of S0 at spacing <= h along every nondegenerate direction.
std::vector<std::vector<double>> discretize(const ZeroSet& s, double h) {
  std::vector<std::vector<double>> pts;
  for (const auto& comp : s.components()) {
    std::visit(
        [&](const auto& prim) {
          using T = std::decay_t<decltype(prim)>;
          if constexpr (std::is_same_v<T, SinglePoint>) {
            pts.emplace_back(prim.at.coords().begin(), prim.at.coords().end());
          } else if constexpr (std::is_same_v<T, Segment>) {
            const double len = euclidean_distance(prim.a.coords(), prim.b.coords());
            const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / h)));
            for (std::size_t j = 0; j <= k; ++j) {
              const double t = static_cast<double>(j) / static_cast<double>(k);
              std::vector<double> p(prim.a.dim());
              for (std::size_t i = 0; i < p.size(); ++i) p[i] = prim.a[i] + t * (prim.b[i] - prim.a[i]);
              pts.push_back(std::move(p));
            }
          } else {
            const Box& b = prim.box;
            const std::size_t d = b.dim();
            std::vector<std::size_t> counts(d);
            for (std::size_t i = 0; i < d; ++i) {
              counts[i] = b.side(i) > 0.0 ? std::min<std::size_t>(4096, static_cast<std::size_t>(std::ceil(b.side(i) / h))) + 1 : 1;
            }
            std::vector<std::size_t> idx(d, 0);
            for (;;) {
              std::vector<double> p(d);
              for (std::size_t i = 0; i < d; ++i) {
                p[i] = counts[i] > 1 ? b.lower()[i] + b.side(i) * static_cast<double>(idx[i]) / static_cast<double>(counts[i] - 1)
                                     : b.lower()[i];
              }
              pts.push_back(std::move(p));
              std::size_t axis = 0;
              while (axis < d && ++idx[axis] == counts[axis]) idx[axis++] = 0;
              if (axis == d) break;
            }
          }
        },
        comp.variant());
  }
  return pts;
}

}  // namespace

void SweepConfig::validate() const {
  if (model_id.empty()) throw std::invalid_argument("sweep: model_id is empty");
  if (ns.empty() || m_r_values.empty() || m_eps_values.empty()) {
    throw std::invalid_argument("sweep: ns, M_r and M_eps lists must be nonempty");
  }
  for (auto n : ns) {
    if (n < 1) throw std::invalid_argument("sweep: sample sizes must be >= 1");
  }
  for (double m : m_r_values) {
    if (!(m > 0.0)) throw std::invalid_argument("sweep: M_r values must be positive");
  }
  for (double m : m_eps_values) {
    if (!(m > 0.0)) throw std::invalid_argument("sweep: M_eps values must be positive");
  }
  if (!(eta > 0.0) || !(psi > 0.0)) throw std::invalid_argument("sweep: eta and psi must be positive");
  if (replications < 1) throw std::invalid_argument("sweep: replications must be >= 1");
}

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const DensityModel model = catalog_model(cfg.model_id);
  const auto region = model.support().box();
  if (!region) throw std::invalid_argument("sweep: model " + cfg.model_id + " has unbounded support");

  struct Cell {
    std::size_t n_index;
    std::uint64_t n;
    double m_r, m_eps, r, eps;
    std::size_t classified;  // index into `classifications`
  };
  SweepResult res{cfg, {}, {}};
  std::vector<Cell> cells;
  std::vector<ClassifiedCovering> classifications;
  for (std::size_t ni = 0; ni < cfg.ns.size(); ++ni) {
    for (double mr : cfg.m_r_values) {
      for (double me : cfg.m_eps_values) {
        const RateSchedule s{cfg.eta, cfg.psi, 0.0, mr, me};
        try {
          const auto v = schedule_values(s, cfg.ns[ni]);
          GridCovering cov(*region, v.r);
          classifications.push_back(classify_any(cov, model.zero_set(), v.eps));
          cells.push_back({ni, cfg.ns[ni], mr, me, v.r, v.eps, classifications.size() - 1});
        } catch (const InfeasibleError& e) {
          res.skipped.push_back({cfg.ns[ni], mr, me, e.what()});
        } catch (const std::invalid_argument& e) {
          res.skipped.push_back({cfg.ns[ni], mr, me, e.what()});
        }
      }
    }
  }

  const std::size_t reps = cfg.replications;
  const auto n_tasks = static_cast<std::ptrdiff_t>(cells.size() * reps);
  res.rows.resize(cells.size() * reps);
  std::vector<std::exception_ptr> errors(res.rows.size());

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t t = 0; t < n_tasks; ++t) {
    try {
      const Cell& cell = cells[static_cast<std::size_t>(t) / reps];
      const std::size_t rep = static_cast<std::size_t>(t) % reps;
      const std::uint64_t seed = derive_trial_seed(cfg.base_seed, cell.n_index * reps + rep);
      const SampleBatch batch = draw(model, cell.n, seed);
      const auto& cc = classifications[cell.classified];
      const OccupancyCounts occ = count_occupancy(cc, batch);
      res.rows[static_cast<std::size_t>(t)] = {cell.n,    cell.m_r,      cell.m_eps,    rep,        seed,
                                               cell.r,    cell.eps,      occ.per_class, occ.event_a, occ.event_b};
    } catch (...) {
      errors[static_cast<std::size_t>(t)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return res;
}

std::vector<SweepSummary> summarize_sweep(const SweepResult& res) {
  std::vector<SweepSummary> out;
  for (const auto& row : res.rows) {
    if (out.empty() || out.back().n != row.n || out.back().m_r != row.m_r || out.back().m_eps != row.m_eps) {
      out.push_back({row.n, row.m_r, row.m_eps, 0, {0.0, 0.0, 0.0}, 0.0, 0.0});
    }
    auto& s = out.back();
    ++s.replications;
    for (std::size_t k = 0; k < 3; ++k) s.mean_fraction[k] += row.per_class[k].fraction;
    s.p_event_a += row.event_a ? 1.0 : 0.0;
    s.p_event_b += row.event_b ? 1.0 : 0.0;
  }
  for (auto& s : out) {
    const double k = static_cast<double>(s.replications);
    for (auto& f : s.mean_fraction) f /= k;
    s.p_event_a /= k;
    s.p_event_b /= k;
  }
  return out;
}

void write_sweep_csv(std::ostream& os, const SweepResult& res) {
  os << "model,n,M_r,M_eps,eta,psi,replication,class,n_balls,n_nonempty,fraction,event_A,event_B\n";
  const std::string prefix_model = res.config.model_id + ',';
  const std::string rates = num(res.config.eta) + ',' + num(res.config.psi) + ',';
  constexpr BallClass order[] = {BallClass::EpsInside, BallClass::EpsNeighboring, BallClass::EpsOutside};
  for (const auto& row : res.rows) {
    for (BallClass c : order) {
      const auto& o = row[c];
      os << prefix_model << row.n << ',' << num(row.m_r) << ',' << num(row.m_eps) << ',' << rates << row.replication
         << ',' << to_string(c) << ',' << o.balls << ',' << o.nonempty << ',' << num(o.fraction) << ','
         << (row.event_a ? "true" : "false") << ',' << (row.event_b ? "true" : "false") << '\n';
    }
  }
}

namespace {

constexpr const char* kClassColor[3] = {"#2ca02c", "#ff7f0e", "#d62728"};  // outside, neighboring, inside

}  // namespace

void write_sweep_svg(std::ostream& os, const SweepResult& res) {
  const auto summary = summarize_sweep(res);
  const auto& cfg = res.config;
  const double pw = 220, ph = 160, ml = 40, mt = 30, gap = 20;
  const std::size_t cols = cfg.m_eps_values.size(), rows = cfg.ns.size();
  const double width = ml + static_cast<double>(cols) * (pw + gap) + 20;
  const double height = mt + static_cast<double>(rows) * (ph + gap + 20) + 30;
  double xmin = *std::min_element(cfg.m_r_values.begin(), cfg.m_r_values.end());
  double xmax = *std::max_element(cfg.m_r_values.begin(), cfg.m_r_values.end());
  if (xmax == xmin) xmax = xmin + 1.0;

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width, 0) << "\" height=\"" << fixed(height, 0)
     << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << fixed(ml, 0) << "\" y=\"16\" font-size=\"12\">" << cfg.model_id
     << ": filled fraction vs M_r (eta=" << num(cfg.eta) << ", psi=" << num(cfg.psi) << ")</text>\n";

  for (std::size_t ri = 0; ri < rows; ++ri) {
    for (std::size_t ci = 0; ci < cols; ++ci) {
      const double x0 = ml + static_cast<double>(ci) * (pw + gap);
      const double y0 = mt + static_cast<double>(ri) * (ph + gap + 20);
      const std::uint64_t n = cfg.ns[ri];
      const double me = cfg.m_eps_values[ci];
      os << "<g>\n<rect x=\"" << fixed(x0) << "\" y=\"" << fixed(y0) << "\" width=\"" << fixed(pw) << "\" height=\""
         << fixed(ph) << "\" fill=\"none\" stroke=\"#999\"/>\n";
      os << "<text x=\"" << fixed(x0 + 4) << "\" y=\"" << fixed(y0 + 12) << "\">n=" << n << ", M_eps=" << num(me)
         << "</text>\n";
      os << "<text x=\"" << fixed(x0 - 4) << "\" y=\"" << fixed(y0 + ph) << "\" text-anchor=\"end\">0</text>\n";
      os << "<text x=\"" << fixed(x0 - 4) << "\" y=\"" << fixed(y0 + 8) << "\" text-anchor=\"end\">1</text>\n";
      os << "<text x=\"" << fixed(x0) << "\" y=\"" << fixed(y0 + ph + 12) << "\">" << num(xmin) << "</text>\n";
      os << "<text x=\"" << fixed(x0 + pw) << "\" y=\"" << fixed(y0 + ph + 12) << "\" text-anchor=\"end\">"
         << num(xmax) << "</text>\n";
      for (std::size_t k = 0; k < 3; ++k) {
        std::string pts;
        for (const auto& s : summary) {
          if (s.n != n || s.m_eps != me) continue;
          const double px = x0 + (s.m_r - xmin) / (xmax - xmin) * pw;
          const double py = y0 + ph - s.mean_fraction[k] * ph;
          pts += fixed(px) + ',' + fixed(py) + ' ';
        }
        if (pts.empty()) continue;
        os << "<polyline fill=\"none\" stroke=\"" << kClassColor[k] << "\" stroke-width=\"1.5\" points=\"" << pts
           << "\"/>\n";
      }
      os << "</g>\n";
    }
  }
  const double ly = height - 12;
  const char* names[3] = {"outside", "neighboring", "inside"};
  for (std::size_t k = 0; k < 3; ++k) {
    const double lx = ml + static_cast<double>(k) * 110;
    os << "<line x1=\"" << fixed(lx) << "\" y1=\"" << fixed(ly - 4) << "\" x2=\"" << fixed(lx + 20) << "\" y2=\""
       << fixed(ly - 4) << "\" stroke=\"" << kClassColor[k] << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << fixed(lx + 24) << "\" y=\"" << fixed(ly) << "\">eps-" << names[k] << "</text>\n";
  }
  os << "</svg>\n";
}

std::vector<std::uint8_t> heatmap_1d(const DensityModel& model, std::size_t n, std::size_t bins, std::uint64_t seed) {
  if (bins < 2) throw std::invalid_argument("heatmap_1d: bins must be >= 2");
  if (model.dim() != 1) throw std::invalid_argument("heatmap_1d: model must be univariate");
  std::vector<std::uint8_t> occ(bins, 0);
  if (n == 0) return occ;
  const SampleBatch batch = sample(model, n, seed);
  const double nb = static_cast<double>(bins);
  for (double x : batch.coords) {
    if (!(x >= -1.0 && x <= 1.0)) continue;
    const auto b = std::min(bins - 1, static_cast<std::size_t>((x + 1.0) / 2.0 * nb));
    occ[b] = 1;
  }
  return occ;
}

void write_heatmap_svg(std::ostream& os, std::span<const HeatmapRow> rows) {
  const double ml = 90, w = 600, rh = 40, mt = 20;
  const double height = mt + static_cast<double>(rows.size()) * (rh + 10) + 20;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(ml + w + 20, 0) << "\" height=\""
     << fixed(height, 0) << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double y0 = mt + static_cast<double>(i) * (rh + 10);
    const auto& row = rows[i];
    const double nb = static_cast<double>(row.occupied.size());
    os << "<text x=\"" << fixed(ml - 6) << "\" y=\"" << fixed(y0 + rh / 2 + 4) << "\" text-anchor=\"end\">"
       << row.label << "</text>\n";
    os << "<line x1=\"" << fixed(ml) << "\" y1=\"" << fixed(y0 + rh) << "\" x2=\"" << fixed(ml + w) << "\" y2=\""
       << fixed(y0 + rh) << "\" stroke=\"#999\"/>\n";
    for (std::size_t b = 0; b < row.occupied.size(); ++b) {
      if (!row.occupied[b]) continue;
      const double x = ml + (static_cast<double>(b) + 0.5) / nb * w;
      os << "<line x1=\"" << fixed(x) << "\" y1=\"" << fixed(y0) << "\" x2=\"" << fixed(x) << "\" y2=\""
         << fixed(y0 + rh) << "\" stroke=\"black\"/>\n";
    }
  }
  const double ya = height - 6;
  os << "<text x=\"" << fixed(ml) << "\" y=\"" << fixed(ya) << "\">-1</text>\n";
  os << "<text x=\"" << fixed(ml + w / 2) << "\" y=\"" << fixed(ya) << "\" text-anchor=\"middle\">0</text>\n";
  os << "<text x=\"" << fixed(ml + w) << "\" y=\"" << fixed(ya) << "\" text-anchor=\"end\">1</text>\n";
  os << "</svg>\n";
}

ReconstructionResult reconstruct_S0(const GridCovering& c, std::span<const std::uint32_t> points_per_ball,
                                    const std::optional<ZeroSet>& s_true) {
  if (points_per_ball.size() != c.size()) throw std::invalid_argument("reconstruct_S0: occupancy size mismatch");
  ReconstructionResult out;
  std::vector<double> flat;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (points_per_ball[i] != 0) continue;
    const auto ctr = c.center(i);
    out.empty_ball_centers.emplace_back(std::vector<double>(ctr.begin(), ctr.end()));
    flat.insert(flat.end(), ctr.begin(), ctr.end());
  }
  const double inf = std::numeric_limits<double>::infinity();
  out.directed_hausdorff_to_S0 = inf;
  out.directed_hausdorff_from_S0 = inf;
  if (out.empty_ball_centers.empty() || !s_true) return out;

  double to = 0.0;
  for (const auto& p : out.empty_ball_centers) to = std::max(to, s_true->distance(p.coords()));
  out.directed_hausdorff_to_S0 = to;

  const std::size_t d = c.dim();
  const std::size_t m = out.empty_ball_centers.size();
  const auto probes = discretize(*s_true, c.grid_step() / 16.0);
  const auto n_probes = static_cast<std::ptrdiff_t>(probes.size());
  double from = 0.0;
#pragma omp parallel for schedule(static) reduction(max : from)
  for (std::ptrdiff_t q = 0; q < n_probes; ++q) {
    const auto& s = probes[static_cast<std::size_t>(q)];
    double best = inf;
    for (std::size_t j = 0; j < m; ++j) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double diff = flat[j * d + i] - s[i];
        d2 += diff * diff;
      }
      best = std::min(best, d2);
    }
    from = std::max(from, std::sqrt(best));
  }
  out.directed_hausdorff_from_S0 = from;
  return out;
}

DetectResult run_detect(const DensityModel& model, const Box& region, std::uint64_t n, double r, double eps,
                        std::uint64_t seed) {
  if (region.dim() != model.dim()) throw std::invalid_argument("detect: region dimension differs from the model");
  GridCovering cov(region, r);
  ClassifiedCovering cc = classify_any(cov, model.zero_set(), eps);
  const SampleBatch batch = draw(model, n, seed);
  OccupancyCounts occ = count_occupancy(cc, batch);
  ReconstructionResult rec = reconstruct_S0(cc.covering, occ.points_per_ball, model.zero_set());
  return {r, eps, seed, std::move(cc), std::move(occ), std::move(rec)};
}

}  // namespace zdr
