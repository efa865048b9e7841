#include "grasplog/graspmap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace grasplog {

GraspMap::GraspMap(std::size_t n)
    : c(n, n, 1.0f), s(n, n, 0.0f), w(n, n, 0.30f), u(n, n, 0.0f), b(n, n, 1.0f) {}

std::string_view to_string(QualityKind k) noexcept {
  switch (k) {
    case QualityKind::F1: return "f1";
    case QualityKind::F2: return "f2";
    case QualityKind::F3: return "f3";
  }
  return "f1";
}

QualityKind quality_kind_from_string(std::string_view s) {
  if (s == "f1") return QualityKind::F1;
  if (s == "f2") return QualityKind::F2;
  if (s == "f3") return QualityKind::F3;
  throw std::invalid_argument("unknown quality function: " + std::string(s));
}

double quality(double u, int tau, double b, const QualityParams& p) {
  switch (p.kind) {
    case QualityKind::F1:
      return u;
    case QualityKind::F2:
      return u * std::pow(static_cast<double>(tau), p.mu);
    case QualityKind::F3: {
      const double d = (b - p.b_opt) / p.sigma_b;
      return u * std::pow(static_cast<double>(tau), p.mu) * std::exp(-d * d);
    }
  }
  return u;
}

OrientedRect encoding_rect(const Grasp& g) {
  return OrientedRect(g.position(), g.phi, kEncodeLength, kEncodeBreadth);
}

GraspMap encode(const std::vector<AnnotatedGrasp>& grasps, const ImageGrid& grid) {
  GraspMap map(grid.n);
  std::vector<std::size_t> order(grasps.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return grasps[a].grasp.w < grasps[b].grasp.w;
  });

  for (std::size_t i : order) {
    const Grasp& g = grasps[i].grasp;
    const Angle2Enc enc = encode_angle(g.phi);
    for (const auto& [j, k] : pixels_in_rect(grid, encoding_rect(g))) {
      if (map.u(j, k) != 0.0f) continue;
      map.u(j, k) = 1.0f;
      map.c(j, k) = static_cast<float>(enc.c);
      map.s(j, k) = static_cast<float>(enc.s);
      map.w(j, k) = static_cast<float>(g.w);
      map.b(j, k) = static_cast<float>(grasps[i].trial.b);
    }
  }
  return map;
}

Grid<double> quality_map(const GraspMap& map, int tau, const QualityParams& p) {
  if (tau < 1) throw std::invalid_argument("quality_map: tau must be >= 1");
  const std::size_t n = map.size();
  Grid<double> q(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) q(j, k) = quality(map.u(j, k), tau, map.b(j, k), p);
  return q;
}

namespace {

Grasp decode_pixel(const GraspMap& map, std::size_t j, std::size_t k, int tau,
                   const ImageGrid& grid) {
  Grasp g;
  const Vec2 c = grid.center(j, k);
  g.x = c.x;
  g.y = c.y;
  const Angle2Enc enc{map.c(j, k), map.s(j, k)};
  g.phi = (enc.c == 0.0 && enc.s == 0.0) ? 0.0 : decode_angle(enc);
  g.w = std::clamp(static_cast<double>(map.w(j, k)), 0.30, 1.55);
  g.tau = tau;
  return g;
}

}  // namespace

std::optional<Selection> select_best(const GraspMap& map, int tau, const QualityParams& p,
                                     const ImageGrid& grid) {
  const Grid<double> q = quality_map(map, tau, p);
  const std::size_t n = q.rows();
  if (n == 0) return std::nullopt;
  std::size_t bj = 0, bk = 0;
  double best = q(0, 0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (q(j, k) > best) {
        best = q(j, k);
        bj = j;
        bk = k;
      }
    }
  }
  if (!(best >= p.q_min)) return std::nullopt;
  Selection s;
  s.j = bj;
  s.k = bk;
  s.grasp = decode_pixel(map, bj, bk, tau, grid);
  s.q = best;
  s.b = map.b(bj, bk);
  return s;
}

std::optional<SubsetSelection> select_over_subsets(const std::vector<SubsetMap>& maps,
                                                   const QualityParams& p, const ImageGrid& grid) {
  if (maps.empty()) throw std::invalid_argument("select_over_subsets: no maps");
  std::optional<SubsetSelection> best;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    auto s = select_best(*maps[i].map, maps[i].tau, p, grid);
    if (s && (!best || s->q > best->selection.q)) best = SubsetSelection{i, *s};
  }
  return best;
}

GraspMap rotate90(const GraspMap& m) {
  GraspMap out;
  out.c = grasplog::rotate90(m.c);
  out.s = grasplog::rotate90(m.s);
  out.w = grasplog::rotate90(m.w);
  out.u = grasplog::rotate90(m.u);
  out.b = grasplog::rotate90(m.b);
  const std::size_t n = m.size();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (out.u(j, k) == 0.0f) continue;
      out.c(j, k) = -out.c(j, k);
      out.s(j, k) = -out.s(j, k);
    }
  }
  return out;
}

}  // namespace grasplog
