#include "grasplog/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "grasplog/geometry.hpp"
#include "grasplog/rng.hpp"

namespace grasplog {

namespace {

void check_shapes(const Array& a, const Array& b, const char* what) {
  if (!a.same_shape(b)) throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

double clamp_prob(double p) { return std::clamp(p, kBceClamp, 1.0 - kBceClamp); }

}  // namespace

double bce(const Array& u, const Array& u_hat) {
  check_shapes(u, u_hat, "bce");
  const auto uv = u.values();
  const auto pv = u_hat.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < uv.size(); ++i) {
    const double p = clamp_prob(pv[i]);
    sum -= uv[i] * std::log(p) + (1.0 - uv[i]) * std::log(1.0 - p);
  }
  return sum / static_cast<double>(uv.size());
}

double mmse(const Array& u, const Array& y, const Array& y_hat) {
  check_shapes(u, y, "mmse");
  check_shapes(u, y_hat, "mmse");
  const auto uv = u.values();
  const auto yv = y.values();
  const auto hv = y_hat.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < uv.size(); ++i) {
    if (uv[i] == 0.0) continue;
    const double e = yv[i] - hv[i];
    sum += uv[i] * e * e;
  }
  return sum / static_cast<double>(uv.size());
}

double skewed_w_loss(const Array& u, const Array& w, const Array& w_hat, double gamma) {
  check_shapes(u, w, "skewed_w_loss");
  check_shapes(u, w_hat, "skewed_w_loss");
  const auto uv = u.values();
  const auto wv = w.values();
  const auto hv = w_hat.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < uv.size(); ++i) {
    if (uv[i] == 0.0) continue;
    const double e = wv[i] - hv[i];
    sum += uv[i] * ((1.0 - gamma) * e * e + gamma * e * std::abs(e));
  }
  return sum / static_cast<double>(uv.size());
}

Array bce_grad(const Array& u, const Array& u_hat) {
  check_shapes(u, u_hat, "bce_grad");
  Array g(u.rows(), u.cols());
  const double n = static_cast<double>(u.size());
  const auto uv = u.values();
  const auto pv = u_hat.values();
  auto gv = g.values();
  for (std::size_t i = 0; i < uv.size(); ++i) {
    const double p = pv[i];
    // Zero where the clamp is active.
    if (p <= kBceClamp || p >= 1.0 - kBceClamp) continue;
    gv[i] = (p - uv[i]) / (p * (1.0 - p) * n);
  }
  return g;
}

Array mmse_grad(const Array& u, const Array& y, const Array& y_hat) {
  check_shapes(u, y, "mmse_grad");
  check_shapes(u, y_hat, "mmse_grad");
  Array g(u.rows(), u.cols());
  const double n = static_cast<double>(u.size());
  const auto uv = u.values();
  const auto yv = y.values();
  const auto hv = y_hat.values();
  auto gv = g.values();
  for (std::size_t i = 0; i < uv.size(); ++i) gv[i] = -2.0 * uv[i] * (yv[i] - hv[i]) / n;
  return g;
}

Array skewed_w_grad(const Array& u, const Array& w, const Array& w_hat, double gamma) {
  check_shapes(u, w, "skewed_w_grad");
  check_shapes(u, w_hat, "skewed_w_grad");
  Array g(u.rows(), u.cols());
  const double n = static_cast<double>(u.size());
  const auto uv = u.values();
  const auto wv = w.values();
  const auto hv = w_hat.values();
  auto gv = g.values();
  for (std::size_t i = 0; i < uv.size(); ++i) {
    const double e = wv[i] - hv[i];
    gv[i] = -uv[i] * (2.0 * (1.0 - gamma) * e + 2.0 * gamma * std::abs(e)) / n;
  }
  return g;
}

LossBreakdown loss_breakdown(const LossMaps& t, const LossMaps& p, const LossWeights& wts) {
  LossBreakdown r;
  r.bce = bce(t.u, p.u);
  r.mmse_c = mmse(t.u, t.c, p.c);
  r.mmse_s = mmse(t.u, t.s, p.s);
  r.skewed_w = skewed_w_loss(t.u, t.w, p.w, wts.gamma);
  r.mmse_b = mmse(t.u, t.b, p.b);
  r.total = r.bce + wts.lambda_c * r.mmse_c + wts.lambda_s * r.mmse_s +
            wts.lambda_w * r.skewed_w + wts.lambda_b * r.mmse_b;
  return r;
}

double total_loss(const LossMaps& target, const LossMaps& pred, const LossWeights& wts) {
  return loss_breakdown(target, pred, wts).total;
}

double grad_check(const std::function<double(const Array&)>& f, const Array& x,
                  const Array& analytic, double h) {
  check_shapes(x, analytic, "grad_check");
  Array probe = x;
  auto pv = probe.values();
  const auto av = analytic.values();
  // Norm-wise: per-element ratios blow up where the gradient is near zero and
  // the difference quotient is dominated by cancellation in f.
  double diff2 = 0.0, num2 = 0.0, ana2 = 0.0;
  for (std::size_t i = 0; i < pv.size(); ++i) {
    const double orig = pv[i];
    pv[i] = orig + h;
    const double up = f(probe);
    pv[i] = orig - h;
    const double down = f(probe);
    pv[i] = orig;
    const double numeric = (up - down) / (2.0 * h);
    diff2 += (numeric - av[i]) * (numeric - av[i]);
    num2 += numeric * numeric;
    ana2 += av[i] * av[i];
  }
  const double scale = std::sqrt(std::max(num2, ana2));
  return scale == 0.0 ? 0.0 : std::sqrt(diff2) / scale;
}

std::pair<LossMaps, LossMaps> random_loss_case(std::uint64_t seed, std::size_t n) {
  Rng rng(derive_seed(seed, 0x1055));
  LossMaps t{Array(n, n), Array(n, n), Array(n, n), Array(n, n), Array(n, n)};
  LossMaps p = t;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      const Angle2Enc e = encode_angle(rng.uniform(0.0, kPi));
      t.u(j, k) = rng.uniform() < 0.5 ? 1.0 : 0.0;
      t.c(j, k) = e.c;
      t.s(j, k) = e.s;
      t.w(j, k) = rng.uniform(0.30, 1.55);
      t.b(j, k) = rng.uniform(0.7, 1.0);
      p.u(j, k) = rng.uniform(0.05, 0.95);
      p.c(j, k) = rng.uniform(-1.0, 1.0);
      p.s(j, k) = rng.uniform(-1.0, 1.0);
      p.w(j, k) = rng.uniform(0.30, 1.55);
      p.b(j, k) = rng.uniform(0.5, 1.0);
    }
  }
  return {std::move(t), std::move(p)};
}

namespace {

nlohmann::json to_json_rows(const Array& a) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t j = 0; j < a.rows(); ++j) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t k = 0; k < a.cols(); ++k) row.push_back(a(j, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json maps_json(const LossMaps& m) {
  return {{"C", to_json_rows(m.c)}, {"S", to_json_rows(m.s)}, {"W", to_json_rows(m.w)},
          {"U", to_json_rows(m.u)}, {"B", to_json_rows(m.b)}};
}

}  // namespace

nlohmann::json loss_golden(std::size_t count, std::size_t n, const LossWeights& wts) {
  nlohmann::json cases = nlohmann::json::array();
  for (std::size_t seed = 0; seed < count; ++seed) {
    const auto [t, p] = random_loss_case(seed, n);
    const LossBreakdown r = loss_breakdown(t, p, wts);
    cases.push_back({{"seed", seed},
                     {"target", maps_json(t)},
                     {"prediction", maps_json(p)},
                     {"loss",
                      {{"bce", r.bce},
                       {"mmse_c", r.mmse_c},
                       {"mmse_s", r.mmse_s},
                       {"skewed_w", r.skewed_w},
                       {"mmse_b", r.mmse_b},
                       {"total", r.total}}}});
  }
  return {{"schema", "grasplog-loss-golden-v1"},
          {"n", n},
          {"channel_order", {"C", "S", "W", "U", "B"}},
          {"weights",
           {{"lambda_c", wts.lambda_c},
            {"lambda_s", wts.lambda_s},
            {"lambda_w", wts.lambda_w},
            {"lambda_b", wts.lambda_b},
            {"gamma", wts.gamma}}},
          {"bce_clamp", kBceClamp},
          {"cases", std::move(cases)}};
}

}  // namespace grasplog
