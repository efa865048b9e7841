#pragma once

#include <cstdint>
#include <functional>

#include <json.hpp>

#include "grasplog/image.hpp"

namespace grasplog {

using Array = Grid<double>;

struct LossWeights {
  double lambda_c = 30.0;
  double lambda_s = 30.0;
  double lambda_w = 60.0;
  double lambda_b = 120.0;
  double gamma = 1.0 / 3.0;
};

inline constexpr double kBceClamp = 1e-7;

/// Pixel-mean binary cross entropy; predictions clamped to [1e-7, 1 - 1e-7].
double bce(const Array& u, const Array& u_hat);
/// Masked squared error, normalized by the full pixel count.
double mmse(const Array& u, const Array& y, const Array& y_hat);
/// Masked width loss with eps = w - w_hat: (1-gamma) eps^2 + gamma eps |eps|.
double skewed_w_loss(const Array& u, const Array& w, const Array& w_hat, double gamma = 1.0 / 3.0);

Array bce_grad(const Array& u, const Array& u_hat);
Array mmse_grad(const Array& u, const Array& y, const Array& y_hat);
Array skewed_w_grad(const Array& u, const Array& w, const Array& w_hat, double gamma = 1.0 / 3.0);

/// Channels in storage order.
struct LossMaps {
  Array c, s, w, u, b;
};

struct LossBreakdown {
  double bce = 0.0;
  double mmse_c = 0.0;
  double mmse_s = 0.0;
  double skewed_w = 0.0;
  double mmse_b = 0.0;
  double total = 0.0;
};

LossBreakdown loss_breakdown(const LossMaps& target, const LossMaps& pred, const LossWeights& wts = {});
double total_loss(const LossMaps& target, const LossMaps& pred, const LossWeights& wts = {});

/// Relative L2 error between `analytic` and central differences of `f` at `x`.
double grad_check(const std::function<double(const Array&)>& f, const Array& x,
                  const Array& analytic, double h = 1e-5);

/// Seeded random target/prediction pair of side n (binary U, unit (C, S),
/// widths in range; predictions in the open intervals the losses expect).
std::pair<LossMaps, LossMaps> random_loss_case(std::uint64_t seed, std::size_t n);

/// Golden file with inputs and all loss terms for seeds 0..count-1.
nlohmann::json loss_golden(std::size_t count = 10, std::size_t n = 8, const LossWeights& wts = {});

}  // namespace grasplog
