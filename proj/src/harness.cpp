#include "grasplog/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "grasplog/io.hpp"
#include "grasplog/parallel.hpp"
#include "grasplog/rng.hpp"

namespace grasplog {

namespace fs = std::filesystem;

namespace {

constexpr double kRadToDeg = 180.0 / kPi;

std::vector<Log> logs_of(const Pile& pile, const IdSet& ids) {
  std::vector<Log> out;
  for (int id : ids) out.push_back(pile.log(id));
  return out;
}

}  // namespace

GraspMap OraclePredictor::predict(const PredictorQuery& q) const {
  GraspMap m = encode(annotate(*q.pile, q.targets, q.grid), q.grid);
  const std::vector<Log> bundle = logs_of(*q.pile, q.targets);
  const std::size_t n = m.size();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (m.u(j, k) == 0.0f) continue;
      Grasp g;
      const Vec2 c = q.grid.center(j, k);
      g.x = c.x;
      g.y = c.y;
      g.phi = decode_angle({m.c(j, k), m.s(j, k)});
      g.w = m.w(j, k);
      m.b(j, k) = static_cast<float>(balance_of(g, bundle).b);
    }
  }
  return m;
}

NoisyOraclePredictor::NoisyOraclePredictor(double sigma, std::uint64_t seed) : sigma_(sigma), seed_(seed) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("noise sigma must be >= 0");
}

GraspMap NoisyOraclePredictor::predict(const PredictorQuery& q) const {
  GraspMap m = OraclePredictor().predict(q);
  Rng rng(derive_seed(seed_, hash_string(q.sample_id)));
  auto noisy = [&](FloatImage& img, float lo, float hi) {
    for (float& v : img.values())
      v = std::clamp(static_cast<float>(v + sigma_ * rng.normal(0.0, 1.0)), lo, hi);
  };
  noisy(m.c, -1.0f, 1.0f);
  noisy(m.s, -1.0f, 1.0f);
  noisy(m.w, 0.30f, 1.55f);
  noisy(m.u, 0.0f, 1.0f);
  noisy(m.b, 0.0f, 1.0f);
  return m;
}

FilePredictor::FilePredictor(fs::path dir) : dir_(std::move(dir)) {
  if (!fs::is_directory(dir_)) throw IoError("prediction directory not found: " + dir_.string());
}

GraspMap FilePredictor::predict(const PredictorQuery& q) const {
  const fs::path file = dir_ / ("pred_" + q.sample_id + ".gmt");
  GraspMap m = graspmap_from_tensor(read_gmt(file));
  if (m.size() != q.grid.n) throw IoError(file.string() + ": resolution does not match the grid");
  return m;
}

PileTrial evaluate_pile(const Pile& pile, int pile_id, const Predictor& predictor, const EvalOptions& opt) {
  PileTrial out;
  out.pile_id = pile_id;
  if (pile.logs.empty()) return out;
  const RenderResult rendered = render(pile, opt.grid);
  const auto subsets = enumerate_subsets(pile.ids(), default_subset_cap(static_cast<int>(pile.logs.size()), opt.subset_cap));

  std::vector<GraspMap> maps;
  maps.reserve(subsets.size());
  for (const IdSet& s : subsets) {
    const FloatImage mask = make_input(rendered, s).mask;
    PredictorQuery q{&pile, &rendered, &mask, s, sample_id(pile_id, s), opt.grid};
    maps.push_back(predictor.predict(q));
  }
  std::vector<SubsetMap> refs;
  for (std::size_t i = 0; i < maps.size(); ++i) refs.push_back({&maps[i], static_cast<int>(subsets[i].size())});

  const auto best = select_over_subsets(refs, opt.quality, opt.grid);
  if (!best) return out;
  out.has_grasp = true;
  out.targets = subsets[best->subset];
  out.grasp = best->selection.grasp;
  out.grasp.w = std::clamp(out.grasp.w + opt.width_bonus, 0.30, 1.55);
  out.q = best->selection.q;
  out.b_pred = best->selection.b;
  out.trial = simulate_grasp(pile, out.grasp, out.targets);
  return out;
}

namespace {

void summarize(EvalReport& r) {
  std::size_t ok = 0;
  double logs = 0.0, beta_sum = 0.0, beta_max = 0.0;
  for (const PileTrial& t : r.trials) {
    if (!t.has_grasp || !t.trial.success) continue;
    ++ok;
    logs += static_cast<double>(t.trial.captured.size());
    beta_sum += t.trial.beta * kRadToDeg;
    beta_max = std::max(beta_max, t.trial.beta * kRadToDeg);
  }
  r.piles = r.trials.size();
  r.success_rate = r.piles ? static_cast<double>(ok) / static_cast<double>(r.piles) : 0.0;
  r.avg_logs_grasped = ok ? logs / static_cast<double>(ok) : 0.0;
  r.beta_avg_deg = ok ? beta_sum / static_cast<double>(ok) : 0.0;
  r.beta_max_deg = beta_max;
  r.balance_rmse_deg = ok ? std::optional<double>(balance_rmse(r)) : std::nullopt;
}

}  // namespace

EvalReport evaluate(const std::vector<NamedPile>& piles, const Predictor& predictor, const EvalOptions& opt) {
  if (piles.empty()) throw std::invalid_argument("no piles");
  EvalReport r;
  r.predictor = predictor.name();
  r.kind = opt.quality.kind;
  r.trials.resize(piles.size());
  parallel_for(piles.size(), opt.threads, [&](std::size_t i) {
    r.trials[i] = evaluate_pile(piles[i].pile, piles[i].id, predictor, opt);
  });
  summarize(r);
  return r;
}

double balance_rmse(const EvalReport& report) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const PileTrial& t : report.trials) {
    if (!t.has_grasp || !t.trial.success) continue;
    const double err = std::acos(std::clamp(t.b_pred, -1.0, 1.0)) - t.trial.beta;
    sum += err * err;
    ++n;
  }
  if (n == 0) throw std::domain_error("balance RMSE undefined without successful grasps");
  return std::sqrt(sum / static_cast<double>(n)) * kRadToDeg;
}

nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json trials = nlohmann::json::array();
  for (const PileTrial& t : r.trials) {
    nlohmann::json j{{"pile_id", t.pile_id}, {"has_grasp", t.has_grasp}};
    if (t.has_grasp) {
      j["targets"] = t.targets;
      j["grasp"] = grasp_to_json(t.grasp);
      j["q"] = t.q;
      j["b_pred"] = t.b_pred;
      j["trial"] = trial_to_json(t.trial);
    }
    trials.push_back(std::move(j));
  }
  return {{"predictor", r.predictor},
          {"quality", to_string(r.kind)},
          {"piles", r.piles},
          {"success_rate", r.success_rate},
          {"avg_logs_grasped", r.avg_logs_grasped},
          {"beta_avg_deg", r.beta_avg_deg},
          {"beta_max_deg", r.beta_max_deg},
          {"balance_rmse_deg", r.balance_rmse_deg ? nlohmann::json(*r.balance_rmse_deg) : nlohmann::json(nullptr)},
          {"trials", std::move(trials)}};
}

std::string report_table(const std::vector<EvalReport>& reports) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %-8s %12s %14s %10s %10s\n", "predictor", "quality",
                "success", "avg. logs", "beta_avg", "beta_max");
  os << line;
  for (const EvalReport& r : reports) {
    std::snprintf(line, sizeof line, "%-10s %-8s %11.1f%% %14.2f %9.1f° %9.1f°\n", r.predictor.c_str(),
                  std::string(to_string(r.kind)).c_str(), 100.0 * r.success_rate, r.avg_logs_grasped,
                  r.beta_avg_deg, r.beta_max_deg);
    os << line;
  }
  return os.str();
}

EmptyingResult empty_pile(const Pile& pile, const Predictor& predictor, const EvalOptions& opt,
                          int max_attempts, int pile_id) {
  EmptyingResult out;
  Pile current = pile;
  for (int attempt = 0; attempt < max_attempts && !current.logs.empty(); ++attempt) {
    EmptyingStep step;
    step.remaining_before = current.logs.size();
    step.attempt = evaluate_pile(current, pile_id, predictor, opt);
    out.steps.push_back(step);
    if (!step.attempt.has_grasp || !step.attempt.trial.success) break;
    current = remove_logs(current, step.attempt.trial.captured);
  }
  out.emptied = current.logs.empty();
  return out;
}

FloatImage erase_mask_hole(const FloatImage& mask, const Pile& pile, const IdSet& targets,
                           const ImageGrid& grid, std::uint64_t seed) {
  FloatImage out = mask;
  Rng rng(seed);
  for (int id : targets) {
    const Log& l = pile.log(id);
    const double half = l.half_extent();
    const double hole = 0.4 * 2.0 * half;
    const double start = rng.uniform(-half, half - hole);
    for (std::size_t j = 0; j < grid.n; ++j) {
      for (std::size_t k = 0; k < grid.n; ++k) {
        const Vec2 d = grid.center(j, k) - l.center;
        const double t = dot(d, l.axis());
        if (t < start || t > start + hole) continue;
        if (std::abs(cross(l.axis(), d)) > l.radius() + grid.pitch()) continue;
        out(j, k) = 0.0f;
      }
    }
  }
  return out;
}

GraspMap MaskHolePredictor::predict(const PredictorQuery& q) const {
  PredictorQuery degraded = q;
  const FloatImage mask = erase_mask_hole(*q.target_mask, *q.pile, q.targets, q.grid,
                                          derive_seed(seed_, hash_string(q.sample_id)));
  degraded.target_mask = &mask;
  return inner_.predict(degraded);
}

PerturbationReport perturbation_suite(const std::vector<NamedPile>& piles, const Predictor& predictor,
                                      const EvalOptions& opt, std::uint64_t seed) {
  PerturbationReport r;
  r.baseline = evaluate(piles, predictor, opt);
  const MaskHolePredictor holed(predictor, seed);
  r.mask_hole = evaluate(piles, holed, opt);
  std::vector<NamedPile> thick;
  for (const NamedPile& p : piles) thick.push_back({p.id, scale_diameters(p.pile, 2.0)});
  r.thick = evaluate(thick, predictor, opt);
  return r;
}

nlohmann::json perturbation_to_json(const PerturbationReport& r) {
  auto brief = [&](const EvalReport& e) {
    return nlohmann::json{{"success_rate", e.success_rate},
                          {"success_delta", e.success_rate - r.baseline.success_rate},
                          {"avg_logs_grasped", e.avg_logs_grasped},
                          {"beta_avg_deg", e.beta_avg_deg}};
  };
  return {{"predictor", r.baseline.predictor},
          {"quality", to_string(r.baseline.kind)},
          {"baseline", brief(r.baseline)},
          {"mask_hole", brief(r.mask_hole)},
          {"diameter_x2", brief(r.thick)}};
}

}  // namespace grasplog
