#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "grasplog/dataset.hpp"
#include "grasplog/graspmap.hpp"
#include "grasplog/planner.hpp"
#include "grasplog/render.hpp"

namespace grasplog {

/// What a predictor sees for one (pile, subset) query. Ground-truth
/// predictors may also use the pile itself.
struct PredictorQuery {
  const Pile* pile = nullptr;
  const RenderResult* rendered = nullptr;
  const FloatImage* target_mask = nullptr;
  IdSet targets;
  std::string sample_id;
  ImageGrid grid;
};

class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::string name() const = 0;
  virtual GraspMap predict(const PredictorQuery& q) const = 0;
};

/// Ground-truth annotation, with B holding the balance of the grasp decoded
/// at each grasp pixel.
class OraclePredictor : public Predictor {
 public:
  std::string name() const override { return "oracle"; }
  GraspMap predict(const PredictorQuery& q) const override;
};

/// Oracle plus Gaussian noise of deviation sigma on every channel, seeded per sample.
class NoisyOraclePredictor : public Predictor {
 public:
  NoisyOraclePredictor(double sigma, std::uint64_t seed);
  std::string name() const override { return "noisy"; }
  GraspMap predict(const PredictorQuery& q) const override;

 private:
  double sigma_;
  std::uint64_t seed_;
};

/// Reads `pred_<sample_id>.gmt` from a directory. Throws IoError when the
/// directory or a file is missing or malformed.
class FilePredictor : public Predictor {
 public:
  explicit FilePredictor(std::filesystem::path dir);
  std::string name() const override { return "file"; }
  GraspMap predict(const PredictorQuery& q) const override;

 private:
  std::filesystem::path dir_;
};

struct EvalOptions {
  QualityParams quality;
  std::optional<int> subset_cap;  // default: 4 when a pile has more than 5 logs
  double width_bonus = 0.0;       // added to decoded widths, clamped to range
  ImageGrid grid;
  unsigned threads = 1;
};

struct PileTrial {
  int pile_id = 0;
  bool has_grasp = false;
  IdSet targets;
  Grasp grasp;
  double q = 0.0;
  double b_pred = 1.0;
  TrialResult trial;
};

struct EvalReport {
  std::string predictor;
  QualityKind kind = QualityKind::F1;
  std::size_t piles = 0;
  double success_rate = 0.0;
  double avg_logs_grasped = 0.0;  // over successes
  double beta_avg_deg = 0.0;      // over successes
  double beta_max_deg = 0.0;
  std::optional<double> balance_rmse_deg;
  std::vector<PileTrial> trials;
};

/// One pile: best grasp over all target subsets, then its trial.
PileTrial evaluate_pile(const Pile& pile, int pile_id, const Predictor& predictor,
                        const EvalOptions& opt);

/// Throws std::invalid_argument("no piles") on an empty list.
EvalReport evaluate(const std::vector<NamedPile>& piles, const Predictor& predictor,
                    const EvalOptions& opt);

/// RMS of arccos(b_pred) - beta over successful trials, degrees.
/// Throws std::domain_error when there are none.
double balance_rmse(const EvalReport& report);

nlohmann::json report_to_json(const EvalReport& r);
std::string report_table(const std::vector<EvalReport>& reports);

struct EmptyingStep {
  PileTrial attempt;
  std::size_t remaining_before = 0;
};

struct EmptyingResult {
  std::vector<EmptyingStep> steps;
  bool emptied = false;
  std::size_t grasps_to_empty() const noexcept { return steps.size(); }
};

/// Sequential protocol: grasp, remove captured logs, re-settle, repeat until
/// the pile is empty, a trial fails, no grasp is found or attempts run out.
EmptyingResult empty_pile(const Pile& pile, const Predictor& predictor, const EvalOptions& opt,
                          int max_attempts = 10, int pile_id = 0);

struct PerturbationReport {
  EvalReport baseline;
  EvalReport mask_hole;
  EvalReport thick;
};

/// Predictor wrapper that erases a 40%-length stretch of every target log
/// from the query mask before delegating.
class MaskHolePredictor : public Predictor {
 public:
  MaskHolePredictor(const Predictor& inner, std::uint64_t seed) : inner_(inner), seed_(seed) {}
  std::string name() const override { return inner_.name() + "+hole"; }
  GraspMap predict(const PredictorQuery& q) const override;

 private:
  const Predictor& inner_;
  std::uint64_t seed_;
};

/// Mask with a hole of 40% of the log length cut across each target log.
FloatImage erase_mask_hole(const FloatImage& mask, const Pile& pile, const IdSet& targets,
                           const ImageGrid& grid, std::uint64_t seed);

PerturbationReport perturbation_suite(const std::vector<NamedPile>& piles, const Predictor& predictor,
                                      const EvalOptions& opt, std::uint64_t seed = 0);
nlohmann::json perturbation_to_json(const PerturbationReport& r);

}  // namespace grasplog
