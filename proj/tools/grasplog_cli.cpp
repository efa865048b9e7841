// grasplog: generate log-pile grasp datasets and evaluate grasp predictors.
//
// Exit codes: 0 success, 1 usage, 2 I/O, 3 internal invariant violation.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "grasplog/dataset.hpp"
#include "grasplog/errors.hpp"
#include "grasplog/harness.hpp"
#include "grasplog/io.hpp"
#include "grasplog/losses.hpp"
#include "grasplog/parallel.hpp"
#include "grasplog/viz.hpp"

namespace fs = std::filesystem;
using namespace grasplog;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kIo = 2, kInvariant = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t env_seed() {
  const char* s = std::getenv("GRASPLOG_SEED");
  if (!s || !*s) return 7;
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw UsageError("GRASPLOG_SEED must be an unsigned integer");
  }
}

struct Config {
  std::uint64_t seed = 7;
  int n_piles = 1;
  int n_logs = 4;
  std::size_t resolution = 256;
  std::string out;
  std::string data;
  std::string quality = "f1";
  int subset_cap = 0;  // 0: default rule
  double q_min = 0.5;
  double width_bonus = 0.0;
  unsigned threads = 1;
  std::string predictor = "oracle";
  std::string pred_dir;
  double noise_sigma = 0.05;
  int max_attempts = 10;
  double train_frac = 0.8;
  std::string sample;
  std::string config_file;

  json echo() const {
    return {{"seed", seed},         {"piles", n_piles},          {"logs", n_logs},
            {"resolution", resolution}, {"quality", quality},    {"subset_cap", subset_cap},
            {"q_min", q_min},       {"width_bonus", width_bonus}, {"predictor", predictor},
            {"noise_sigma", noise_sigma}, {"max_attempts", max_attempts}};
  }
};

/// Fills options not given on the command line from the JSON config file.
void apply_config_file(CLI::App& cmd, Config& cfg) {
  if (cfg.config_file.empty()) return;
  const json j = read_json(cfg.config_file);
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  auto take = [&](const char* key, auto& field) {
    const std::string flag = std::string("--") + key;
    if (!j.contains(key)) return;
    CLI::Option* opt = cmd.get_option_no_throw(flag);
    if (opt && opt->count() > 0) return;
    try {
      field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    } catch (const json::exception&) {
      throw UsageError(std::string("config: bad value for ") + key);
    }
  };
  take("seed", cfg.seed);
  take("piles", cfg.n_piles);
  take("logs", cfg.n_logs);
  take("resolution", cfg.resolution);
  take("out", cfg.out);
  take("data", cfg.data);
  take("quality", cfg.quality);
  take("subset-cap", cfg.subset_cap);
  take("q-min", cfg.q_min);
  take("width-bonus", cfg.width_bonus);
  take("threads", cfg.threads);
  take("predictor", cfg.predictor);
  take("pred-dir", cfg.pred_dir);
  take("noise-sigma", cfg.noise_sigma);
  take("max-attempts", cfg.max_attempts);
  take("train-frac", cfg.train_frac);
}

void validate(const Config& c) {
  if (c.n_piles < 1) throw UsageError("--piles must be >= 1");
  if (c.n_logs < 1 || c.n_logs > 16) throw UsageError("--logs must be in [1, 16]");
  if (c.resolution < 8 || c.resolution > 4096) throw UsageError("--resolution must be in [8, 4096]");
  if (c.subset_cap < 0) throw UsageError("--subset-cap must be >= 0");
  if (c.threads < 1) throw UsageError("--threads must be >= 1");
  if (c.width_bonus < 0.0) throw UsageError("--width-bonus must be >= 0");
  if (c.noise_sigma < 0.0) throw UsageError("--noise-sigma must be >= 0");
  if (c.train_frac < 0.0 || c.train_frac > 1.0) throw UsageError("--train-frac must be in [0, 1]");
  if (c.quality != "f1" && c.quality != "f2" && c.quality != "f3" && c.quality != "all")
    throw UsageError("--quality must be f1, f2, f3 or all");
}

ImageGrid grid_of(const Config& c) { return {c.resolution, 5.0}; }

EvalOptions eval_options(const Config& c, QualityKind kind) {
  EvalOptions o;
  o.quality.kind = kind;
  o.quality.q_min = c.q_min;
  if (c.subset_cap > 0) o.subset_cap = c.subset_cap;
  o.width_bonus = c.width_bonus;
  o.grid = grid_of(c);
  o.threads = c.threads;
  return o;
}

std::unique_ptr<Predictor> make_predictor(const Config& c) {
  if (c.predictor == "oracle") return std::make_unique<OraclePredictor>();
  if (c.predictor == "noisy") return std::make_unique<NoisyOraclePredictor>(c.noise_sigma, c.seed);
  if (c.predictor == "file") {
    if (c.pred_dir.empty()) throw UsageError("--predictor file needs --pred-dir");
    return std::make_unique<FilePredictor>(c.pred_dir);
  }
  throw UsageError("--predictor must be oracle, noisy or file");
}

/// Piles from --data, or freshly generated from --piles/--logs/--seed.
std::vector<NamedPile> input_piles(const Config& c) {
  if (!c.data.empty()) return load_piles(c.data);
  std::vector<NamedPile> piles(static_cast<std::size_t>(c.n_piles));
  for (int i = 0; i < c.n_piles; ++i) piles[static_cast<std::size_t>(i)] = {i, generate_pile(c.n_logs, pile_seed(c.seed, i))};
  return piles;
}

void check_piles(const std::vector<NamedPile>& piles) {
  for (const NamedPile& p : piles) {
    const auto v = pile_violations(p.pile);
    if (!v.empty()) throw InvariantError("pile " + std::to_string(p.id) + ": " + v.front());
  }
}

fs::path out_dir(const Config& c, const char* fallback) {
  const fs::path d = c.out.empty() ? fs::path(fallback) : fs::path(c.out);
  std::error_code ec;
  fs::create_directories(d, ec);
  if (ec) throw IoError("cannot create " + d.string() + ": " + ec.message());
  return d;
}

std::vector<QualityKind> kinds_of(const Config& c) {
  if (c.quality == "all") return {QualityKind::F1, QualityKind::F2, QualityKind::F3};
  return {quality_kind_from_string(c.quality)};
}

int cmd_gen(const Config& c) {
  if (c.out.empty()) throw UsageError("gen needs --out");
  GenConfig g;
  g.root = c.out;
  g.n_piles = c.n_piles;
  g.n_logs = c.n_logs;
  g.seed = c.seed;
  g.resolution = c.resolution;
  if (c.subset_cap > 0) g.subset_cap = c.subset_cap;
  g.threads = c.threads;
  g.train_frac = c.train_frac;
  const GenSummary s = generate_dataset(g);
  const std::vector<NamedPile> piles = load_piles(g.root);
  check_piles(piles);
  std::cout << "piles " << s.piles << "\nsamples " << s.samples << "\ngrasps " << s.grasps
            << "\nno_grasp_samples " << s.no_grasp << "\n";
  return kOk;
}

int cmd_eval(const Config& c) {
  const auto predictor = make_predictor(c);
  const auto piles = input_piles(c);
  const fs::path dir = out_dir(c, "eval_out");
  std::vector<EvalReport> reports;
  json all = json::array();
  std::string trials;
  for (QualityKind k : kinds_of(c)) {
    EvalReport r = evaluate(piles, *predictor, eval_options(c, k));
    json j = report_to_json(r);
    j["config"] = c.echo();
    for (const auto& t : j["trials"]) trials += t.dump() + "\n";
    all.push_back(std::move(j));
    reports.push_back(std::move(r));
  }
  const std::string table = report_table(reports);
  write_text_atomic(dir / "report.json", (all.size() == 1 ? all[0] : all).dump(1) + "\n");
  write_text_atomic(dir / "report.txt", table);
  write_text_atomic(dir / "trials.jsonl", trials);
  std::cout << table;
  return kOk;
}

int cmd_empty(const Config& c) {
  const auto predictor = make_predictor(c);
  const auto piles = input_piles(c);
  const fs::path dir = out_dir(c, "empty_out");
  const QualityKind kind = c.quality == "all" ? QualityKind::F2 : quality_kind_from_string(c.quality);
  EvalOptions opt = eval_options(c, kind);
  std::vector<EmptyingResult> results(piles.size());
  parallel_for(piles.size(), c.threads, [&](std::size_t i) {
    EvalOptions single = opt;
    single.threads = 1;
    results[i] = empty_pile(piles[i].pile, *predictor, single, c.max_attempts, piles[i].id);
  });
  json rows = json::array();
  std::size_t emptied = 0, within4 = 0;
  double grasp_sum = 0.0;
  for (std::size_t i = 0; i < piles.size(); ++i) {
    const EmptyingResult& r = results[i];
    json steps = json::array();
    for (const EmptyingStep& s : r.steps) {
      json sj{{"remaining_before", s.remaining_before}, {"has_grasp", s.attempt.has_grasp}};
      if (s.attempt.has_grasp) {
        sj["targets"] = s.attempt.targets;
        sj["grasp"] = grasp_to_json(s.attempt.grasp);
        sj["trial"] = trial_to_json(s.attempt.trial);
      }
      steps.push_back(std::move(sj));
    }
    rows.push_back({{"pile_id", piles[i].id}, {"emptied", r.emptied}, {"grasps", r.steps.size()}, {"steps", std::move(steps)}});
    if (r.emptied) {
      ++emptied;
      grasp_sum += static_cast<double>(r.steps.size());
      if (r.steps.size() <= 4) ++within4;
    }
  }
  const json report{{"config", c.echo()},
                    {"quality", to_string(kind)},
                    {"piles", piles.size()},
                    {"emptied", emptied},
                    {"emptied_within_4", within4},
                    {"avg_grasps_when_emptied", emptied ? grasp_sum / static_cast<double>(emptied) : 0.0},
                    {"results", std::move(rows)}};
  write_text_atomic(dir / "empty.json", report.dump(1) + "\n");
  std::cout << "piles " << piles.size() << "\nemptied " << emptied << "\nemptied_within_4 " << within4
            << "\navg_grasps_when_emptied " << report["avg_grasps_when_emptied"].get<double>() << "\n";
  return kOk;
}

int cmd_perturb(const Config& c) {
  const auto predictor = make_predictor(c);
  const auto piles = input_piles(c);
  const fs::path dir = out_dir(c, "perturb_out");
  json all = json::array();
  for (QualityKind k : kinds_of(c)) {
    const PerturbationReport r = perturbation_suite(piles, *predictor, eval_options(c, k), c.seed);
    json j = perturbation_to_json(r);
    j["config"] = c.echo();
    std::cout << to_string(k) << ": baseline " << r.baseline.success_rate << ", mask hole "
              << r.mask_hole.success_rate << ", diameter x2 " << r.thick.success_rate << "\n";
    all.push_back(std::move(j));
  }
  write_text_atomic(dir / "perturbation.json", (all.size() == 1 ? all[0] : all).dump(1) + "\n");
  return kOk;
}

int cmd_viz(const Config& c) {
  if (c.data.empty() || c.sample.empty()) throw UsageError("viz needs --data and --sample");
  const DatasetManifest m = manifest_from_json(read_json(fs::path(c.data) / "manifest.json"));
  const auto it = std::find_if(m.samples.begin(), m.samples.end(),
                               [&](const ManifestEntry& e) { return e.sample_id == c.sample; });
  if (it == m.samples.end()) throw IoError("sample not in manifest: " + c.sample);
  const SampleRecord rec = read_sample(c.data, *it);
  const ImageGrid grid{rec.target.size(), 5.0};
  QualityParams q;
  q.kind = quality_kind_from_string(c.quality == "all" ? "f1" : c.quality);
  q.q_min = c.q_min;
  const auto sel = select_best(rec.target, static_cast<int>(rec.target_set.size()), q, grid);
  const fs::path dir = out_dir(c, ("viz_" + c.sample).c_str());
  const auto files = write_sample_pngs(dir, rec, grid, sel ? std::optional<Grasp>(sel->grasp) : std::nullopt);
  for (const auto& f : files) std::cout << f.string() << "\n";
  return kOk;
}

int cmd_stats(const Config& c) {
  if (c.data.empty()) throw UsageError("stats needs --data");
  const DatasetManifest m = manifest_from_json(read_json(fs::path(c.data) / "manifest.json"));
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> by_tau;  // samples, grasps
  std::size_t train = 0;
  for (const ManifestEntry& e : m.samples) {
    auto& b = by_tau[e.subset.size()];
    ++b.first;
    b.second += e.grasp_count;
    if (e.split == "train") ++train;
  }
  std::cout << "piles " << m.piles.size() << "\nsamples " << m.samples.size() << "\ngrasps " << m.grasp_total()
            << "\nno_grasp_samples " << m.no_grasp_total() << "\ntrain " << train << "\nval "
            << m.samples.size() - train << "\n";
  for (const auto& [tau, v] : by_tau) std::cout << "tau " << tau << ": samples " << v.first << ", grasps " << v.second << "\n";
  return kOk;
}

int cmd_losses_golden(const Config& c) {
  if (c.out.empty()) throw UsageError("losses-golden needs --out");
  write_text_atomic(c.out, loss_golden().dump(1) + "\n");
  std::cout << c.out << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic log-pile grasp datasets and grasp predictor evaluation"};
  app.require_subcommand(1);
  Config cfg;
  try {
    cfg.seed = env_seed();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  auto common = [&](CLI::App* s) {
    s->add_option("--config", cfg.config_file, "JSON file with option defaults");
    s->add_option("--seed", cfg.seed, "Base seed (default: $GRASPLOG_SEED or 7)");
    s->add_option("--piles", cfg.n_piles, "Number of piles");
    s->add_option("--logs", cfg.n_logs, "Logs per pile");
    s->add_option("--resolution", cfg.resolution, "Image side in pixels");
    s->add_option("--out", cfg.out, "Output path");
    s->add_option("--threads", cfg.threads, "Worker threads");
    s->add_option("--subset-cap", cfg.subset_cap, "Largest target subset (0: 4 for piles above 5 logs)");
  };
  auto evalish = [&](CLI::App* s) {
    s->add_option("--data", cfg.data, "Dataset root to take piles from");
    s->add_option("--quality", cfg.quality, "f1, f2, f3 or all");
    s->add_option("--q-min", cfg.q_min, "Minimum quality for a grasp");
    s->add_option("--width-bonus", cfg.width_bonus, "Added to predicted widths (m)");
    s->add_option("--predictor", cfg.predictor, "oracle, noisy or file");
    s->add_option("--pred-dir", cfg.pred_dir, "Directory of pred_<sample_id>.gmt files");
    s->add_option("--noise-sigma", cfg.noise_sigma, "Noise of the noisy oracle");
  };

  CLI::App* gen = app.add_subcommand("gen", "Generate piles, annotated samples and a manifest");
  common(gen);
  gen->add_option("--train-frac", cfg.train_frac, "Fraction of piles tagged train");
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a predictor");
  common(eval);
  evalish(eval);
  CLI::App* empty = app.add_subcommand("empty", "Sequentially empty piles");
  common(empty);
  evalish(empty);
  empty->add_option("--max-attempts", cfg.max_attempts, "Grasp attempts per pile");
  CLI::App* perturb = app.add_subcommand("perturb", "Mask-hole and thick-log perturbation runs");
  common(perturb);
  evalish(perturb);
  CLI::App* viz = app.add_subcommand("viz", "Render a sample as PNG files");
  common(viz);
  viz->add_option("--data", cfg.data, "Dataset root")->required();
  viz->add_option("--sample", cfg.sample, "Sample id")->required();
  viz->add_option("--quality", cfg.quality, "Quality used to pick the drawn grasp");
  viz->add_option("--q-min", cfg.q_min, "Minimum quality for a grasp");
  CLI::App* stats = app.add_subcommand("stats", "Summarize a dataset");
  stats->add_option("--data", cfg.data, "Dataset root")->required();
  CLI::App* golden = app.add_subcommand("losses-golden", "Write the loss golden-value file");
  golden->add_option("--out", cfg.out, "Output JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    apply_config_file(*cmd, cfg);
    validate(cfg);
    if (cmd == gen) return cmd_gen(cfg);
    if (cmd == eval) return cmd_eval(cfg);
    if (cmd == empty) return cmd_empty(cfg);
    if (cmd == perturb) return cmd_perturb(cfg);
    if (cmd == viz) return cmd_viz(cfg);
    if (cmd == stats) return cmd_stats(cfg);
    if (cmd == golden) return cmd_losses_golden(cfg);
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInvariant;
  }
}
