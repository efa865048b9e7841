#include "grasplog/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "grasplog/io.hpp"
#include "grasplog/parallel.hpp"
#include "grasplog/rng.hpp"

namespace grasplog {

namespace fs = std::filesystem;

std::vector<IdSet> enumerate_subsets(const std::vector<int>& ids_in, std::optional<int> max_tau) {
  const IdSet ids = make_id_set(ids_in);
  const int n = static_cast<int>(ids.size());
  if (n < 1) throw std::invalid_argument("enumerate_subsets: need at least one log");
  if (n > 20) throw std::invalid_argument("enumerate_subsets: too many logs");
  const int top = max_tau ? std::min(*max_tau, n) : n;
  std::vector<IdSet> out;
  for (int size = 1; size <= top; ++size) {
    // Lexicographic combinations of `size` indices.
    std::vector<int> idx(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (;;) {
      IdSet s;
      for (int i : idx) s.push_back(ids[static_cast<std::size_t>(i)]);
      out.push_back(std::move(s));
      int pos = size - 1;
      while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - size + pos) --pos;
      if (pos < 0) break;
      ++idx[static_cast<std::size_t>(pos)];
      for (int i = pos + 1; i < size; ++i)
        idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
    }
  }
  return out;
}

std::vector<IdSet> enumerate_subsets(int n_logs, std::optional<int> max_tau) {
  if (n_logs < 1) throw std::invalid_argument("enumerate_subsets: need at least one log");
  std::vector<int> ids(static_cast<std::size_t>(n_logs));
  for (int i = 0; i < n_logs; ++i) ids[static_cast<std::size_t>(i)] = i;
  return enumerate_subsets(ids, max_tau);
}

std::string subset_tag(const IdSet& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(s[i]);
  }
  return out;
}

std::string pile_tag(int pile_id) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d", pile_id);
  return buf;
}

std::string sample_id(int pile_id, const IdSet& subset) {
  return pile_tag(pile_id) + "_" + subset_tag(subset);
}

std::vector<AnnotatedGrasp> annotate(const Pile& pile, const IdSet& targets, const ImageGrid& grid,
                                     std::size_t* candidate_count) {
  const auto candidates = generate_candidates(pile, targets);
  if (candidate_count) *candidate_count = candidates.size();
  ReduceOptions opt;
  opt.footprint_grid = grid;
  return reduce_candidates(candidates, pile, targets, opt);
}

SampleInput make_input(const RenderResult& rendered, const IdSet& targets) {
  SampleInput in;
  in.r = rendered.rgbd.r;
  in.g = rendered.rgbd.g;
  in.b = rendered.rgbd.b;
  in.depth = rendered.rgbd.depth;
  const Mask m = make_target_mask(rendered.masks, targets);
  const std::size_t n = rendered.rgbd.depth.rows();
  in.mask = FloatImage(n, n, 0.0f);
  if (!m.values().empty()) {
    auto dst = in.mask.values();
    auto src = m.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i] ? 1.0f : 0.0f;
  }
  return in;
}

SampleRecord build_sample(const Pile& pile, const RenderResult& rendered, const IdSet& targets,
                          const ImageGrid& grid, int pile_id) {
  SampleRecord rec;
  rec.pile_id = pile_id;
  rec.target_set = targets;
  rec.input = make_input(rendered, targets);
  rec.grasps = annotate(pile, targets, grid, &rec.candidate_count);
  rec.target = encode(rec.grasps, grid);
  rec.no_grasp = rec.grasps.empty();
  return rec;
}

std::string_view to_string(Augment a) noexcept {
  switch (a) {
    case Augment::Rot90: return "rot90";
    case Augment::Rot180: return "rot180";
    case Augment::Rot270: return "rot270";
    case Augment::FlipH: return "flip_h";
    case Augment::FlipV: return "flip_v";
  }
  return "rot90";
}

namespace {

template <typename F>
SampleRecord map_spatial(const SampleRecord& rec, F&& f) {
  SampleRecord out = rec;
  out.input.r = f(rec.input.r);
  out.input.g = f(rec.input.g);
  out.input.b = f(rec.input.b);
  out.input.depth = f(rec.input.depth);
  out.input.mask = f(rec.input.mask);
  out.target.c = f(rec.target.c);
  out.target.s = f(rec.target.s);
  out.target.w = f(rec.target.w);
  out.target.u = f(rec.target.u);
  out.target.b = f(rec.target.b);
  return out;
}

void adjust_orientation(GraspMap& m, float sc, float ss) {
  const std::size_t n = m.size();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (m.u(j, k) == 0.0f) continue;
      m.c(j, k) *= sc;
      m.s(j, k) *= ss;
    }
  }
}

}  // namespace

SampleRecord augment(const SampleRecord& rec, Augment op) {
  // Annotation lists stay in the original frame; only the arrays move.
  switch (op) {
    case Augment::Rot90: {
      SampleRecord out = map_spatial(rec, [](const FloatImage& g) { return rotate90(g); });
      adjust_orientation(out.target, -1.0f, -1.0f);
      return out;
    }
    case Augment::Rot180:
      return map_spatial(rec, [](const FloatImage& g) { return rotate90(rotate90(g)); });
    case Augment::Rot270: {
      SampleRecord out =
          map_spatial(rec, [](const FloatImage& g) { return rotate90(rotate90(rotate90(g))); });
      adjust_orientation(out.target, -1.0f, -1.0f);
      return out;
    }
    case Augment::FlipH: {
      SampleRecord out = map_spatial(rec, [](const FloatImage& g) { return flip_horizontal(g); });
      adjust_orientation(out.target, 1.0f, -1.0f);
      return out;
    }
    case Augment::FlipV: {
      SampleRecord out = map_spatial(rec, [](const FloatImage& g) { return flip_vertical(g); });
      adjust_orientation(out.target, 1.0f, -1.0f);
      return out;
    }
  }
  return rec;
}

std::size_t DatasetManifest::grasp_total() const noexcept {
  std::size_t n = 0;
  for (const auto& e : samples) n += e.grasp_count;
  return n;
}

std::size_t DatasetManifest::no_grasp_total() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(), [](const ManifestEntry& e) { return e.no_grasp; }));
}

nlohmann::json constants_block() {
  const PlannerParams p;
  const QualityParams q;
  const LogDistribution d;
  const TerrainParams t;
  return {{"width_range_m", {p.min_width, p.max_width}},
          {"clearance_m", p.clearance},
          {"claw_breadth_m", p.claw_breadth},
          {"claw_corridor_m", p.corridor_width},
          {"position_step_m", p.position_step},
          {"angle_offsets_deg", p.angle_offsets_deg},
          {"closure_capacity_m2", p.closure_capacity},
          {"pendulum_length_m", p.pendulum_length},
          {"overlap_threshold_m2", p.overlap_threshold},
          {"encode_rect_m", {kEncodeLength, kEncodeBreadth}},
          {"sentinels", {{"C", 1.0}, {"S", 0.0}, {"W", 0.30}, {"U", 0.0}, {"B", 1.0}}},
          {"quality", {{"mu", q.mu}, {"b_opt", q.b_opt}, {"sigma_b", q.sigma_b}, {"q_min", q.q_min}}},
          {"log_length_m", {{"mean", d.length_mean}, {"sd", d.length_sd}, {"min", d.length_min}, {"max", d.length_max}}},
          {"log_diameter_m",
           {{"mean", d.diameter_mean}, {"sd", d.diameter_sd}, {"min", d.diameter_min}, {"max", d.diameter_max}}},
          {"log_density_kg_m3", d.density},
          {"terrain", {{"octaves", t.octaves}, {"amplitude_m", t.amplitude}, {"scale_m", t.scale}, {"extent_m", t.extent}}},
          {"camera_height_m", kCameraHeight},
          {"channel_order_input", {"R", "G", "B", "D", "M_T"}},
          {"channel_order_target", {"C", "S", "W", "U", "B"}}};
}

nlohmann::json manifest_to_json(const DatasetManifest& m) {
  nlohmann::json samples = nlohmann::json::array();
  std::size_t train = 0;
  for (const auto& e : m.samples) {
    samples.push_back({{"id", e.sample_id},
                       {"pile_id", e.pile_id},
                       {"subset", e.subset},
                       {"input", e.input_path},
                       {"target", e.target_path},
                       {"grasps", e.grasps_path},
                       {"grasp_count", e.grasp_count},
                       {"no_grasp", e.no_grasp},
                       {"split", e.split}});
    if (e.split == "train") ++train;
  }
  nlohmann::json piles = nlohmann::json::array();
  for (int id : m.piles) {
    const std::string dir = "piles/" + pile_tag(id);
    piles.push_back({{"id", id}, {"pile", dir + "/pile.json"}, {"rgbd", dir + "/rgbd.gmt"}, {"masks", dir + "/masks.gmt"}});
  }
  return {{"schema", kDatasetSchema},
          {"seed", m.seed},
          {"config", m.config},
          {"constants", constants_block()},
          {"counts",
           {{"piles", m.piles.size()},
            {"samples", m.samples.size()},
            {"grasps", m.grasp_total()},
            {"no_grasp", m.no_grasp_total()},
            {"train", train},
            {"val", m.samples.size() - train}}},
          {"piles", std::move(piles)},
          {"samples", std::move(samples)}};
}

DatasetManifest manifest_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema").get<std::string>() != kDatasetSchema) throw IoError("unsupported dataset schema");
    DatasetManifest m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.config = j.value("config", nlohmann::json::object());
    for (const auto& p : j.at("piles")) m.piles.push_back(p.at("id").get<int>());
    for (const auto& s : j.at("samples")) {
      ManifestEntry e;
      e.sample_id = s.at("id").get<std::string>();
      e.pile_id = s.at("pile_id").get<int>();
      e.subset = s.at("subset").get<IdSet>();
      e.input_path = s.at("input").get<std::string>();
      e.target_path = s.at("target").get<std::string>();
      e.grasps_path = s.at("grasps").get<std::string>();
      e.grasp_count = s.at("grasp_count").get<std::size_t>();
      e.no_grasp = s.at("no_grasp").get<bool>();
      e.split = s.at("split").get<std::string>();
      m.samples.push_back(std::move(e));
    }
    const auto& counts = j.at("counts");
    if (counts.at("samples").get<std::size_t>() != m.samples.size() ||
        counts.at("piles").get<std::size_t>() != m.piles.size() ||
        counts.at("grasps").get<std::size_t>() != m.grasp_total())
      throw IoError("manifest counts inconsistent with entries");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed manifest: ") + e.what());
  }
}

DatasetManifest split(const DatasetManifest& m, double train_frac, std::uint64_t seed) {
  std::vector<int> piles = m.piles;
  for (const auto& e : m.samples)
    if (std::find(piles.begin(), piles.end(), e.pile_id) == piles.end()) piles.push_back(e.pile_id);
  std::sort(piles.begin(), piles.end());
  Rng rng(seed);
  for (std::size_t i = piles.size(); i > 1; --i) {
    const std::size_t j = rng.below(static_cast<std::uint32_t>(i));
    std::swap(piles[i - 1], piles[j]);
  }
  const auto n_train = static_cast<std::size_t>(std::llround(train_frac * static_cast<double>(piles.size())));
  std::vector<int> train(piles.begin(), piles.begin() + static_cast<std::ptrdiff_t>(std::min(n_train, piles.size())));
  DatasetManifest out = m;
  for (auto& e : out.samples)
    e.split = std::find(train.begin(), train.end(), e.pile_id) != train.end() ? "train" : "val";
  return out;
}

std::uint64_t pile_seed(std::uint64_t base, int pile_id) {
  return derive_seed(base, static_cast<std::uint64_t>(pile_id));
}

std::optional<int> default_subset_cap(int n_logs, std::optional<int> requested) {
  if (requested) return requested;
  if (n_logs > 5) return 4;
  return std::nullopt;
}

namespace {

nlohmann::json grasps_json(const SampleRecord& rec) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& a : rec.grasps) list.push_back({{"grasp", grasp_to_json(a.grasp)}, {"trial", trial_to_json(a.trial)}});
  return {{"sample_id", sample_id(rec.pile_id, rec.target_set)},
          {"pile_id", rec.pile_id},
          {"targets", rec.target_set},
          {"tau", rec.target_set.size()},
          {"no_grasp", rec.no_grasp},
          {"candidate_count", rec.candidate_count},
          {"grasps", std::move(list)}};
}

std::string sample_dir(const SampleRecord& rec) {
  return "samples/" + sample_id(rec.pile_id, rec.target_set);
}

}  // namespace

void write_sample(const fs::path& root, const SampleRecord& rec) {
  const fs::path dir = root / sample_dir(rec);
  const SampleInput& in = rec.input;
  write_gmt(dir / "input.gmt", stack_channels({&in.r, &in.g, &in.b, &in.depth, &in.mask}));
  write_gmt(dir / "target.gmt", graspmap_tensor(rec.target));
  write_text_atomic(dir / "grasps.json", grasps_json(rec).dump(1) + "\n");
}

SampleRecord read_sample(const fs::path& root, const ManifestEntry& e) {
  SampleRecord rec;
  rec.pile_id = e.pile_id;
  rec.target_set = e.subset;
  const Tensor in = read_gmt(root / e.input_path);
  if (in.dims.size() != 3 || in.dims[0] != 5) throw IoError(e.input_path + ": expected 5 x N x N input");
  rec.input.r = tensor_channel(in, 0);
  rec.input.g = tensor_channel(in, 1);
  rec.input.b = tensor_channel(in, 2);
  rec.input.depth = tensor_channel(in, 3);
  rec.input.mask = tensor_channel(in, 4);
  rec.target = graspmap_from_tensor(read_gmt(root / e.target_path));
  const nlohmann::json g = read_json(root / e.grasps_path);
  for (const auto& a : g.at("grasps"))
    rec.grasps.push_back({grasp_from_json(a.at("grasp")), trial_from_json(a.at("trial"))});
  rec.candidate_count = g.at("candidate_count").get<std::size_t>();
  rec.no_grasp = g.at("no_grasp").get<bool>();
  return rec;
}

GenSummary generate_dataset(const GenConfig& cfg) {
  if (cfg.n_piles < 1) throw std::invalid_argument("gen: --piles must be >= 1");
  if (cfg.n_logs < 1 || cfg.n_logs > 16) throw std::invalid_argument("gen: --logs must be in [1, 16]");
  const ImageGrid grid{cfg.resolution, cfg.pile.terrain.extent};
  const auto n_piles = static_cast<std::size_t>(cfg.n_piles);

  std::vector<Pile> piles(n_piles);
  std::vector<RenderResult> renders(n_piles);
  parallel_for(n_piles, cfg.threads, [&](std::size_t i) {
    const int id = static_cast<int>(i);
    piles[i] = generate_pile(cfg.n_logs, pile_seed(cfg.seed, id), cfg.pile);
    renders[i] = render(piles[i], grid);
    const fs::path dir = cfg.root / "piles" / pile_tag(id);
    write_text_atomic(dir / "pile.json", pile_to_json(piles[i]).dump(1) + "\n");
    write_gmt(dir / "rgbd.gmt", rgbd_tensor(renders[i].rgbd));
    write_gmt(dir / "masks.gmt", masks_tensor(renders[i].masks));
  });

  const auto subsets = enumerate_subsets(cfg.n_logs, default_subset_cap(cfg.n_logs, cfg.subset_cap));
  const std::size_t per_pile = subsets.size();
  std::vector<ManifestEntry> entries(n_piles * per_pile);
  parallel_for(entries.size(), cfg.threads, [&](std::size_t t) {
    const std::size_t pi = t / per_pile;
    const IdSet& subset = subsets[t % per_pile];
    const SampleRecord rec = build_sample(piles[pi], renders[pi], subset, grid, static_cast<int>(pi));
    write_sample(cfg.root, rec);
    ManifestEntry& e = entries[t];
    e.sample_id = sample_id(rec.pile_id, subset);
    e.pile_id = rec.pile_id;
    e.subset = subset;
    e.input_path = "samples/" + e.sample_id + "/input.gmt";
    e.target_path = "samples/" + e.sample_id + "/target.gmt";
    e.grasps_path = "samples/" + e.sample_id + "/grasps.json";
    e.grasp_count = rec.grasp_count();
    e.no_grasp = rec.no_grasp;
  });

  DatasetManifest m;
  m.seed = cfg.seed;
  for (int i = 0; i < cfg.n_piles; ++i) m.piles.push_back(i);
  m.samples = std::move(entries);
  m.config = {{"seed", cfg.seed},
              {"n_piles", cfg.n_piles},
              {"n_logs", cfg.n_logs},
              {"resolution", cfg.resolution},
              {"subset_cap", cfg.subset_cap ? nlohmann::json(*cfg.subset_cap) : nlohmann::json(nullptr)},
              {"train_frac", cfg.train_frac},
              {"yaw_spread", cfg.pile.yaw_spread}};
  m = split(m, cfg.train_frac, cfg.seed);
  write_text_atomic(cfg.root / "manifest.json", manifest_to_json(m).dump(1) + "\n");

  GenSummary s;
  s.piles = m.piles.size();
  s.samples = m.samples.size();
  s.grasps = m.grasp_total();
  s.no_grasp = m.no_grasp_total();
  return s;
}

std::vector<NamedPile> load_piles(const fs::path& root) {
  const DatasetManifest m = manifest_from_json(read_json(root / "manifest.json"));
  std::vector<NamedPile> out;
  for (int id : m.piles)
    out.push_back({id, pile_from_json(read_json(root / "piles" / pile_tag(id) / "pile.json"))});
  return out;
}

}  // namespace grasplog
