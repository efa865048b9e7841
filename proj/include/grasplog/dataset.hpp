#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "grasplog/graspmap.hpp"
#include "grasplog/planner.hpp"
#include "grasplog/render.hpp"
#include "grasplog/scene.hpp"

namespace grasplog {

/// Non-empty subsets of `ids`, by size then lexicographically; sizes above
/// `max_tau` are skipped when given.
std::vector<IdSet> enumerate_subsets(const std::vector<int>& ids, std::optional<int> max_tau = {});
/// Same over ids 0..n_logs-1.
std::vector<IdSet> enumerate_subsets(int n_logs, std::optional<int> max_tau = {});

/// Network input channels R, G, B, D, M_T.
struct SampleInput {
  FloatImage r, g, b, depth, mask;
  bool operator==(const SampleInput&) const = default;
};

struct SampleRecord {
  int pile_id = 0;
  IdSet target_set;
  SampleInput input;
  GraspMap target;
  std::vector<AnnotatedGrasp> grasps;
  std::size_t candidate_count = 0;
  bool no_grasp = true;

  std::size_t grasp_count() const noexcept { return grasps.size(); }
};

std::string subset_tag(const IdSet& s);
std::string sample_id(int pile_id, const IdSet& subset);
std::string pile_tag(int pile_id);

/// Candidates, footprint-verified reduction, ready for encoding.
std::vector<AnnotatedGrasp> annotate(const Pile& pile, const IdSet& targets, const ImageGrid& grid,
                                     std::size_t* candidate_count = nullptr);

SampleInput make_input(const RenderResult& rendered, const IdSet& targets);

/// render -> candidates -> reduction -> encoding. `rendered` must belong to `pile`.
SampleRecord build_sample(const Pile& pile, const RenderResult& rendered, const IdSet& targets,
                          const ImageGrid& grid, int pile_id = 0);

enum class Augment { Rot90, Rot180, Rot270, FlipH, FlipV };
std::string_view to_string(Augment a) noexcept;

/// Spatial transform of all ten channels; (C, S) follow the orientation
/// change on grasp pixels.
SampleRecord augment(const SampleRecord& rec, Augment op);

struct ManifestEntry {
  std::string sample_id;
  int pile_id = 0;
  IdSet subset;
  std::string input_path;   // relative to the dataset root
  std::string target_path;
  std::string grasps_path;
  std::size_t grasp_count = 0;
  bool no_grasp = true;
  std::string split = "train";
};

inline constexpr const char* kDatasetSchema = "grasplog-ds-v1";

struct DatasetManifest {
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  std::vector<int> piles;
  std::vector<ManifestEntry> samples;

  std::size_t grasp_total() const noexcept;
  std::size_t no_grasp_total() const noexcept;
};

/// Declared model constants, echoed into every manifest.
nlohmann::json constants_block();

nlohmann::json manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const nlohmann::json& j);

/// Tags samples by pile: a seeded shuffle of pile ids, the first
/// round(train_frac * piles) of them train, the rest val.
DatasetManifest split(const DatasetManifest& m, double train_frac = 0.8, std::uint64_t seed = 0);

struct GenConfig {
  std::filesystem::path root;
  int n_piles = 1;
  int n_logs = 4;
  std::uint64_t seed = 7;
  std::size_t resolution = 256;
  std::optional<int> subset_cap;  // defaults to 4 for piles above 5 logs
  unsigned threads = 1;
  double train_frac = 0.8;
  PileParams pile;
};

struct GenSummary {
  std::size_t piles = 0;
  std::size_t samples = 0;
  std::size_t grasps = 0;
  std::size_t no_grasp = 0;
};

std::uint64_t pile_seed(std::uint64_t base, int pile_id);
std::optional<int> default_subset_cap(int n_logs, std::optional<int> requested = {});

/// Writes the full dataset tree. Output is independent of `threads`.
GenSummary generate_dataset(const GenConfig& cfg);

void write_sample(const std::filesystem::path& root, const SampleRecord& rec);
/// Loads input, target and annotations of one sample directory.
SampleRecord read_sample(const std::filesystem::path& root, const ManifestEntry& e);

struct NamedPile {
  int id = 0;
  Pile pile;
};

/// Piles of a dataset root, in manifest order.
std::vector<NamedPile> load_piles(const std::filesystem::path& root);

}  // namespace grasplog
