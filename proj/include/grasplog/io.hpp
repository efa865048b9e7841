#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "grasplog/errors.hpp"
#include "grasplog/graspmap.hpp"
#include "grasplog/planner.hpp"
#include "grasplog/render.hpp"
#include "grasplog/scene.hpp"

namespace grasplog {

enum class DType : std::uint8_t { F32 = 0, U8 = 1 };

/// Dense little-endian tensor as stored in GMT1 files.
struct Tensor {
  DType dtype = DType::F32;
  std::vector<std::uint32_t> dims;
  std::vector<float> f32;
  std::vector<std::uint8_t> u8;

  std::size_t count() const noexcept;
  bool operator==(const Tensor&) const = default;
};

/// GMT1 layout: "GMT1", u8 dtype, u8 ndim, ndim x u32 dims, payload (all LE).
std::vector<std::uint8_t> to_gmt_bytes(const Tensor& t);
Tensor from_gmt_bytes(const std::vector<std::uint8_t>& bytes);
Tensor read_gmt(const std::filesystem::path& path);
void write_gmt(const std::filesystem::path& path, const Tensor& t);

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

Tensor stack_channels(const std::vector<const FloatImage*>& channels);
Tensor rgbd_tensor(const RgbdImage& img);
Tensor masks_tensor(const InstanceMasks& masks);
Tensor graspmap_tensor(const GraspMap& m);
/// Clamps values into channel ranges. Throws IoError unless dims are 5 x N x N f32.
GraspMap graspmap_from_tensor(const Tensor& t);
FloatImage tensor_channel(const Tensor& t, std::size_t channel);

inline constexpr const char* kPileSchema = "grasplog-pile-v1";

nlohmann::json pile_to_json(const Pile& pile);
/// Throws IoError on schema mismatch or missing fields.
Pile pile_from_json(const nlohmann::json& j);

nlohmann::json grasp_to_json(const Grasp& g);
Grasp grasp_from_json(const nlohmann::json& j);
nlohmann::json trial_to_json(const TrialResult& r);
TrialResult trial_from_json(const nlohmann::json& j);

}  // namespace grasplog
