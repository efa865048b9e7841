#include "grasplog/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace grasplog {

namespace fs = std::filesystem;

std::size_t Tensor::count() const noexcept {
  std::size_t n = 1;
  for (std::uint32_t d : dims) n *= d;
  return n;
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

std::vector<std::uint8_t> to_gmt_bytes(const Tensor& t) {
  if (t.dims.size() > 255) throw IoError("GMT1: too many dimensions");
  const std::size_t n = t.count();
  if ((t.dtype == DType::F32 && t.f32.size() != n) || (t.dtype == DType::U8 && t.u8.size() != n))
    throw IoError("GMT1: payload does not match dims");
  std::vector<std::uint8_t> out{'G', 'M', 'T', '1', static_cast<std::uint8_t>(t.dtype),
                                static_cast<std::uint8_t>(t.dims.size())};
  for (std::uint32_t d : t.dims) put_u32(out, d);
  if (t.dtype == DType::F32) {
    out.reserve(out.size() + 4 * n);
    for (float f : t.f32) put_u32(out, std::bit_cast<std::uint32_t>(f));
  } else {
    out.insert(out.end(), t.u8.begin(), t.u8.end());
  }
  return out;
}

Tensor from_gmt_bytes(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 6 || std::memcmp(bytes.data(), "GMT1", 4) != 0)
    throw IoError("GMT1: bad magic");
  Tensor t;
  if (bytes[4] > 1) throw IoError("GMT1: unknown dtype code");
  t.dtype = static_cast<DType>(bytes[4]);
  const std::size_t ndim = bytes[5];
  std::size_t pos = 6;
  if (bytes.size() < pos + 4 * ndim) throw IoError("GMT1: truncated header");
  for (std::size_t i = 0; i < ndim; ++i, pos += 4) t.dims.push_back(get_u32(&bytes[pos]));
  const std::size_t n = t.count();
  const std::size_t width = t.dtype == DType::F32 ? 4 : 1;
  if (bytes.size() != pos + width * n) throw IoError("GMT1: payload size mismatch");
  if (t.dtype == DType::F32) {
    t.f32.resize(n);
    for (std::size_t i = 0; i < n; ++i, pos += 4)
      t.f32[i] = std::bit_cast<float>(get_u32(&bytes[pos]));
  } else {
    t.u8.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  }
  return t;
}

namespace {

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

}  // namespace

Tensor read_gmt(const fs::path& path) {
  try {
    return from_gmt_bytes(read_bytes(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_gmt(const fs::path& path, const Tensor& t) { write_file_atomic(path, to_gmt_bytes(t)); }

void write_file_atomic(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  write_file_atomic(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::string read_text(const fs::path& path) {
  const auto bytes = read_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

nlohmann::json read_json(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

Tensor stack_channels(const std::vector<const FloatImage*>& channels) {
  Tensor t;
  if (channels.empty()) throw std::invalid_argument("stack_channels: no channels");
  const std::size_t rows = channels.front()->rows();
  const std::size_t cols = channels.front()->cols();
  t.dims = {static_cast<std::uint32_t>(channels.size()), static_cast<std::uint32_t>(rows),
            static_cast<std::uint32_t>(cols)};
  t.f32.reserve(channels.size() * rows * cols);
  for (const FloatImage* c : channels) {
    if (c->rows() != rows || c->cols() != cols) throw std::invalid_argument("stack_channels: shape mismatch");
    t.f32.insert(t.f32.end(), c->values().begin(), c->values().end());
  }
  return t;
}

Tensor rgbd_tensor(const RgbdImage& img) {
  return stack_channels({&img.r, &img.g, &img.b, &img.depth});
}

Tensor masks_tensor(const InstanceMasks& masks) {
  Tensor t;
  t.dtype = DType::U8;
  const std::size_t n = masks.masks.empty() ? 0 : masks.masks.front().rows();
  t.dims = {static_cast<std::uint32_t>(masks.masks.size()), static_cast<std::uint32_t>(n),
            static_cast<std::uint32_t>(n)};
  for (const Mask& m : masks.masks) t.u8.insert(t.u8.end(), m.values().begin(), m.values().end());
  return t;
}

Tensor graspmap_tensor(const GraspMap& m) { return stack_channels({&m.c, &m.s, &m.w, &m.u, &m.b}); }

FloatImage tensor_channel(const Tensor& t, std::size_t channel) {
  if (t.dtype != DType::F32 || t.dims.size() != 3 || channel >= t.dims[0])
    throw IoError("tensor_channel: expected C x H x W f32 tensor");
  FloatImage out(t.dims[1], t.dims[2]);
  const std::size_t plane = out.size();
  std::copy_n(t.f32.begin() + static_cast<std::ptrdiff_t>(channel * plane), plane, out.values().begin());
  return out;
}

GraspMap graspmap_from_tensor(const Tensor& t) {
  if (t.dtype != DType::F32 || t.dims.size() != 3 || t.dims[0] != 5 || t.dims[1] != t.dims[2])
    throw IoError("grasp map tensor must be 5 x N x N f32");
  GraspMap m;
  m.c = tensor_channel(t, 0);
  m.s = tensor_channel(t, 1);
  m.w = tensor_channel(t, 2);
  m.u = tensor_channel(t, 3);
  m.b = tensor_channel(t, 4);
  auto clamp = [](FloatImage& img, float lo, float hi) {
    for (float& v : img.values()) v = std::isnan(v) ? lo : std::clamp(v, lo, hi);
  };
  clamp(m.c, -1.0f, 1.0f);
  clamp(m.s, -1.0f, 1.0f);
  clamp(m.w, 0.30f, 1.55f);
  clamp(m.u, 0.0f, 1.0f);
  clamp(m.b, 0.0f, 1.0f);
  return m;
}

nlohmann::json pile_to_json(const Pile& pile) {
  nlohmann::json logs = nlohmann::json::array();
  for (const Log& l : pile.logs) {
    logs.push_back({{"id", l.id},
                    {"center", {l.center.x, l.center.y}},
                    {"yaw", l.yaw},
                    {"tilt", l.tilt},
                    {"z_center", l.z_center},
                    {"length", l.length},
                    {"diameter", l.diameter},
                    {"density", l.density}});
  }
  const TerrainParams& tp = pile.terrain->params();
  return {{"schema", kPileSchema},
          {"seed", pile.seed},
          {"heightfield",
           {{"seed", tp.seed},
            {"octaves", tp.octaves},
            {"amplitude", tp.amplitude},
            {"scale", tp.scale},
            {"extent", tp.extent},
            {"resolution", tp.resolution}}},
          {"logs", std::move(logs)}};
}

Pile pile_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema").get<std::string>() != kPileSchema) throw IoError("unsupported pile schema");
    Pile pile;
    pile.seed = j.at("seed").get<std::uint64_t>();
    const auto& h = j.at("heightfield");
    TerrainParams tp;
    tp.seed = h.at("seed").get<std::uint64_t>();
    tp.octaves = h.at("octaves").get<int>();
    tp.amplitude = h.at("amplitude").get<double>();
    tp.scale = h.at("scale").get<double>();
    tp.extent = h.at("extent").get<double>();
    tp.resolution = h.at("resolution").get<std::size_t>();
    pile.terrain = std::make_shared<const Heightfield>(tp);
    for (const auto& lj : j.at("logs")) {
      Log l;
      l.id = lj.at("id").get<int>();
      l.center = {lj.at("center").at(0).get<double>(), lj.at("center").at(1).get<double>()};
      l.yaw = lj.at("yaw").get<double>();
      l.tilt = lj.at("tilt").get<double>();
      l.z_center = lj.at("z_center").get<double>();
      l.length = lj.at("length").get<double>();
      l.diameter = lj.at("diameter").get<double>();
      l.density = lj.at("density").get<double>();
      pile.logs.push_back(l);
    }
    return pile;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed pile: ") + e.what());
  }
}

nlohmann::json grasp_to_json(const Grasp& g) {
  return {{"x", g.x}, {"y", g.y}, {"phi", g.phi}, {"w", g.w}, {"tau", g.tau}};
}

Grasp grasp_from_json(const nlohmann::json& j) {
  Grasp g;
  g.x = j.at("x").get<double>();
  g.y = j.at("y").get<double>();
  g.phi = j.at("phi").get<double>();
  g.w = j.at("w").get<double>();
  g.tau = j.at("tau").get<int>();
  return g;
}

nlohmann::json trial_to_json(const TrialResult& r) {
  nlohmann::json j{{"success", r.success},
                   {"captured", r.captured},
                   {"failure_reason", to_string(r.failure_reason)}};
  if (r.success) {
    j["beta"] = r.beta;
    j["b"] = r.b;
  }
  return j;
}

TrialResult trial_from_json(const nlohmann::json& j) {
  TrialResult r;
  r.success = j.at("success").get<bool>();
  r.captured = j.at("captured").get<IdSet>();
  r.failure_reason = failure_reason_from_string(j.at("failure_reason").get<std::string>());
  if (r.success) {
    r.beta = j.at("beta").get<double>();
    r.b = j.at("b").get<double>();
  }
  return r;
}

}  // namespace grasplog
