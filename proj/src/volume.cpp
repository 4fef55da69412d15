#include "porogen/volume.hpp"

#include <fstream>

#include "json.hpp"

namespace porogen {

namespace {

using nlohmann::json;

void validate_phase_bytes(const std::vector<std::uint8_t>& data,
                          const char* origin) {
  for (std::size_t i = 0; i < data.size(); ++i)
    if (data[i] > 1)
      throw PhaseValueError(std::string(origin) + ": illegal phase byte " +
                            std::to_string(int(data[i])) + " at offset " +
                            std::to_string(i));
}

std::filesystem::path base_path(const std::filesystem::path& path) {
  auto ext = path.extension();
  if (ext == ".json" || ext == ".raw") {
    auto p = path;
    p.replace_extension();
    return p;
  }
  return path;
}

void write_file_atomic(const std::filesystem::path& path,
                       const void* bytes, std::size_t count) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw VolumeIoError("cannot open " + tmp.string() +
                                  " for writing");
    out.write(static_cast<const char*>(bytes),
              static_cast<std::streamsize>(count));
    if (!out) throw VolumeIoError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

VoxelVolume::VoxelVolume(Dims3 dims, double voxel_size_um,
                         std::vector<std::uint8_t> data)
    : dims_(dims), voxel_size_um_(voxel_size_um), data_(std::move(data)) {
  if (dims_.nx < 1 || dims_.ny < 1 || dims_.nz < 1)
    throw std::invalid_argument("volume dims must be >= 1");
  if (!(voxel_size_um_ > 0.0))
    throw std::invalid_argument("voxel size must be positive");
  if (static_cast<std::int64_t>(data_.size()) != dims_.count())
    throw std::invalid_argument("volume data length does not match dims");
  validate_phase_bytes(data_, "volume");
}

VoxelVolume VoxelVolume::filled(Dims3 dims, Phase phase, double voxel_size_um) {
  return VoxelVolume(
      dims, voxel_size_um,
      std::vector<std::uint8_t>(static_cast<std::size_t>(dims.count()),
                                phase_byte(phase)));
}

Slice2D::Slice2D(int nx_, int ny_, std::vector<std::uint8_t> data_)
    : nx(nx_), ny(ny_), data(std::move(data_)) {
  if (nx < 1 || ny < 1)
    throw std::invalid_argument("slice dims must be >= 1");
  if (data.size() != static_cast<std::size_t>(nx) * ny)
    throw std::invalid_argument("slice data length does not match dims");
  validate_phase_bytes(data, "slice");
}

std::string header_to_json(const VolumeHeader& h) {
  json j;
  j["format"] = h.format_version;
  j["dims"] = {h.dims.nx, h.dims.ny, h.dims.nz};
  j["voxel_size_um"] = h.voxel_size_um;
  j["order"] = "x-fastest";
  j["phases"] = {{"0", "void"}, {"1", "solid"}};
  return j.dump(2) + "\n";
}

VolumeHeader header_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw HeaderError(std::string("malformed header: ") + e.what());
  }
  VolumeHeader h;
  try {
    if (j.at("format").get<std::string>() != "PGV1")
      throw HeaderError("malformed header: unsupported format");
    auto dims = j.at("dims");
    if (!dims.is_array() || dims.size() != 3)
      throw HeaderError("malformed header: dims must be a 3-array");
    h.dims = {dims[0].get<int>(), dims[1].get<int>(), dims[2].get<int>()};
    if (h.dims.nx < 1 || h.dims.ny < 1 || h.dims.nz < 1)
      throw HeaderError("malformed header: dims must be >= 1");
    h.voxel_size_um = j.at("voxel_size_um").get<double>();
    if (!(h.voxel_size_um > 0.0))
      throw HeaderError("malformed header: voxel_size_um must be positive");
    if (j.at("order").get<std::string>() != "x-fastest")
      throw HeaderError("malformed header: unsupported storage order");
    auto phases = j.at("phases");
    if (phases.at("0").get<std::string>() != "void" ||
        phases.at("1").get<std::string>() != "solid")
      throw HeaderError("malformed header: unsupported phase encoding");
  } catch (const json::exception& e) {
    throw HeaderError(std::string("malformed header: ") + e.what());
  }
  return h;
}

void volume_io_save(const VoxelVolume& vol,
                    const std::filesystem::path& path) {
  const auto base = base_path(path);
  if (base.has_parent_path())
    std::filesystem::create_directories(base.parent_path());

  VolumeHeader h;
  h.dims = vol.dims();
  h.voxel_size_um = vol.voxel_size_um();
  const std::string header = header_to_json(h);

  auto json_path = base;
  json_path += ".json";
  auto raw_path = base;
  raw_path += ".raw";
  write_file_atomic(json_path, header.data(), header.size());
  write_file_atomic(raw_path, vol.data().data(), vol.data().size());
}

VoxelVolume volume_io_load(const std::filesystem::path& path) {
  const auto base = base_path(path);
  auto json_path = base;
  json_path += ".json";
  auto raw_path = base;
  raw_path += ".raw";

  if (!std::filesystem::exists(json_path))
    throw FileMissingError("missing header file " + json_path.string());
  std::ifstream hin(json_path, std::ios::binary);
  if (!hin) throw VolumeIoError("cannot read " + json_path.string());
  std::string header_text((std::istreambuf_iterator<char>(hin)),
                          std::istreambuf_iterator<char>());
  const VolumeHeader h = header_from_json(header_text);

  if (!std::filesystem::exists(raw_path))
    throw FileMissingError("missing payload file " + raw_path.string());
  std::ifstream rin(raw_path, std::ios::binary);
  if (!rin) throw VolumeIoError("cannot read " + raw_path.string());
  std::vector<std::uint8_t> payload(
      (std::istreambuf_iterator<char>(rin)), std::istreambuf_iterator<char>());

  if (static_cast<std::int64_t>(payload.size()) != h.dims.count())
    throw PayloadSizeError(
        "payload length " + std::to_string(payload.size()) +
        " does not match dims (" + std::to_string(h.dims.count()) +
        " voxels) in " + raw_path.string());
  validate_phase_bytes(payload, raw_path.string().c_str());
  return VoxelVolume(h.dims, h.voxel_size_um, std::move(payload));
}

VoxelVolume extract_subvolume(const VoxelVolume& vol,
                              std::array<int, 3> origin, int size) {
  const auto& d = vol.dims();
  if (size < 1) throw std::out_of_range("subvolume size must be >= 1");
  if (origin[0] < 0 || origin[1] < 0 || origin[2] < 0 ||
      origin[0] + size > d.nx || origin[1] + size > d.ny ||
      origin[2] + size > d.nz)
    throw std::out_of_range("subvolume window exceeds volume bounds");

  std::vector<std::uint8_t> out(static_cast<std::size_t>(size) * size * size);
  const std::uint8_t* src = vol.data().data();
  std::uint8_t* dst = out.data();
  for (int z = 0; z < size; ++z)
    for (int y = 0; y < size; ++y) {
      const std::uint8_t* row =
          src + vol.index(origin[0], origin[1] + y, origin[2] + z);
      std::copy_n(row, size, dst);
      dst += size;
    }
  return VoxelVolume({size, size, size}, vol.voxel_size_um(), std::move(out));
}

std::array<int, 3> draw_subvolume_origin(const VoxelVolume& vol, int size,
                                         CounterRng& rng) {
  const auto& d = vol.dims();
  if (size < 1 || size > d.min_extent())
    throw std::out_of_range("subvolume size exceeds volume");
  const int ox = static_cast<int>(rng.next_below(d.nx - size + 1));
  const int oy = static_cast<int>(rng.next_below(d.ny - size + 1));
  const int oz = static_cast<int>(rng.next_below(d.nz - size + 1));
  return {ox, oy, oz};
}

std::vector<std::array<int, 3>> sample_subvolume_origins(
    const VoxelVolume& vol, int size, int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample count must be >= 1");
  CounterRng rng(seed);
  std::vector<std::array<int, 3>> origins;
  origins.reserve(count);
  for (int i = 0; i < count; ++i)
    origins.push_back(draw_subvolume_origin(vol, size, rng));
  return origins;
}

std::vector<VoxelVolume> sample_random_subvolumes(const VoxelVolume& vol,
                                                  int size, int count,
                                                  std::uint64_t seed) {
  auto origins = sample_subvolume_origins(vol, size, count, seed);
  std::vector<VoxelVolume> out;
  out.reserve(origins.size());
  for (const auto& o : origins) out.push_back(extract_subvolume(vol, o, size));
  return out;
}

int central_slice_index(int nz) { return nz / 2; }

Slice2D central_slice(const VoxelVolume& vol) {
  const auto& d = vol.dims();
  const int z = central_slice_index(d.nz);
  // Plane z is one contiguous block in x-fastest order.
  const std::uint8_t* src = vol.data().data() + vol.index(0, 0, z);
  return Slice2D(d.nx, d.ny,
                 std::vector<std::uint8_t>(
                     src, src + static_cast<std::size_t>(d.nx) * d.ny));
}

VoxelVolume binarize(const ad::Tensor& raw, double threshold,
                     double voxel_size_um) {
  const auto& s = raw.shape();
  if (s.size() != 3)
    throw std::invalid_argument("binarize: expected a 3D tensor");
  // Tensor [D,H,W] (W fastest) maps onto dims (nx=W, ny=H, nz=D) with the
  // identical linear layout.
  auto v = raw.values();
  std::vector<std::uint8_t> data(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    data[i] = v[i] > threshold ? phase_byte(Phase::Solid)
                               : phase_byte(Phase::Void);
  return VoxelVolume({s[2], s[1], s[0]}, voxel_size_um, std::move(data));
}

}  // namespace porogen
