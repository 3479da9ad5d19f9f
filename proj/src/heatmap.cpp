#include "linefit/heatmap.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace linefit {

namespace {

constexpr char kMagic[4] = {'H', 'V', 'A', 'H'};
constexpr uint8_t kVersion = 1;
// Rejects absurd headers before the payload allocation.
constexpr uint64_t kMaxValues = uint64_t{1} << 32;

void put_u32le(std::ostream& out, uint32_t v) {
  const char bytes[4] = {
      static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
      static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

uint32_t get_u32le(std::istream& in, const char* what) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4))
    throw_error(Errc::TruncatedStream, std::string("stream ends inside ") + what);
  return static_cast<uint32_t>(bytes[0]) | (static_cast<uint32_t>(bytes[1]) << 8) |
         (static_cast<uint32_t>(bytes[2]) << 16) |
         (static_cast<uint32_t>(bytes[3]) << 24);
}

}  // namespace

Heatmap read_hvah(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4))
    throw_error(Errc::TruncatedStream, "stream ends inside magic");
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw_error(Errc::BadMagic, "not an HVAH stream");
  char version;
  if (!in.read(&version, 1))
    throw_error(Errc::TruncatedStream, "stream ends inside version");
  if (static_cast<uint8_t>(version) != kVersion)
    throw_error(Errc::BadMagic,
                "unsupported HVAH version " + std::to_string(version));

  Heatmap h;
  h.width = get_u32le(in, "width");
  h.height = get_u32le(in, "height");
  h.channels = get_u32le(in, "channels");
  h.scale = get_u32le(in, "scale");
  if (h.width == 0 || h.height == 0 || h.channels == 0 || h.scale == 0)
    throw_error(Errc::BadDimensions, "zero dimension in HVAH header");

  const uint64_t count =
      static_cast<uint64_t>(h.width) * h.height * h.channels;
  if (count > kMaxValues)
    throw_error(Errc::BadDimensions, "HVAH dimensions overflow");

  h.values.resize(count);
  for (uint64_t i = 0; i < count; ++i) {
    const uint32_t bits = get_u32le(in, "payload");
    const float v = std::bit_cast<float>(bits);
    if (!(v >= 0.0f && v <= 1.0f))
      throw_error(Errc::ValueOutOfRange,
                  "heatmap value outside [0,1] at index " + std::to_string(i));
    h.values[i] = v;
  }
  return h;
}

void write_hvah(const Heatmap& h, std::ostream& out) {
  if (h.width == 0 || h.height == 0 || h.channels == 0 || h.scale == 0)
    throw_error(Errc::BadDimensions, "refusing to write zero-sized heatmap");
  out.write(kMagic, 4);
  const char version = static_cast<char>(kVersion);
  out.write(&version, 1);
  put_u32le(out, h.width);
  put_u32le(out, h.height);
  put_u32le(out, h.channels);
  put_u32le(out, h.scale);
  for (const float v : h.values) put_u32le(out, std::bit_cast<uint32_t>(v));
  if (!out) throw_error(Errc::IoFailure, "write to HVAH stream failed");
}

Heatmap read_hvah_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw_error(Errc::IoFailure, "cannot open " + path.string());
  return read_hvah(in);
}

void write_hvah_file(const Heatmap& h, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw_error(Errc::IoFailure, "cannot create " + path.string());
  write_hvah(h, out);
}

void export_pgm(const Heatmap& h, uint32_t channel, std::ostream& out) {
  if (channel >= h.channels)
    throw_error(Errc::ChannelOutOfRange,
                "channel " + std::to_string(channel) + " of " +
                    std::to_string(h.channels));
  out << "P5\n" << h.width << " " << h.height << "\n255\n";
  const size_t base = channel * h.plane_size();
  for (size_t i = 0; i < h.plane_size(); ++i) {
    const auto byte =
        static_cast<unsigned char>(std::llround(h.values[base + i] * 255.0));
    out.put(static_cast<char>(byte));
  }
  if (!out) throw_error(Errc::IoFailure, "write to PGM stream failed");
}

}  // namespace linefit
