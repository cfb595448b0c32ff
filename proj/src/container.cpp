#include "mpc/container.hpp"

#include <cstring>
#include <fstream>

namespace mpc {
namespace {

constexpr char kMagic[5] = {'M', 'P', 'R', 'S', '1'};

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const uint8_t> b) : b_(b) {}

  std::span<const uint8_t> take(size_t n) {
    if (b_.size() - pos_ < n) throw FormatError("stream truncated");
    auto s = b_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  uint16_t u16() {
    auto s = take(2);
    return static_cast<uint16_t>(s[0] | (s[1] << 8));
  }

  uint32_t u32() {
    auto s = take(4);
    return static_cast<uint32_t>(s[0]) | (static_cast<uint32_t>(s[1]) << 8) |
           (static_cast<uint32_t>(s[2]) << 16) |
           (static_cast<uint32_t>(s[3]) << 24);
  }

 private:
  std::span<const uint8_t> b_;
  size_t pos_ = 0;
};

}  // namespace

std::vector<uint8_t> write_stream(const StreamHeader& header,
                                  std::span<const uint8_t> index_section,
                                  std::span<const uint8_t> payload) {
  std::vector<uint8_t> out;
  out.reserve(StreamHeader::kSize + 8 + index_section.size() + payload.size());
  out.insert(out.end(), kMagic, kMagic + 5);
  put_u16(out, header.version);
  put_u32(out, header.image_h);
  put_u32(out, header.image_w);
  out.push_back(static_cast<uint8_t>(header.planes));
  uint32_t delta_bits;
  static_assert(sizeof(delta_bits) == sizeof(header.delta));
  std::memcpy(&delta_bits, &header.delta, 4);
  put_u32(out, delta_bits);
  put_u16(out, header.c_l);
  put_u16(out, header.n_cdf);
  put_u32(out, static_cast<uint32_t>(header.y_min));
  put_u32(out, static_cast<uint32_t>(header.y_max));
  out.insert(out.end(), header.model_hash.begin(), header.model_hash.end());
  if (out.size() != StreamHeader::kSize) {
    throw FormatError("internal header layout error");
  }
  put_u32(out, static_cast<uint32_t>(index_section.size()));
  out.insert(out.end(), index_section.begin(), index_section.end());
  put_u32(out, static_cast<uint32_t>(payload.size()));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

ParsedStream read_stream(std::span<const uint8_t> bytes) {
  Reader r(bytes);
  auto magic = r.take(5);
  if (std::memcmp(magic.data(), kMagic, 5) != 0) {
    throw FormatError("bad magic: not a coded latent stream");
  }
  ParsedStream out;
  StreamHeader& h = out.header;
  h.version = r.u16();
  if (h.version != StreamHeader::kVersion) {
    throw FormatError("unsupported stream version " +
                      std::to_string(h.version));
  }
  h.image_h = r.u32();
  h.image_w = r.u32();
  uint8_t planes = r.take(1)[0];
  if (planes > 1) throw FormatError("unknown plane policy");
  h.planes = static_cast<PlanePolicy>(planes);
  uint32_t delta_bits = r.u32();
  std::memcpy(&h.delta, &delta_bits, 4);
  h.c_l = r.u16();
  h.n_cdf = r.u16();
  h.y_min = static_cast<int32_t>(r.u32());
  h.y_max = static_cast<int32_t>(r.u32());
  auto hash = r.take(32);
  std::copy(hash.begin(), hash.end(), h.model_hash.begin());

  uint32_t index_len = r.u32();
  auto index_bytes = r.take(index_len);
  out.index_section.assign(index_bytes.begin(), index_bytes.end());
  uint32_t payload_len = r.u32();
  auto payload_bytes = r.take(payload_len);
  out.payload.assign(payload_bytes.begin(), payload_bytes.end());
  return out;
}

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw FormatError("cannot open " + path);
  std::streamsize n = in.tellg();
  in.seekg(0);
  std::vector<uint8_t> bytes(static_cast<size_t>(n));
  in.read(reinterpret_cast<char*>(bytes.data()), n);
  if (in.gcount() != n) throw FormatError("short read: " + path);
  return bytes;
}

void write_file(const std::string& path, std::span<const uint8_t> bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + tmp);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw FormatError("cannot move " + tmp + " to " + path);
  }
}

}  // namespace mpc
