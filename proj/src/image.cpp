#include "mpc/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "mpc/container.hpp"

namespace mpc {
namespace {

// Skips PNM whitespace and # comments, then reads one unsigned integer.
int read_pnm_int(std::istream& in) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  if (c == EOF || !std::isdigit(c)) {
    throw FormatError("malformed PNM header");
  }
  int value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    if (value > 1 << 30) throw FormatError("PNM header value too large");
    c = in.get();
  }
  return value;
}

}  // namespace

ImageF read_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  int planes;
  if (m0 == 'P' && m1 == '5') {
    planes = 1;
  } else if (m0 == 'P' && m1 == '6') {
    planes = 3;
  } else {
    throw FormatError(path + ": not a binary PGM/PPM file");
  }
  int w = read_pnm_int(in);
  int h = read_pnm_int(in);
  int maxval = read_pnm_int(in);
  if (maxval != 255) {
    throw FormatError(path + ": only maxval 255 is supported");
  }
  if (w <= 0 || h <= 0) throw FormatError(path + ": empty image");

  std::vector<uint8_t> raw(static_cast<size_t>(w) * h * planes);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (static_cast<size_t>(in.gcount()) != raw.size()) {
    throw FormatError(path + ": truncated pixel data");
  }

  ImageF img(h, w, planes);
  // PNM interleaves samples; planes are stored separately here.
  size_t pos = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int p = 0; p < planes; ++p) {
        img.at(p, y, x) = static_cast<float>(raw[pos++]) / 255.0f;
      }
    }
  }
  return img;
}

void write_pnm(const std::string& path, const ImageF& img) {
  if (img.planes != 1 && img.planes != 3) {
    throw UsageError("PNM output needs 1 or 3 planes");
  }
  std::string head = std::string(img.planes == 1 ? "P5" : "P6") + "\n" +
                     std::to_string(img.w) + " " + std::to_string(img.h) +
                     "\n255\n";
  std::vector<uint8_t> raw(head.begin(), head.end());
  raw.reserve(raw.size() + static_cast<size_t>(img.w) * img.h * img.planes);
  for (int y = 0; y < img.h; ++y) {
    for (int x = 0; x < img.w; ++x) {
      for (int p = 0; p < img.planes; ++p) {
        float v = std::clamp(img.at(p, y, x), 0.0f, 1.0f);
        raw.push_back(static_cast<uint8_t>(std::lround(v * 255.0f)));
      }
    }
  }
  write_file(path, raw);
}

ImageF to_luma(const ImageF& img) {
  if (img.planes == 1) return img;
  if (img.planes != 3) throw UsageError("luma conversion needs 3 planes");
  ImageF out(img.h, img.w, 1);
  for (int y = 0; y < img.h; ++y) {
    for (int x = 0; x < img.w; ++x) {
      out.at(0, y, x) = 0.299f * img.at(0, y, x) + 0.587f * img.at(1, y, x) +
                        0.114f * img.at(2, y, x);
    }
  }
  return out;
}

}  // namespace mpc
