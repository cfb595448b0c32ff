#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mpc/errors.hpp"

namespace mpc {

// Plane-major float image with values in [0, 1]; 8-bit pixels map to v / 255.
struct ImageF {
  int h = 0;
  int w = 0;
  int planes = 1;
  std::vector<float> v;

  ImageF() = default;
  ImageF(int height, int width, int nplanes)
      : h(height), w(width), planes(nplanes),
        v(static_cast<size_t>(height) * width * nplanes, 0.0f) {}

  float& at(int p, int y, int x) {
    return v[(static_cast<size_t>(p) * h + y) * w + x];
  }
  float at(int p, int y, int x) const {
    return v[(static_cast<size_t>(p) * h + y) * w + x];
  }

  const float* plane(int p) const {
    return v.data() + static_cast<size_t>(p) * h * w;
  }
  float* plane(int p) { return v.data() + static_cast<size_t>(p) * h * w; }
};

// Binary PGM (P5, one plane) or PPM (P6, three planes), maxval 255 only.
ImageF read_pnm(const std::string& path);
void write_pnm(const std::string& path, const ImageF& img);

// Rec. 601 weights on a 3-plane image; passes 1-plane input through.
ImageF to_luma(const ImageF& img);

}  // namespace mpc
