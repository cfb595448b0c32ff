#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>

#include "mpc/errors.hpp"
#include "mpc/image.hpp"
#include "mpc/latent.hpp"

namespace mpc {

inline constexpr int kBlock = 16;

enum class PlanePolicy : uint8_t { kLuma = 0, kPlanes = 1 };

template <typename Scalar>
using BlockMatrix = Eigen::Matrix<Scalar, kBlock, kBlock>;

// Orthonormal DCT-II basis: row u is c_u * cos((2x+1) u pi / 32) with
// c_0 = sqrt(1/16) and c_u = sqrt(2/16) otherwise.
template <typename Scalar>
const BlockMatrix<Scalar>& dct_matrix() {
  static const BlockMatrix<Scalar> m = [] {
    BlockMatrix<Scalar> d;
    const double pi = 3.14159265358979323846;
    for (int u = 0; u < kBlock; ++u) {
      double c = std::sqrt((u == 0 ? 1.0 : 2.0) / kBlock);
      for (int x = 0; x < kBlock; ++x) {
        d(u, x) =
            static_cast<Scalar>(c * std::cos((2 * x + 1) * u * pi / (2 * kBlock)));
      }
    }
    return d;
  }();
  return m;
}

template <typename Scalar>
BlockMatrix<Scalar> block_dct(const BlockMatrix<Scalar>& pixels) {
  const auto& d = dct_matrix<Scalar>();
  return d * pixels * d.transpose();
}

template <typename Scalar>
BlockMatrix<Scalar> block_idct(const BlockMatrix<Scalar>& coef) {
  const auto& d = dct_matrix<Scalar>();
  return d.transpose() * coef * d;
}

inline int latent_extent(int pixels) { return (pixels + kBlock - 1) / kBlock; }

// 16x16 block DCT of one plane.  Channel c = 16u + v holds coefficient (u, v);
// edge blocks are zero-padded.
LatentF analyze(const ImageF& img, int plane);

// round-half-away-from-zero of coef / delta
QuantizedLatent quantize(const LatentF& latent, double delta);

LatentF dequantize(const QuantizedLatent& latent, double delta);

// Inverse transform cropped to (out_h, out_w), clipped to [0, 1].
void synthesize_into(const QuantizedLatent& latent, double delta, int out_h,
                     int out_w, ImageF& out, int plane);
ImageF synthesize(const QuantizedLatent& latent, double delta, int out_h,
                  int out_w);

}  // namespace mpc
