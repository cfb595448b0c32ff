#include "mpc/transform.hpp"

namespace mpc {

LatentF analyze(const ImageF& img, int plane) {
  if (img.h < kBlock || img.w < kBlock) {
    throw UsageError("image must be at least 16x16");
  }
  if (plane < 0 || plane >= img.planes) throw UsageError("plane out of range");
  const int h_l = latent_extent(img.h);
  const int w_l = latent_extent(img.w);
  LatentF out(kBlock * kBlock, h_l, w_l);
  BlockMatrix<double> block;
  for (int k = 0; k < h_l; ++k) {
    for (int l = 0; l < w_l; ++l) {
      block.setZero();
      const int y0 = k * kBlock;
      const int x0 = l * kBlock;
      const int ny = std::min(kBlock, img.h - y0);
      const int nx = std::min(kBlock, img.w - x0);
      for (int y = 0; y < ny; ++y) {
        for (int x = 0; x < nx; ++x) {
          block(y, x) = img.at(plane, y0 + y, x0 + x);
        }
      }
      BlockMatrix<double> coef = block_dct(block);
      double* dst = out.coef.data() + (static_cast<size_t>(k) * w_l + l) *
                                          out.c_l;
      for (int u = 0; u < kBlock; ++u) {
        for (int v = 0; v < kBlock; ++v) {
          dst[u * kBlock + v] = coef(u, v);
        }
      }
    }
  }
  return out;
}

QuantizedLatent quantize(const LatentF& latent, double delta) {
  if (!(delta > 0.0)) throw UsageError("delta must be positive");
  QuantizedLatent out(latent.c_l, latent.h_l, latent.w_l);
  for (size_t i = 0; i < latent.coef.size(); ++i) {
    out.sym[i] = static_cast<int32_t>(std::lround(latent.coef[i] / delta));
  }
  return out;
}

LatentF dequantize(const QuantizedLatent& latent, double delta) {
  if (!(delta > 0.0)) throw UsageError("delta must be positive");
  LatentF out(latent.c_l, latent.h_l, latent.w_l);
  for (size_t i = 0; i < latent.sym.size(); ++i) {
    out.coef[i] = latent.sym[i] * delta;
  }
  return out;
}

void synthesize_into(const QuantizedLatent& latent, double delta, int out_h,
                     int out_w, ImageF& out, int plane) {
  if (latent.c_l != kBlock * kBlock) {
    throw UsageError("latent must have 256 channels for the 16x16 transform");
  }
  if (latent_extent(out_h) != latent.h_l || latent_extent(out_w) != latent.w_l) {
    throw UsageError("output size does not match latent grid");
  }
  BlockMatrix<double> coef;
  for (int k = 0; k < latent.h_l; ++k) {
    for (int l = 0; l < latent.w_l; ++l) {
      for (int u = 0; u < kBlock; ++u) {
        for (int v = 0; v < kBlock; ++v) {
          coef(u, v) = latent.at(u * kBlock + v, k, l) * delta;
        }
      }
      BlockMatrix<double> block = block_idct(coef);
      const int y0 = k * kBlock;
      const int x0 = l * kBlock;
      const int ny = std::min(kBlock, out_h - y0);
      const int nx = std::min(kBlock, out_w - x0);
      for (int y = 0; y < ny; ++y) {
        for (int x = 0; x < nx; ++x) {
          out.at(plane, y0 + y, x0 + x) =
              static_cast<float>(std::clamp(block(y, x), 0.0, 1.0));
        }
      }
    }
  }
}

ImageF synthesize(const QuantizedLatent& latent, double delta, int out_h,
                  int out_w) {
  ImageF out(out_h, out_w, 1);
  synthesize_into(latent, delta, out_h, out_w, out, 0);
  return out;
}

}  // namespace mpc
