#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mpc/alphabet.hpp"
#include "mpc/errors.hpp"
#include "mpc/rng.hpp"

namespace mpc {

// Interval masses are floored at 2^-24 before the log so bitcosts stay finite
// on untrained tails.
inline constexpr double kMassFloor = 0x1.0p-24;
inline constexpr double kLn2 = 0.6931471805599453;

template <typename S>
S stable_sigmoid(S z) {
  if (z >= S(0)) {
    S e = std::exp(-z);
    return S(1) / (S(1) + e);
  }
  S e = std::exp(z);
  return e / (S(1) + e);
}

template <typename S>
S softplus(S w) {
  if (w > S(0)) return w + std::log1p(std::exp(-w));
  return std::log1p(std::exp(w));
}

// Inverse of softplus, defined for y > 0.
template <typename S>
S softplus_inv(S y) {
  if (y > S(20)) return y;
  return std::log(std::expm1(y));
}

// P(X < hi) - P(X < lo) for logistic outputs, written without the
// cancellation that sigmoid(hi) - sigmoid(lo) suffers in the tails:
// sigmoid(b) - sigmoid(a) == sigmoid(b) * sigmoid(-a) * -expm1(a - b).
template <typename S>
S mass_from_logits(S zlo, S zhi) {
  return stable_sigmoid(zhi) * stable_sigmoid(-zlo) * (-std::expm1(zlo - zhi));
}

template <typename S>
S bits_from_mass(S mass) {
  return -std::log2(std::max(mass, S(kMassFloor)));
}

// A stack of univariate monotone CDF models, one per (prior, channel) pair.
// Each model is a composition of `depth` scalar layers
//   z_k = softplus(w_k) * h + b_k
// where the first depth-1 layers apply the gated perturbation
//   h' = z_k + tanh(a_k) * tanh(z_k)
// and the last layer feeds a sigmoid.  softplus keeps every slope positive
// and |tanh(a_k)| < 1, so the composite map is strictly increasing for any
// parameter values.
//
// Parameters live in a (params_per_pair x n_cdf*c_l) array; column
// p = prior * c_l + channel holds [w0, b0, a0, ..., w_{D-2}, b_{D-2}, a_{D-2},
// w_{D-1}, b_{D-1}].
template <typename Scalar>
class MonotoneCdfStack {
 public:
  using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using ParamArray = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  MonotoneCdfStack() = default;  // empty shell; assign a real stack before use

  MonotoneCdfStack(int n_cdf, int c_l, int depth = 4)
      : n_cdf_(n_cdf), c_l_(c_l), depth_(depth) {
    if (n_cdf < 1) throw UsageError("n_cdf must be >= 1");
    if (c_l < 1) throw UsageError("c_l must be >= 1");
    if (depth < 2) throw UsageError("model depth must be >= 2");
    params_ = ParamArray::Zero(params_per_pair(), pair_count());
  }

  // Slope-matched start: the composed pre-sigmoid map has gain ~ 8/L so the
  // initial CDFs transition over roughly [-L/2, L/2].  Biases are spread on a
  // per-layer grid and jittered by +-5% per (prior, channel) so the argmin can
  // tell freshly initialized priors apart.
  static MonotoneCdfStack init_spread(int n_cdf, int c_l,
                                      const SymbolAlphabet& alphabet,
                                      uint64_t seed, int depth = 4) {
    MonotoneCdfStack st(n_cdf, c_l, depth);
    Rng rng(seed);
    double gain_total = 8.0 / alphabet.size();
    double gain = std::pow(gain_total, 1.0 / depth);
    Scalar w_base = softplus_inv(Scalar(gain));
    for (int p = 0; p < st.pair_count(); ++p) {
      for (int k = 0; k < depth; ++k) {
        double spread = -0.5 + (k + 0.5) / depth;
        st.w(k, p) = w_base;
        st.b(k, p) = Scalar(spread * (1.0 + 0.05 * rng.uniform(-1.0, 1.0)));
        if (k < depth - 1) {
          st.a(k, p) = Scalar(0.05 * rng.uniform(-1.0, 1.0));
        }
      }
    }
    return st;
  }

  int n_cdf() const { return n_cdf_; }
  int c_l() const { return c_l_; }
  int depth() const { return depth_; }
  int pair_count() const { return n_cdf_ * c_l_; }
  int params_per_pair() const { return 3 * depth_ - 1; }
  int pair(int prior, int channel) const { return prior * c_l_ + channel; }

  ParamArray& params() { return params_; }
  const ParamArray& params() const { return params_; }

  Scalar& w(int k, int p) { return params_(3 * k, p); }
  Scalar w(int k, int p) const { return params_(3 * k, p); }
  Scalar& b(int k, int p) { return params_(3 * k + 1, p); }
  Scalar b(int k, int p) const { return params_(3 * k + 1, p); }
  Scalar& a(int k, int p) { return params_(3 * k + 2, p); }
  Scalar a(int k, int p) const { return params_(3 * k + 2, p); }

  VectorX get_pair(int prior, int channel) const {
    return params_.col(pair(prior, channel)).matrix();
  }
  void set_pair(int prior, int channel, const VectorX& v) {
    if (v.size() != params_per_pair()) {
      throw UsageError("pair parameter vector has wrong length");
    }
    params_.col(pair(prior, channel)) = v.array();
  }

  // Pre-sigmoid value of the composite map.
  Scalar logit_eval(int prior, int channel, Scalar v) const {
    int p = pair(prior, channel);
    Scalar h = v;
    for (int k = 0; k < depth_ - 1; ++k) {
      Scalar z = softplus(w(k, p)) * h + b(k, p);
      h = z + std::tanh(a(k, p)) * std::tanh(z);
    }
    return softplus(w(depth_ - 1, p)) * h + b(depth_ - 1, p);
  }

  Scalar eval_cdf(int prior, int channel, Scalar v) const {
    return stable_sigmoid(logit_eval(prior, channel, v));
  }

  Scalar interval_mass(int prior, int channel, int32_t s) const {
    Scalar zlo = logit_eval(prior, channel, Scalar(s) - Scalar(0.5));
    Scalar zhi = logit_eval(prior, channel, Scalar(s) + Scalar(0.5));
    return mass_from_logits(zlo, zhi);
  }

  Scalar symbol_bitcost(int prior, int channel, int32_t s) const {
    return bits_from_mass(interval_mass(prior, channel, s));
  }

  // Forward pass over the half-integer boundary grid [lo - 0.5, hi + 0.5],
  // keeping per-layer inputs and pre-activations for the backward pass.
  struct EdgeTape {
    Scalar lo = 0;
    std::vector<ArrayX> h;  // input to layer k
    std::vector<ArrayX> z;  // affine output of layer k
  };

  void forward_edges(int prior, int channel, int32_t lo, int32_t hi,
                     EdgeTape& tape) const {
    int p = pair(prior, channel);
    Eigen::Index e = hi - lo + 2;
    tape.lo = Scalar(lo);
    tape.h.assign(depth_, ArrayX(e));
    tape.z.assign(depth_, ArrayX(e));
    ArrayX& h0 = tape.h[0];
    for (Eigen::Index i = 0; i < e; ++i) {
      h0[i] = Scalar(lo + i) - Scalar(0.5);
    }
    for (int k = 0; k < depth_; ++k) {
      Scalar spw = softplus(w(k, p));
      Scalar bk = b(k, p);
      const ArrayX& hin = tape.h[k];
      ArrayX& zk = tape.z[k];
      if (k < depth_ - 1) {
        Scalar ta = std::tanh(a(k, p));
        ArrayX& hout = tape.h[k + 1];
        for (Eigen::Index i = 0; i < hin.size(); ++i) {
          Scalar z = spw * hin[i] + bk;
          zk[i] = z;
          hout[i] = z + ta * std::tanh(z);
        }
      } else {
        for (Eigen::Index i = 0; i < hin.size(); ++i) {
          zk[i] = spw * hin[i] + bk;
        }
      }
    }
  }

  // Bitcost of each symbol in [lo, hi] under one pair's current parameters.
  ArrayX bitcost_row(int prior, int channel, int32_t lo, int32_t hi) const {
    EdgeTape tape;
    forward_edges(prior, channel, lo, hi, tape);
    const ArrayX& z = tape.z[depth_ - 1];
    ArrayX bits(z.size() - 1);
    for (Eigen::Index i = 0; i + 1 < z.size(); ++i) {
      bits[i] = bits_from_mass(mass_from_logits(z[i], z[i + 1]));
    }
    return bits;
  }

  // Accumulates d(sum_s weight[s] * bitcost(s)) / d(params of this pair) into
  // `acc` (length params_per_pair, in column order).  weight has one entry per
  // symbol in [lo, hi].
  void accumulate_bitcost_grad(int prior, int channel, int32_t lo, int32_t hi,
                               const ArrayX& weight,
                               Eigen::Ref<VectorX> acc) const {
    int p = pair(prior, channel);
    EdgeTape tape;
    forward_edges(prior, channel, lo, hi, tape);
    const ArrayX& zf = tape.z[depth_ - 1];
    Eigen::Index e = zf.size();

    // d(loss)/d(final logit) per edge; each edge borders two symbols.
    ArrayX sig(e), dsig(e);
    for (Eigen::Index i = 0; i < e; ++i) {
      Scalar s = stable_sigmoid(zf[i]);
      sig[i] = s;
      dsig[i] = s * (Scalar(1) - s);
    }
    ArrayX dz = ArrayX::Zero(e);
    for (Eigen::Index s = 0; s + 1 < e; ++s) {
      Scalar mass = mass_from_logits(zf[s], zf[s + 1]);
      Scalar dbits_dmass =
          -weight[s] / (Scalar(kLn2) * std::max(mass, Scalar(kMassFloor)));
      dz[s + 1] += dbits_dmass * dsig[s + 1];
      dz[s] -= dbits_dmass * dsig[s];
    }

    for (int k = depth_ - 1; k >= 0; --k) {
      Scalar wraw = w(k, p);
      Scalar spw = softplus(wraw);
      Scalar dspw = stable_sigmoid(wraw);
      const ArrayX& hin = tape.h[k];
      Scalar gw = 0, gb = 0;
      for (Eigen::Index i = 0; i < e; ++i) {
        gw += dz[i] * hin[i];
        gb += dz[i];
      }
      acc[3 * k] += gw * dspw;
      acc[3 * k + 1] += gb;
      if (k == 0) break;
      // hin was produced by layer k-1's gate.
      Scalar ta = std::tanh(a(k - 1, p));
      Scalar dta = Scalar(1) - ta * ta;
      const ArrayX& zprev = tape.z[k - 1];
      Scalar ga = 0;
      for (Eigen::Index i = 0; i < e; ++i) {
        Scalar dh = dz[i] * spw;
        Scalar t = std::tanh(zprev[i]);
        ga += dh * t;
        dz[i] = dh * (Scalar(1) + ta * (Scalar(1) - t * t));
      }
      acc[3 * (k - 1) + 2] += ga * dta;
    }
  }

  // Gradient of one symbol's bitcost with respect to this pair's parameters.
  VectorX bitcost_grad(int prior, int channel, int32_t s) const {
    VectorX g = VectorX::Zero(params_per_pair());
    ArrayX weight = ArrayX::Ones(1);
    accumulate_bitcost_grad(prior, channel, s, s, weight, g);
    return g;
  }

 private:
  int n_cdf_ = 0;
  int c_l_ = 0;
  int depth_ = 4;
  ParamArray params_;
};

using MonotoneCdfStackd = MonotoneCdfStack<double>;

}  // namespace mpc
