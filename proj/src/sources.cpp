#include "mpc/sources.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mpc/errors.hpp"

namespace mpc {

void ChannelPmf::validate() const {
  if (p.size() == 0) throw UsageError("pmf has no support");
  if ((p < 0.0).any()) throw UsageError("pmf has negative mass");
  double total = p.sum();
  if (std::abs(total - 1.0) > 1e-9)
    throw UsageError("pmf mass sums to " + std::to_string(total) +
                     ", expected 1");
}

double ChannelPmf::entropy_bits() const {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) h -= p[i] * std::log2(p[i]);
  return h;
}

ChannelPmf uniform_pmf(int32_t lo, int32_t hi) {
  if (hi < lo) throw UsageError("uniform pmf needs lo <= hi");
  ChannelPmf pmf;
  pmf.support_min = lo;
  pmf.p = Eigen::ArrayXd::Constant(hi - lo + 1, 1.0 / (hi - lo + 1));
  return pmf;
}

ChannelPmf laplace_pmf(double scale, int32_t span) {
  if (!(scale > 0.0)) throw UsageError("laplace pmf needs scale > 0");
  if (span < 0) throw UsageError("laplace pmf needs span >= 0");
  ChannelPmf pmf;
  pmf.support_min = -span;
  pmf.p.resize(2 * span + 1);
  for (int32_t s = -span; s <= span; ++s)
    pmf.p[s + span] = std::exp(-std::abs(static_cast<double>(s)) / scale);
  pmf.p /= pmf.p.sum();
  return pmf;
}

ChannelPmf point_pmf(int32_t value) {
  ChannelPmf pmf;
  pmf.support_min = value;
  pmf.p = Eigen::ArrayXd::Ones(1);
  return pmf;
}

void SyntheticSourceSpec::validate() const {
  if (c_l <= 0 || h_l <= 0 || w_l <= 0)
    throw UsageError("synthetic source needs positive c_l, h_l, w_l");
  if (regimes.empty()) throw UsageError("synthetic source needs regimes");
  if (layout.size() != static_cast<size_t>(h_l) * w_l)
    throw UsageError("layout size does not match latent grid");
  for (uint8_t r : layout)
    if (r >= regimes.size())
      throw UsageError("layout references regime " + std::to_string(r) +
                       " but only " + std::to_string(regimes.size()) +
                       " are defined");
  for (const RegimeSpec& reg : regimes) {
    if (reg.channels.size() != static_cast<size_t>(c_l))
      throw UsageError("regime channel count does not match c_l");
    for (const ChannelPmf& pmf : reg.channels) pmf.validate();
  }
}

SymbolAlphabet SyntheticSourceSpec::support_alphabet(int32_t margin) const {
  int32_t lo = 0;
  int32_t hi = 0;
  for (const RegimeSpec& reg : regimes)
    for (const ChannelPmf& pmf : reg.channels) {
      lo = std::min(lo, pmf.support_min);
      hi = std::max(hi, pmf.support_max());
    }
  return SymbolAlphabet(lo - margin, hi + margin);
}

double SyntheticSourceSpec::location_entropy_bits(int regime) const {
  const RegimeSpec& reg = regimes.at(regime);
  double h = 0.0;
  for (const ChannelPmf& pmf : reg.channels) h += pmf.entropy_bits();
  return h;
}

double SyntheticSourceSpec::mean_entropy_bits_per_symbol() const {
  double total = 0.0;
  for (uint8_t r : layout) total += location_entropy_bits(r);
  return total / (static_cast<double>(layout.size()) * c_l);
}

std::vector<uint8_t> layout_bands(int h_l, int w_l, int n_regimes) {
  std::vector<uint8_t> layout(static_cast<size_t>(h_l) * w_l);
  for (int k = 0; k < h_l; ++k) {
    auto r = static_cast<uint8_t>(static_cast<int64_t>(k) * n_regimes / h_l);
    for (int l = 0; l < w_l; ++l) layout[static_cast<size_t>(k) * w_l + l] = r;
  }
  return layout;
}

std::vector<uint8_t> layout_quadrants(int h_l, int w_l) {
  std::vector<uint8_t> layout(static_cast<size_t>(h_l) * w_l);
  for (int k = 0; k < h_l; ++k)
    for (int l = 0; l < w_l; ++l) {
      uint8_t r = static_cast<uint8_t>((k >= h_l / 2) * 2 + (l >= w_l / 2));
      layout[static_cast<size_t>(k) * w_l + l] = r;
    }
  return layout;
}

std::vector<uint8_t> layout_random(int h_l, int w_l, int n_regimes,
                                   uint64_t seed) {
  Rng rng(seed);
  std::vector<uint8_t> layout(static_cast<size_t>(h_l) * w_l);
  for (uint8_t& r : layout)
    r = static_cast<uint8_t>(rng.below(static_cast<uint64_t>(n_regimes)));
  return layout;
}

namespace {

int32_t draw_from_pmf(const ChannelPmf& pmf, Rng& rng) {
  double u = rng.uniform();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < pmf.p.size(); ++i) {
    acc += pmf.p[i];
    if (u < acc) return pmf.support_min + static_cast<int32_t>(i);
  }
  return pmf.support_max();
}

}  // namespace

SyntheticDraw sample_synthetic(const SyntheticSourceSpec& spec, Rng& rng) {
  SyntheticDraw draw;
  draw.latent = QuantizedLatent(spec.c_l, spec.h_l, spec.w_l);
  draw.labels = spec.layout;
  for (int k = 0; k < spec.h_l; ++k)
    for (int l = 0; l < spec.w_l; ++l) {
      const RegimeSpec& reg =
          spec.regimes[spec.layout[static_cast<size_t>(k) * spec.w_l + l]];
      auto loc = draw.latent.loc(k, l);
      for (int c = 0; c < spec.c_l; ++c)
        loc[c] = draw_from_pmf(reg.channels[c], rng);
    }
  return draw;
}

SyntheticLatentSource::SyntheticLatentSource(SyntheticSourceSpec spec)
    : spec_(std::move(spec)) {
  spec_.validate();
}

QuantizedLatent SyntheticLatentSource::next(Rng& rng) {
  return sample_synthetic(spec_, rng).latent;
}

FixedLatentSource::FixedLatentSource(std::vector<QuantizedLatent> latents)
    : latents_(std::move(latents)) {
  if (latents_.empty()) throw UsageError("fixed latent source needs latents");
  for (size_t i = 1; i < latents_.size(); ++i)
    if (latents_[i].c_l != latents_[0].c_l)
      throw UsageError("fixed latent source mixes channel counts");
}

QuantizedLatent FixedLatentSource::next(Rng&) {
  QuantizedLatent out = latents_[pos_];
  pos_ = (pos_ + 1) % latents_.size();
  return out;
}

CropLatentSource::CropLatentSource(QuantizedLatent full, int crop_h, int crop_w)
    : full_(std::move(full)), crop_h_(crop_h), crop_w_(crop_w) {
  if (crop_h_ <= 0 || crop_w_ <= 0 || crop_h_ > full_.h_l ||
      crop_w_ > full_.w_l)
    throw UsageError("crop does not fit inside the latent");
}

QuantizedLatent CropLatentSource::next(Rng& rng) {
  int k0 = static_cast<int>(
      rng.below(static_cast<uint64_t>(full_.h_l - crop_h_ + 1)));
  int l0 = static_cast<int>(
      rng.below(static_cast<uint64_t>(full_.w_l - crop_w_ + 1)));
  QuantizedLatent out(full_.c_l, crop_h_, crop_w_);
  for (int k = 0; k < crop_h_; ++k)
    for (int l = 0; l < crop_w_; ++l) {
      auto src = full_.loc(k0 + k, l0 + l);
      auto dst = out.loc(k, l);
      std::copy(src.begin(), src.end(), dst.begin());
    }
  return out;
}

SymbolAlphabet observed_alphabet(const std::vector<QuantizedLatent>& latents,
                                 int32_t margin) {
  int32_t lo = 0;
  int32_t hi = 0;
  for (const QuantizedLatent& latent : latents)
    for (int32_t s : latent.sym) {
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
  return SymbolAlphabet(lo - margin, hi + margin);
}

SymbolAlphabet observed_alphabet(const QuantizedLatent& latent,
                                 int32_t margin) {
  return observed_alphabet(std::vector<QuantizedLatent>{latent}, margin);
}

namespace {

using nlohmann::json;

ChannelPmf parse_channel(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "uniform")
    return uniform_pmf(j.at("lo").get<int32_t>(), j.at("hi").get<int32_t>());
  if (kind == "laplace")
    return laplace_pmf(j.at("scale").get<double>(), j.at("span").get<int32_t>());
  if (kind == "point") return point_pmf(j.at("value").get<int32_t>());
  throw UsageError("unknown channel kind '" + kind + "'");
}

}  // namespace

SyntheticSourceSpec parse_source_spec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("source spec is not valid JSON: ") + e.what());
  }
  SyntheticSourceSpec spec;
  try {
    spec.c_l = j.at("c_l").get<int>();
    spec.h_l = j.at("h_l").get<int>();
    spec.w_l = j.at("w_l").get<int>();
    for (const json& jr : j.at("regimes")) {
      RegimeSpec reg;
      for (const json& jc : jr.at("channels")) reg.channels.push_back(parse_channel(jc));
      if (reg.channels.empty())
        throw UsageError("regime has no channels");
      while (reg.channels.size() < static_cast<size_t>(spec.c_l))
        reg.channels.push_back(reg.channels.back());
      spec.regimes.push_back(std::move(reg));
    }
    std::string layout = j.value("layout", std::string("bands"));
    int n = static_cast<int>(spec.regimes.size());
    if (layout == "bands")
      spec.layout = layout_bands(spec.h_l, spec.w_l, n);
    else if (layout == "quadrants")
      spec.layout = layout_quadrants(spec.h_l, spec.w_l);
    else if (layout == "random")
      spec.layout = layout_random(spec.h_l, spec.w_l, n,
                                  j.value("layout_seed", uint64_t{1}));
    else
      throw UsageError("unknown layout '" + layout + "'");
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad source spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

SyntheticSourceSpec load_source_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open source spec '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_source_spec(buf.str());
}

}  // namespace mpc
