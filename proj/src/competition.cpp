#include "mpc/competition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mpc/errors.hpp"

namespace mpc {
namespace {

// The bitcost of every (prior, channel, symbol) combination present in a
// batch, tabulated over the batch's symbol range.  Evaluating the stack once
// per boundary point and gathering per location is exactly the per-location
// evaluation, reordered.
struct BitTable {
  int32_t lo = 0;
  int32_t hi = 0;
  int n_cdf = 0;
  int c_l = 0;
  std::vector<double> bits;  // (prior, channel, symbol - lo)

  int width() const { return hi - lo + 1; }
  const double* row(int prior, int channel) const {
    return bits.data() +
           (static_cast<size_t>(prior) * c_l + channel) * width();
  }
};

void batch_range(const QuantizedLatent& latent, int32_t* lo, int32_t* hi) {
  auto [mn, mx] = std::minmax_element(latent.sym.begin(), latent.sym.end());
  *lo = *mn;
  *hi = *mx;
}

BitTable tabulate_bits(const MonotoneCdfStackd& params,
                       const QuantizedLatent& latent) {
  BitTable t;
  batch_range(latent, &t.lo, &t.hi);
  t.n_cdf = params.n_cdf();
  t.c_l = params.c_l();
  t.bits.resize(static_cast<size_t>(t.n_cdf) * t.c_l * t.width());
  size_t pos = 0;
  for (int i = 0; i < t.n_cdf; ++i) {
    for (int c = 0; c < t.c_l; ++c) {
      Eigen::ArrayXd row = params.bitcost_row(i, c, t.lo, t.hi);
      std::copy(row.data(), row.data() + row.size(), t.bits.begin() + pos);
      pos += row.size();
    }
  }
  return t;
}

// costs(m, i): bits of location m under prior i; locations in row-major order.
Eigen::ArrayXXd location_costs(const BitTable& t,
                               const QuantizedLatent& latent) {
  const size_t m_count = latent.locations();
  Eigen::ArrayXXd costs = Eigen::ArrayXXd::Zero(m_count, t.n_cdf);
  for (int i = 0; i < t.n_cdf; ++i) {
    double* col = costs.col(i).data();
    for (size_t m = 0; m < m_count; ++m) {
      const int32_t* sym = latent.sym.data() + m * latent.c_l;
      double acc = 0.0;
      for (int c = 0; c < latent.c_l; ++c) {
        acc += t.row(i, c)[sym[c] - t.lo];
      }
      col[m] = acc;
    }
  }
  return costs;
}

void check_finite(const Eigen::ArrayXXd& costs, const BitTable& t,
                  const QuantizedLatent& latent) {
  if (costs.allFinite()) return;
  for (Eigen::Index i = 0; i < costs.cols(); ++i) {
    for (Eigen::Index m = 0; m < costs.rows(); ++m) {
      if (std::isfinite(costs(m, i))) continue;
      const int32_t* sym = latent.sym.data() + m * latent.c_l;
      for (int c = 0; c < latent.c_l; ++c) {
        if (!std::isfinite(t.row(static_cast<int>(i), c)[sym[c] - t.lo])) {
          throw NumericError("non-finite bitcost at prior " +
                             std::to_string(i) + " channel " +
                             std::to_string(c));
        }
      }
      throw NumericError("non-finite bitcost at prior " + std::to_string(i));
    }
  }
}

std::vector<uint16_t> argmin_rows(const Eigen::ArrayXXd& costs,
                                  Eigen::ArrayXd* min_out) {
  const Eigen::Index m_count = costs.rows();
  const Eigen::Index n = costs.cols();
  std::vector<uint16_t> winner(m_count, 0);
  min_out->resize(m_count);
  for (Eigen::Index m = 0; m < m_count; ++m) {
    double best = costs(m, 0);
    uint16_t best_i = 0;
    for (Eigen::Index i = 1; i < n; ++i) {
      if (costs(m, i) < best) {
        best = costs(m, i);
        best_i = static_cast<uint16_t>(i);
      }
    }
    winner[m] = best_i;
    (*min_out)[m] = best;
  }
  return winner;
}

}  // namespace

double location_bitcost(const MonotoneCdfStackd& params,
                        const QuantizedLatent& latent, int k, int l,
                        int prior) {
  if (prior < 0 || prior >= params.n_cdf()) {
    throw UsageError("prior index out of range");
  }
  if (latent.c_l != params.c_l()) {
    throw UsageError("latent channel count does not match model");
  }
  auto symbols = latent.loc(k, l);
  double bits = 0.0;
  for (int c = 0; c < latent.c_l; ++c) {
    bits += params.symbol_bitcost(prior, c, symbols[c]);
  }
  return bits;
}

Assignment assign_priors(const MonotoneCdfStackd& params,
                         const QuantizedLatent& latent) {
  if (latent.c_l != params.c_l()) {
    throw UsageError("latent channel count does not match model");
  }
  Assignment out;
  out.idx = PriorIndexMap(latent.h_l, latent.w_l);
  if (latent.sym.empty()) return out;
  BitTable t = tabulate_bits(params, latent);
  Eigen::ArrayXXd costs = location_costs(t, latent);
  check_finite(costs, t, latent);
  Eigen::ArrayXd mins;
  out.idx.idx = argmin_rows(costs, &mins);
  out.total_bits = mins.sum();
  return out;
}

Trainer::Trainer(MonotoneCdfStackd params, TrainerConfig cfg)
    : params_(std::move(params)), cfg_(cfg), rng_(cfg.seed) {
  const int n = params_.n_cdf();
  state_.lr = cfg_.lr;
  state_.last_used_step.assign(n, 0);
  state_.adam_steps.assign(n, 0);
  state_.m = Eigen::ArrayXXd::Zero(params_.params_per_pair(),
                                   params_.pair_count());
  state_.v = Eigen::ArrayXXd::Zero(params_.params_per_pair(),
                                   params_.pair_count());
  grad_ = Eigen::ArrayXXd::Zero(params_.params_per_pair(),
                                params_.pair_count());
}

StepStats Trainer::train_step(const QuantizedLatent& batch) {
  if (batch.c_l != params_.c_l()) {
    throw UsageError("batch channel count does not match model");
  }
  if (batch.sym.empty()) throw UsageError("empty training batch");
  state_.step += 1;
  const int64_t step = state_.step;
  const int n = params_.n_cdf();
  const size_t m_count = batch.locations();

  BitTable t = tabulate_bits(params_, batch);
  Eigen::ArrayXXd costs = location_costs(t, batch);
  check_finite(costs, t, batch);
  Eigen::ArrayXd mins;
  std::vector<uint16_t> winner = argmin_rows(costs, &mins);

  StepStats stats;
  stats.rate = mins.sum() /
               (static_cast<double>(m_count) * batch.c_l);

  std::vector<char> used(n, 0);
  for (uint16_t wincr : winner) used[wincr] = 1;
  for (int i = 0; i < n; ++i) {
    if (used[i]) state_.last_used_step[i] = step;
  }
  stats.priors_in_use =
      static_cast<int>(std::count(used.begin(), used.end(), 1));

  // Revival: a prior idle for revive_after steps is handed one of the most
  // expensive locations so this step's gradient pulls it toward live data.
  std::vector<int> dead;
  for (int i = 0; i < n; ++i) {
    if (step - state_.last_used_step[i] >= cfg_.revive_after) dead.push_back(i);
  }
  if (!dead.empty()) {
    const int pool =
        std::min<int>(static_cast<int>(m_count),
                      std::max<int>(cfg_.revive_pool,
                                    static_cast<int>(dead.size())));
    std::vector<int> order(m_count);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
      if (mins[x] != mins[y]) return mins[x] > mins[y];
      return x < y;
    });
    std::vector<int> slots(order.begin(), order.begin() + pool);
    for (int prior : dead) {
      const int pick = static_cast<int>(rng_.below(
          static_cast<int64_t>(slots.size())));
      const int loc = slots[pick];
      slots.erase(slots.begin() + pick);
      winner[loc] = static_cast<uint16_t>(prior);
      state_.last_used_step[prior] = step;
      used[prior] = 1;
      state_.revivals += 1;
      stats.revived += 1;
      if (slots.empty()) break;
    }
  }

  // Backward: per winning (prior, channel), weight each symbol of the bit
  // table by how often it was coded, then run one backward pass over the
  // boundary tape.  Identical to per-location backprop because the gradient
  // is linear in the upstream weights.
  const double upstream = 1.0 / (static_cast<double>(m_count) * batch.c_l);
  std::vector<std::vector<int>> won_locs(n);
  for (size_t m = 0; m < m_count; ++m) {
    won_locs[winner[m]].push_back(static_cast<int>(m));
  }
  const int width = t.width();
  Eigen::ArrayXd weight(width);
  for (int i = 0; i < n; ++i) {
    if (won_locs[i].empty()) continue;
    for (int c = 0; c < batch.c_l; ++c) {
      weight.setZero();
      for (int m : won_locs[i]) {
        weight[batch.sym[static_cast<size_t>(m) * batch.c_l + c] - t.lo] +=
            upstream;
      }
      grad_.col(params_.pair(i, c)).setZero();
      auto col = grad_.col(params_.pair(i, c)).matrix();
      params_.accumulate_bitcost_grad(i, c, t.lo, t.hi, weight, col);
    }
  }

  // Sparse Adam: only priors that won or were revived move; everything else
  // stays bitwise unchanged.
  for (int i = 0; i < n; ++i) {
    if (!used[i] || won_locs[i].empty()) continue;
    state_.adam_steps[i] += 1;
    const double bc1 =
        1.0 - std::pow(cfg_.beta1, static_cast<double>(state_.adam_steps[i]));
    const double bc2 =
        1.0 - std::pow(cfg_.beta2, static_cast<double>(state_.adam_steps[i]));
    for (int c = 0; c < batch.c_l; ++c) {
      const int p = params_.pair(i, c);
      auto g = grad_.col(p);
      auto m = state_.m.col(p);
      auto v = state_.v.col(p);
      m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
      v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g.square();
      params_.params().col(p) -=
          state_.lr * (m / bc1) / ((v / bc2).sqrt() + cfg_.adam_eps);
    }
  }

  for (int i = 0; i < n; ++i) {
    state_.max_unused_gap =
        std::max(state_.max_unused_gap, step - state_.last_used_step[i]);
  }
  return stats;
}

double Trainer::validation_rate(
    const std::vector<QuantizedLatent>& val) const {
  if (val.empty()) throw UsageError("validation set is empty");
  double bits = 0.0;
  double symbols = 0.0;
  for (const QuantizedLatent& latent : val) {
    Assignment a = assign_priors(params_, latent);
    bits += a.total_bits;
    symbols += static_cast<double>(latent.symbol_count());
  }
  return bits / symbols;
}

TrainResult Trainer::fit(LatentSource& source, int64_t steps,
                         const std::vector<QuantizedLatent>& val) {
  TrainResult result;
  double initial = validation_rate(val);
  result.best_params = params_;
  result.best_val_rate = initial;
  result.rows.push_back({0, 0.0, initial, state_.lr, 0, 0});
  state_.val_history.push_back(initial);

  double ema = 0.0;
  bool ema_init = false;
  int diverged_streak = 0;
  StepStats last_stats;
  for (int64_t s = 1; s <= steps; ++s) {
    QuantizedLatent batch = source.next(rng_);
    last_stats = train_step(batch);
    if (!ema_init) {
      ema = last_stats.rate;
      ema_init = true;
    } else {
      ema = 0.99 * ema + 0.01 * last_stats.rate;
    }
    if (s % cfg_.val_interval == 0 || s == steps) {
      double rate = validation_rate(val);
      state_.val_history.push_back(rate);
      result.rows.push_back({s, ema, rate, state_.lr,
                             last_stats.priors_in_use, state_.revivals});
      if (rate < result.best_val_rate) {
        result.best_val_rate = rate;
        result.best_params = params_;
        state_.non_improving = 0;
      } else {
        state_.non_improving += 1;
        if (state_.non_improving >= cfg_.patience) {
          state_.lr *= cfg_.lr_decay;
          state_.non_improving = 0;
        }
      }
      if (rate > cfg_.divergence_factor * initial) {
        diverged_streak += 1;
        if (diverged_streak >= cfg_.divergence_limit) {
          throw NumericError(
              "training diverged: validation rate " + std::to_string(rate) +
              " exceeds " + std::to_string(cfg_.divergence_factor) +
              "x the initial " + std::to_string(initial) + " for " +
              std::to_string(diverged_streak) + " consecutive tests");
        }
      } else {
        diverged_streak = 0;
      }
    }
  }
  result.revivals = state_.revivals;
  result.max_unused_gap = state_.max_unused_gap;
  result.train_rate_ema = ema;
  return result;
}

std::string format_report(const std::vector<TrainReportRow>& rows) {
  std::ostringstream os;
  os << "step\ttrain_rate\tval_rate\tlr\tpriors_in_use\trevivals\n";
  for (const TrainReportRow& r : rows) {
    os << r.step << "\t" << r.train_rate_ema << "\t" << r.val_rate << "\t"
       << r.lr << "\t" << r.priors_in_use << "\t" << r.revivals << "\n";
  }
  return os.str();
}

}  // namespace mpc
