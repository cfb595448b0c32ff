#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "mpc/cpm.hpp"
#include "mpc/latent.hpp"
#include "mpc/rng.hpp"

namespace mpc {

// Bits to code every channel of location (k, l) with one prior's current
// continuous model.
double location_bitcost(const MonotoneCdfStackd& params,
                        const QuantizedLatent& latent, int k, int l,
                        int prior);

struct Assignment {
  PriorIndexMap idx;
  double total_bits = 0.0;
};

// Per-location argmin over priors of the continuous bitcost; ties go to the
// smallest index.
Assignment assign_priors(const MonotoneCdfStackd& params,
                         const QuantizedLatent& latent);

// Training data feed: one latent per step.
class LatentSource {
 public:
  virtual ~LatentSource() = default;
  virtual QuantizedLatent next(Rng& rng) = 0;
};

struct TrainerConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int64_t revive_after = 50;  // steps a prior may sit unused
  int revive_pool = 8;        // revived priors pick among this many top-cost locations
  int64_t val_interval = 2500;
  double lr_decay = 0.99;
  int patience = 2;  // non-improving validations before an LR decay
  double divergence_factor = 2.0;
  int divergence_limit = 3;
  uint64_t seed = 0;
};

struct TrainerState {
  int64_t step = 0;
  double lr = 1e-3;
  std::vector<int64_t> last_used_step;  // per prior
  Eigen::ArrayXXd m;                    // Adam first moment, params x pairs
  Eigen::ArrayXXd v;                    // Adam second moment
  std::vector<int64_t> adam_steps;      // per-prior update counts
  int non_improving = 0;
  std::vector<double> val_history;
  int64_t revivals = 0;
  int64_t max_unused_gap = 0;  // largest end-of-step idle streak seen
};

struct StepStats {
  double rate = 0.0;  // argmin bits per symbol on this batch
  int priors_in_use = 0;
  int revived = 0;
};

struct TrainReportRow {
  int64_t step;
  double train_rate_ema;
  double val_rate;
  double lr;
  int priors_in_use;
  int64_t revivals;
};

struct TrainResult {
  MonotoneCdfStackd best_params;
  double best_val_rate = 0.0;
  std::vector<TrainReportRow> rows;
  int64_t revivals = 0;
  int64_t max_unused_gap = 0;
  double train_rate_ema = 0.0;
};

std::string format_report(const std::vector<TrainReportRow>& rows);

// Winner-take-all trainer: each step assigns every location to its cheapest
// prior, feeds that location's gradient only into the winner, and gives
// priors that won nothing an update of exactly zero.  Idle priors are revived
// onto the most expensive locations.
class Trainer {
 public:
  Trainer(MonotoneCdfStackd params, TrainerConfig cfg);

  StepStats train_step(const QuantizedLatent& batch);

  double validation_rate(const std::vector<QuantizedLatent>& val) const;

  TrainResult fit(LatentSource& source, int64_t steps,
                  const std::vector<QuantizedLatent>& val);

  const MonotoneCdfStackd& params() const { return params_; }
  MonotoneCdfStackd& params() { return params_; }
  const TrainerState& state() const { return state_; }
  TrainerState& state() { return state_; }
  const TrainerConfig& config() const { return cfg_; }

 private:
  MonotoneCdfStackd params_;
  TrainerConfig cfg_;
  TrainerState state_;
  Rng rng_;

  Eigen::ArrayXXd grad_;  // reused per step
};

}  // namespace mpc
