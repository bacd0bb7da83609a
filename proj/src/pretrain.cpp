#include "explore/pretrain.hpp"

#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "explore/entropy.hpp"
#include "explore/errors.hpp"
#include "explore/policy_update.hpp"
#include "explore/rollout.hpp"

namespace explore {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::CvarPercentile:
      return "cvar";
    case Strategy::PdfSoftmax:
      return "pdf";
    case Strategy::CuriosityPercentile:
      return "curiosity-percentile";
  }
  return "cvar";
}

Strategy parse_strategy(const std::string& s) {
  if (s == "cvar") return Strategy::CvarPercentile;
  if (s == "pdf") return Strategy::PdfSoftmax;
  if (s == "curiosity-percentile") return Strategy::CuriosityPercentile;
  throw ConfigError("strategy: unknown value '" + s + "' (expected cvar, pdf or curiosity-percentile)");
}

void PretrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs: must be >= 1");
  if (batch_size < 1) throw ConfigError("batch: must be >= 1");
  if (alpha_percentile < 1 || alpha_percentile > batch_size)
    throw ConfigError("alpha_percentile: must satisfy 0 < percentile <= batch");
  if (!(kl_threshold >= 0)) throw ConfigError("kl_threshold: must be non-negative");
  if (!(curiosity_weight >= 0)) throw ConfigError("curiosity: weight must be non-negative");
  if (!(learning_rate > 0)) throw ConfigError("learning_rate: must be positive");
  if (max_inner_steps < 0) throw ConfigError("max_inner_steps: must be non-negative");
  if (knn_k < 1) throw ConfigError("knn_k: must be >= 1");
  if (!(softmax_temperature > 0)) throw ConfigError("softmax_temperature: must be positive");
  if (workers < 1) throw ConfigError("workers: must be >= 1");
  for (int h : hidden)
    if (h < 1) throw ConfigError("hidden: widths must be positive");
}

EpochRecord to_record(const BatchStats& s) {
  return EpochRecord{s.epoch, s.mean_entropy, s.cvar_entropy, s.alpha, s.percentile, s.kl_at_stop, s.inner_steps,
                     s.mean_curiosity};
}

void write_pretrain_log(std::ostream& out, const std::vector<EpochRecord>& log) {
  out << "epoch,mean_entropy,cvar_entropy,alpha,percentile,kl_at_stop,inner_steps,mean_curiosity\n";
  out << std::setprecision(12);
  for (const auto& r : log) {
    out << r.epoch << ',' << r.mean_entropy << ',' << r.cvar_entropy << ',' << r.alpha << ',' << r.percentile << ','
        << r.kl_at_stop << ',' << r.inner_steps << ',' << r.mean_curiosity << '\n';
  }
}

std::vector<EpochRecord> read_pretrain_log(std::istream& in) {
  std::vector<EpochRecord> log;
  std::string line;
  if (!std::getline(in, line)) throw InputError("pretrain log: missing header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    EpochRecord r;
    char c;
    if (!(row >> r.epoch >> c >> r.mean_entropy >> c >> r.cvar_entropy >> c >> r.alpha >> c >> r.percentile >> c >>
          r.kl_at_stop >> c >> r.inner_steps >> c >> r.mean_curiosity))
      throw InputError("pretrain log: malformed row '" + line + "'");
    log.push_back(r);
  }
  return log;
}

Vector selection_weights(const Vector& entropies, const Vector& curiosity, const std::vector<int>& selection,
                         double curiosity_weight) {
  const Eigen::Index m = static_cast<Eigen::Index>(selection.size());
  Vector w = Vector::Zero(m);
  if (m == 0) return w;
  Vector e(m), c(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    e[k] = entropies[selection[static_cast<std::size_t>(k)]];
    if (curiosity.size() > 0) c[k] = curiosity[selection[static_cast<std::size_t>(k)]];
  }
  w = e.array() - e.mean();
  if (curiosity_weight > 0 && curiosity.size() > 0) w += curiosity_weight * (c.array() - c.mean()).matrix();
  return w;
}

Pretrainer::Pretrainer(EnvClass env_class, PretrainConfig config)
    : Pretrainer(env_class, config,
                 GaussianPolicy::create(2, 2, config.hidden, config.seed, config.initial_log_std)) {}

Pretrainer::Pretrainer(EnvClass env_class, PretrainConfig config, GaussianPolicy initial_policy)
    : env_class_(std::move(env_class)), config_(std::move(config)), policy_(std::move(initial_policy)) {
  config_.validate();
  optimizer_ = Adam(policy_.parameter_count(), AdamParams{config_.learning_rate});
  if (config_.needs_forward_model()) {
    forward_model_.emplace(2, 2, config_.forward_model, config_.seed ^ 0x9e3779b97f4a7c15ULL);
  }
  schedule_ = make_schedule(config_.alpha_percentile, config_.batch_size, config_.epochs, config_.dynamic_alpha,
                            &schedule_warning_);
  if (!schedule_warning_.empty()) std::cerr << "warning: " << schedule_warning_ << '\n';
}

BatchStats Pretrainer::run_epoch() {
  BatchStats stats;
  stats.epoch = schedule_.epoch;
  const auto epoch_tag = static_cast<std::uint64_t>(schedule_.epoch);

  last_batch_ = rollout_batch(policy_, env_class_, config_.batch_size, config_.seed, epoch_tag, config_.workers);
  const auto& batch = last_batch_;

  stats.entropies = batch_entropies(batch, config_.knn_k);
  stats.mean_entropy = stats.entropies.mean();
  stats.percentile = schedule_.current_percentile;
  stats.alpha = schedule_alpha(schedule_, config_.batch_size);
  stats.cvar_entropy = cvar(stats.entropies, stats.alpha);

  if (forward_model_) {
    // Scored before the model sees this batch, so scores measure novelty.
    const auto scores = score_trajectories(*forward_model_, batch);
    stats.curiosity.resize(static_cast<Eigen::Index>(scores.size()));
    for (std::size_t i = 0; i < scores.size(); ++i) stats.curiosity[static_cast<Eigen::Index>(i)] = scores[i].trajectory_score;
    stats.mean_curiosity = stats.curiosity.mean();
    Rng rng = make_rng(config_.seed, {tag(Stream::Curiosity), epoch_tag});
    const auto training = train_forward_model(*forward_model_, batch, config_.forward_model.inner_passes, rng);
    if (training.aborted) std::cerr << "warning: epoch " << stats.epoch << ": forward model update aborted\n";
  }

  switch (config_.strategy) {
    case Strategy::CvarPercentile:
      stats.selection = select_cvar(stats.entropies, stats.percentile);
      break;
    case Strategy::PdfSoftmax: {
      Rng rng = make_rng(config_.seed, {tag(Stream::Selection), epoch_tag});
      stats.probabilities = softmax_probs(stats.entropies, config_.softmax_temperature);
      stats.selection = select_pdf(stats.entropies, stats.percentile, rng, config_.softmax_temperature);
      break;
    }
    case Strategy::CuriosityPercentile:
      stats.selection = select_curious(stats.curiosity, stats.percentile);
      break;
  }
  stats.mask.assign(batch.size(), false);
  for (int i : stats.selection) stats.mask[static_cast<std::size_t>(i)] = true;

  const double eta = config_.curiosity_enabled ? config_.curiosity_weight : 0.0;
  const Vector weights = selection_weights(stats.entropies, stats.curiosity, stats.selection, eta);
  const SurrogateBatch surrogate = trajectory_weighted_batch(batch, stats.selection, weights);
  const Matrix kl_states = stack_states(batch);

  const TrustRegionResult update =
      kl_bounded_ascent(policy_, optimizer_, surrogate, kl_states, config_.kl_threshold, config_.max_inner_steps);
  if (update.aborted) std::cerr << "warning: epoch " << stats.epoch << ": non-finite surrogate, policy restored\n";
  if (update.kl > config_.kl_threshold) throw std::logic_error("accepted policy violates the KL threshold");
  stats.kl_at_stop = update.kl;
  stats.inner_steps = update.accepted_steps;
  stats.aborted = update.aborted;

  schedule_ = alpha_schedule(schedule_);
  return stats;
}

std::vector<EpochRecord> Pretrainer::run(const std::function<void(const BatchStats&)>& on_epoch) {
  std::vector<EpochRecord> log;
  while (schedule_.epoch < config_.epochs) {
    const BatchStats stats = run_epoch();
    if (on_epoch) on_epoch(stats);
    log.push_back(to_record(stats));
  }
  return log;
}

}  // namespace explore
