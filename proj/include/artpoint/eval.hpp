#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "artpoint/attack.hpp"
#include "artpoint/nn.hpp"

namespace artpoint {

// The three evaluation protocols: unchanged inputs, one fresh uniform
// rotation per sample, or a per-sample adversarial attack.
struct Protocol {
  enum class Kind { kClean = 0, kRandom = 1, kAttack = 2 };

  Kind kind = Kind::kClean;
  double bound = kPi;    // random protocol rotation range
  AttackConfig attack;   // attack protocol configuration

  static Protocol clean() { return {}; }
  static Protocol random(double bound) {
    Protocol p;
    p.kind = Kind::kRandom;
    p.bound = bound;
    return p;
  }
  static Protocol attacked(const AttackConfig& cfg) {
    Protocol p;
    p.kind = Kind::kAttack;
    p.attack = cfg;
    return p;
  }

  std::string name() const;
  std::string digest() const;
};

struct EvalReport {
  std::string protocol;
  double accuracy = 0.0;
  double mean_loss = 0.0;                  // mean cross-entropy
  std::optional<double> success_rate;      // attack protocol only
  int n_samples = 0;
  std::uint64_t seed = 0;
  std::string config_digest;
};

// Classifies the test set under the given protocol. Clean uses no randomness;
// random/attack derive one generator per sample from (seed, index).
EvalReport evaluate(const ClassifierParams& params, std::span<const PointCloud> test,
                    const Protocol& protocol, std::uint64_t seed, int workers = 1);

// (#correct before - #correct before and after) / #correct before.
// Throws UndefinedMetricError when nothing is correct before the attack.
double attack_success_rate(const ClassifierParams& params,
                           std::span<const PointCloud> test, const AttackConfig& cfg,
                           std::uint64_t seed, int workers = 1);

// The bare formula over already-tallied counts.
double success_rate_from_counts(int correct_before, int correct_before_and_after);

struct AttackVariant {
  enum class Kind { kRandom = 0, kAxisWise = 1, kStandard = 2 };
  std::string name;
  Kind kind = Kind::kAxisWise;
  AttackConfig cfg;
};

// Mean attack objective across the set at every step 0..T, per variant.
// aggregation is "mean" (elementwise over restarts) or "best" (trace of the
// restart with the highest final objective, per sample).
struct SweepRow {
  std::string variant;
  std::string aggregation;
  std::vector<double> mean_objective;  // index = step
  std::string config_digest;
};

std::vector<SweepRow> loss_sweep(const ClassifierParams& params,
                                 std::span<const PointCloud> test,
                                 std::span<const AttackVariant> variants,
                                 std::uint64_t seed, int workers = 1);

// CSV: protocol, accuracy, mean_loss, success_rate, n_samples, seed, config_digest.
void emit_report(std::span<const EvalReport> reports, const std::string& path);

// CSV: variant, aggregation, step, mean_objective, config_digest.
void save_sweep_csv(std::span<const SweepRow> rows, const std::string& path);

}  // namespace artpoint
