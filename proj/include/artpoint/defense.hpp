#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "artpoint/attack.hpp"
#include "artpoint/data.hpp"
#include "artpoint/eval.hpp"
#include "artpoint/nn.hpp"

namespace artpoint {

struct PoolEntry {
  EulerAngles angles;
  int source_model = 0;   // index into the attacked model list
  int source_sample = 0;  // sample id the rotation was found on
};

// Class-keyed store of adversarial rotations, reused across samples of the
// same class during retraining.
struct RotationPool {
  std::map<int, std::vector<PoolEntry>> by_class;
  double bound = kPi;

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& [cls, entries] : by_class) n += entries.size();
    return n;
  }
};

struct TrainConfig {
  int epochs = 50;
  double lr = 0.02;
  double lr_decay = 1.0;  // multiplicative, per epoch
};

struct DefenseConfig {
  TrainConfig retrain;     // 50 epochs/iteration iterative, 200 one-step
  int iterations = 10;     // iterative mode
  int ensemble_size = 3;   // one-step mode
  bool mix_clean = false;  // interleave a clean step per sample when true
};

// Attacks every train sample of every model and stores the found angles under
// the sample's class. Pool size = #models x #train samples.
RotationPool build_pool(std::span<const ClassifierParams> models, const Dataset& ds,
                        const AttackConfig& attack_cfg, std::uint64_t seed,
                        int workers = 1);

// Uniform draw over the class's stored entries. Throws PoolMissError when the
// class has none.
EulerAngles sample_rotation(const RotationPool& pool, int class_id, Rng& rng);

// SGD retraining where every sample is rotated by a class-matched pool draw,
// fresh per epoch. Cross-entropy loss throughout.
ClassifierParams adversarial_retrain(ClassifierParams params, const Dataset& ds,
                                     const RotationPool& pool, const TrainConfig& cfg,
                                     bool mix_clean, std::uint64_t seed);

// Ablation: every sample trains under its own fixed adversarial rotation
// (keyed by sample id) instead of pool draws; exhibits label leaking.
ClassifierParams fixed_rotation_retrain(ClassifierParams params, const Dataset& ds,
                                        std::span<const AttackRecord> records,
                                        const TrainConfig& cfg, std::uint64_t seed);

// Alternating min-max: each iteration rebuilds the pool by attacking the
// current parameters (replacing, not appending) and retrains on it. Records
// the random-protocol test accuracy after every iteration.
std::pair<ClassifierParams, std::vector<EvalReport>> iterative_optimize(
    ClassifierParams params, const Dataset& ds, const AttackConfig& attack_cfg,
    const DefenseConfig& cfg, std::uint64_t seed, int workers = 1);

// Builds one pool by attacking the whole ensemble, then retrains the target
// once. With ensemble = {target} this is exactly one iterative iteration.
ClassifierParams one_step_optimize(ClassifierParams target,
                                   std::span<const ClassifierParams> ensemble,
                                   const Dataset& ds, const AttackConfig& attack_cfg,
                                   const DefenseConfig& cfg, std::uint64_t seed,
                                   int workers = 1);

// Baselines.
ClassifierParams clean_train(ClassifierParams params, const Dataset& ds,
                             const TrainConfig& cfg, std::uint64_t seed);
ClassifierParams rotation_augment_train(ClassifierParams params, const Dataset& ds,
                                        const TrainConfig& cfg, double bound,
                                        std::uint64_t seed);

// CSV: class_id, source_model, source_sample, phi_x, phi_y, phi_z.
void save_pool_csv(const RotationPool& pool, const std::string& path);
RotationPool load_pool_csv(const std::string& path);

}  // namespace artpoint
