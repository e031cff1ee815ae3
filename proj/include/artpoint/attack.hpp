#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "artpoint/geometry.hpp"
#include "artpoint/nn.hpp"
#include "artpoint/rng.hpp"

namespace artpoint {

struct AttackConfig {
  int steps = 10;               // projected-gradient steps T
  double step_size = 0.01;      // alpha, radians
  double bound = kPi;           // projection box [-bound, bound]
  bool random_start = true;
  Objective objective = Objective::kCw;
  int restarts = 1;             // evaluation sweeps only; attacks draw once
};

struct AttackOutcome {
  EulerAngles angles;
  RotationMatrix rotation;
  PointCloud adversarial;       // rotation of the ORIGINAL input by `angles`
  std::vector<double> trace;    // objective per step, length steps+1
};

// One component i.i.d. uniform on [-bound, bound].
EulerAngles random_angles(double bound, Rng& rng);

// Projected gradient ascent on Euler angles that moves only the axis with
// the largest |dL/dphi| each step (ties break x < y < z, sign(0) moves
// nothing). The cloud rotated each step is always the original input under
// the accumulated angles.
AttackOutcome axis_wise_attack(const ClassifierParams& params, const PointCloud& cloud,
                               int label, const AttackConfig& cfg, Rng& rng);

// Same loop but all three angles take a signed step every iteration.
AttackOutcome standard_attack(const ClassifierParams& params, const PointCloud& cloud,
                              int label, const AttackConfig& cfg, Rng& rng);

// Baseline: a single uniform draw, no optimization.
AttackOutcome random_rotation_attack(const ClassifierParams& params,
                                     const PointCloud& cloud, int label,
                                     double bound, Objective objective, Rng& rng);

struct AttackRecord {
  int sample_id = 0;
  int class_id = 0;
  EulerAngles angles;
  double final_objective = 0.0;
};

// Attacks every sample independently; sample i uses a generator seeded from
// (seed, sample id) so parallel and serial runs produce identical records.
// batch sets how many samples a worker claims at a time (throughput only).
std::vector<AttackRecord> attack_dataset(const ClassifierParams& params,
                                         std::span<const PointCloud> clouds,
                                         std::span<const int> ids,
                                         const AttackConfig& cfg, std::uint64_t seed,
                                         int workers = 1, int batch = 17);

// CSV: sample_id, class_id, phi_x, phi_y, phi_z, final_objective.
void save_attack_records_csv(std::span<const AttackRecord> records,
                             const std::string& path);

}  // namespace artpoint
