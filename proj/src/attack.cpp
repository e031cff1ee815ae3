#include "artpoint/attack.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "artpoint/common.hpp"
#include "artpoint/io_util.hpp"
#include "artpoint/parallel.hpp"

namespace artpoint {

namespace {

constexpr std::uint64_t kStreamAttack = 0x41545443u;

void validate_config(const AttackConfig& cfg) {
  if (cfg.steps < 0) throw ConfigError("attack: steps must be >= 0");
  if (!(cfg.step_size > 0.0)) throw ConfigError("attack: step size must be > 0");
  if (!(cfg.bound > 0.0) || cfg.bound > kPi)
    throw ConfigError("attack: bound must lie in (0, pi]");
  if (cfg.restarts < 1) throw ConfigError("attack: restarts must be >= 1");
}

inline double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

AttackOutcome run_pgd(const ClassifierParams& params, const PointCloud& cloud,
                      int label, const AttackConfig& cfg, Rng& rng, bool axis_wise) {
  validate_config(cfg);
  if (cloud.points.empty()) throw std::invalid_argument("attack: empty cloud");

  EulerAngles angles =
      cfg.random_start ? random_angles(cfg.bound, rng) : EulerAngles{};

  AttackOutcome out;
  out.trace.reserve(static_cast<std::size_t>(cfg.steps) + 1);
  PointCloud rotated = apply_rotation(compose(angles), cloud);

  for (int t = 0; t < cfg.steps; ++t) {
    const BackwardResult bw = backward(params, rotated, label, cfg.objective);
    out.trace.push_back(bw.loss);
    // world-axis torque projected onto the Euler axes of the fixed
    // composition, so the signed step ascends at any angle magnitude
    const AngleGradient grad = euler_angle_gradients(
        angles, angle_gradients(rotated.points, bw.coord_grads));
    if (axis_wise) {
      Axis target = Axis::kX;
      double best = std::abs(grad[Axis::kX]);
      for (const Axis a : {Axis::kY, Axis::kZ}) {
        if (std::abs(grad[a]) > best) {
          best = std::abs(grad[a]);
          target = a;
        }
      }
      angles[target] += cfg.step_size * sign(grad[target]);
    } else {
      for (const Axis a : {Axis::kX, Axis::kY, Axis::kZ})
        angles[a] += cfg.step_size * sign(grad[a]);
    }
    angles = project_angles(angles, cfg.bound);
    rotated = apply_rotation(compose(angles), cloud);
  }
  out.trace.push_back(
      objective_value(forward(params, rotated), label, cfg.objective));

  out.angles = angles;
  out.rotation = compose(angles);
  out.adversarial = std::move(rotated);
  return out;
}

}  // namespace

EulerAngles random_angles(double bound, Rng& rng) {
  if (!(bound > 0.0) || bound > kPi)
    throw std::invalid_argument("random_angles: bound must lie in (0, pi]");
  EulerAngles a;
  a.phi_x = rng.uniform(-bound, bound);
  a.phi_y = rng.uniform(-bound, bound);
  a.phi_z = rng.uniform(-bound, bound);
  return a;
}

AttackOutcome axis_wise_attack(const ClassifierParams& params, const PointCloud& cloud,
                               int label, const AttackConfig& cfg, Rng& rng) {
  return run_pgd(params, cloud, label, cfg, rng, /*axis_wise=*/true);
}

AttackOutcome standard_attack(const ClassifierParams& params, const PointCloud& cloud,
                              int label, const AttackConfig& cfg, Rng& rng) {
  return run_pgd(params, cloud, label, cfg, rng, /*axis_wise=*/false);
}

AttackOutcome random_rotation_attack(const ClassifierParams& params,
                                     const PointCloud& cloud, int label,
                                     double bound, Objective objective, Rng& rng) {
  if (cloud.points.empty())
    throw std::invalid_argument("random_rotation_attack: empty cloud");
  AttackOutcome out;
  out.angles = random_angles(bound, rng);
  out.rotation = compose(out.angles);
  out.adversarial = apply_rotation(out.rotation, cloud);
  out.trace = {objective_value(forward(params, out.adversarial), label, objective)};
  return out;
}

std::vector<AttackRecord> attack_dataset(const ClassifierParams& params,
                                         std::span<const PointCloud> clouds,
                                         std::span<const int> ids,
                                         const AttackConfig& cfg, std::uint64_t seed,
                                         int workers, int batch) {
  if (clouds.empty()) throw std::invalid_argument("attack_dataset: empty dataset");
  if (clouds.size() != ids.size())
    throw std::invalid_argument("attack_dataset: id/cloud count mismatch");
  validate_config(cfg);

  std::vector<AttackRecord> records(clouds.size());
  parallel_for(
      clouds.size(), workers,
      [&](std::size_t i) {
        Rng rng(derive_seed(seed, kStreamAttack, static_cast<std::uint64_t>(ids[i])));
        const AttackOutcome outcome =
            axis_wise_attack(params, clouds[i], clouds[i].label, cfg, rng);
        records[i] = {ids[i], clouds[i].label, outcome.angles, outcome.trace.back()};
      },
      batch < 1 ? 1 : static_cast<std::size_t>(batch));
  return records;
}

void save_attack_records_csv(std::span<const AttackRecord> records,
                             const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_attack_records_csv: cannot open " + path);
  out << "sample_id,class_id,phi_x,phi_y,phi_z,final_objective\n";
  for (const AttackRecord& r : records)
    out << r.sample_id << ',' << r.class_id << ',' << format_double(r.angles.phi_x)
        << ',' << format_double(r.angles.phi_y) << ',' << format_double(r.angles.phi_z)
        << ',' << format_double(r.final_objective) << '\n';
  if (!out) throw IoError("save_attack_records_csv: write failed for " + path);
}

}  // namespace artpoint
