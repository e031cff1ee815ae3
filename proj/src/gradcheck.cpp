#include "artpoint/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "artpoint/attack.hpp"
#include "artpoint/common.hpp"
#include "artpoint/geometry.hpp"
#include "artpoint/rng.hpp"

namespace artpoint {

namespace {

constexpr std::uint64_t kStreamGradCheck = 0x47434843u;

}  // namespace

PairCheck gradcheck_pair(const ClassifierParams& params, const PointCloud& cloud,
                         int label, double fd_step, double rel_tol) {
  PairCheck result;

  std::vector<int> base_argmax;
  forward_with_argmax(params, cloud, base_argmax);

  const BackwardResult bw = backward(params, cloud, label, Objective::kCrossEntropy);
  const AngleGradient analytic = angle_gradients(cloud.points, bw.coord_grads);

  bool all_pass = true;
  for (const Axis axis : {Axis::kX, Axis::kY, Axis::kZ}) {
    std::vector<int> arg_plus, arg_minus;
    const PointCloud plus = apply_rotation(axis_rotation(axis, fd_step), cloud);
    const PointCloud minus = apply_rotation(axis_rotation(axis, -fd_step), cloud);
    const double f_plus = cross_entropy(forward_with_argmax(params, plus, arg_plus), label);
    const double f_minus =
        cross_entropy(forward_with_argmax(params, minus, arg_minus), label);
    if (arg_plus != base_argmax || arg_minus != base_argmax) {
      result.tie = true;
      return result;
    }
    const double fd = (f_plus - f_minus) / (2.0 * fd_step);
    const double ref = analytic[axis];
    const double scale = std::max(std::abs(fd), std::abs(ref));
    const double err = std::abs(fd - ref);
    const double rel = scale > 0.0 ? err / scale : 0.0;
    result.rel_err[static_cast<int>(axis)] = rel;
    if (err > rel_tol * scale + 1e-10) all_pass = false;
  }
  result.pass = all_pass;
  return result;
}

GradCheckReport run_gradcheck(const ClassifierParams& params,
                              std::span<const PointCloud> clouds,
                              const GradCheckConfig& cfg, std::uint64_t seed) {
  if (clouds.empty()) throw std::invalid_argument("run_gradcheck: no clouds");
  if (cfg.pairs < 1) throw ConfigError("run_gradcheck: pairs must be >= 1");

  GradCheckReport report;
  const int max_attempts = cfg.pairs * 4;
  for (int attempt = 0; attempt < max_attempts && report.checked < cfg.pairs;
       ++attempt) {
    Rng rng(derive_seed(seed, kStreamGradCheck, static_cast<std::uint64_t>(attempt)));
    const PointCloud& base = clouds[rng.uniform_index(clouds.size())];
    const PointCloud probe =
        apply_rotation(compose(random_angles(kPi, rng)), base);
    const PairCheck check =
        gradcheck_pair(params, probe, probe.label, cfg.fd_step, cfg.rel_tol);
    if (check.tie) {
      ++report.skipped_ties;
      continue;
    }
    ++report.checked;
    if (check.pass) ++report.passed;
    for (int a = 0; a < 3; ++a)
      report.worst_rel_err[a] = std::max(report.worst_rel_err[a], check.rel_err[a]);
  }
  report.pass = report.checked > 0 &&
                static_cast<double>(report.passed) >=
                    cfg.pass_fraction * static_cast<double>(report.checked);
  return report;
}

}  // namespace artpoint
