#pragma once

#include <cstdint>
#include <span>

#include "artpoint/nn.hpp"

namespace artpoint {

// Central finite differences of the cross-entropy loss under an extra
// rotation of +/-h about each axis, compared against the analytic
// angle-gradient path (backward coordinate gradients folded by the chain
// rule). Samples whose pooling argmax changes inside the +/-h probe are
// flagged as ties and excluded.

struct PairCheck {
  bool tie = false;
  bool pass = false;
  double rel_err[3] = {0.0, 0.0, 0.0};  // per axis x, y, z
};

PairCheck gradcheck_pair(const ClassifierParams& params, const PointCloud& cloud,
                         int label, double fd_step, double rel_tol);

struct GradCheckConfig {
  int pairs = 200;
  double fd_step = 1e-4;
  double rel_tol = 1e-3;
  double pass_fraction = 0.95;
};

struct GradCheckReport {
  int checked = 0;
  int skipped_ties = 0;
  int passed = 0;
  double worst_rel_err[3] = {0.0, 0.0, 0.0};
  bool pass = false;
};

// Fixed model, clouds drawn from the set under fresh random rotations until
// `pairs` tie-free checks accumulate (ties are skipped and counted).
GradCheckReport run_gradcheck(const ClassifierParams& params,
                              std::span<const PointCloud> clouds,
                              const GradCheckConfig& cfg, std::uint64_t seed);

}  // namespace artpoint
