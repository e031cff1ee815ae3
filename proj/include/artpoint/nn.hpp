#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "artpoint/point_cloud.hpp"

namespace artpoint {

enum class Pooling { kMax = 0 };

// Fixed topology: shared per-point MLP 3 -> h1 -> h2, symmetric pool over
// points, global MLP h2 -> h3 -> k logits. Hidden layers use a smooth
// monotone rectifier so max-pool is the only nonsmooth element.
struct Architecture {
  int h1 = 64;
  int h2 = 128;
  int h3 = 64;
  int k = 8;
  Pooling pooling = Pooling::kMax;
};

// Weights are row-major: w1[h1 x 3], w2[h2 x h1], w3[h3 x h2], w4[k x h3].
struct ClassifierParams {
  Architecture arch;
  std::uint64_t seed = 0;
  std::vector<double> w1, b1, w2, b2, w3, b3, w4, b4;
};

struct ParamGradients {
  std::vector<double> w1, b1, w2, b2, w3, b3, w4, b4;
};

using Logits = std::vector<double>;

enum class Objective { kCrossEntropy = 0, kCw = 1 };

struct BackwardResult {
  double loss = 0.0;
  ParamGradients grads;
  std::vector<Vec3> coord_grads;  // dL/dp per input point
};

// Deterministic scaled-uniform init (zero-mean, Glorot-style bounds),
// biases zero.
ClassifierParams init_params(const Architecture& arch, std::uint64_t seed);

Logits forward(const ClassifierParams& params, const PointCloud& cloud);

// forward + the per-channel pooling winner indices, for tie diagnostics.
Logits forward_with_argmax(const ClassifierParams& params, const PointCloud& cloud,
                           std::vector<int>& pool_argmax);

// Index of the largest logit; first index wins on exact ties.
int predict(const ClassifierParams& params, const PointCloud& cloud);

// Negative log-softmax of the true class.
double cross_entropy(std::span<const double> logits, int label);

// Untargeted margin max_{j != label} z_j - z_label; the attacker ascends this.
double cw_objective(std::span<const double> logits, int label);

double objective_value(std::span<const double> logits, int label, Objective obj);

// Exact reverse-mode gradients of the chosen objective with respect to every
// parameter and every input coordinate. The pooling gradient routes to the
// first-encountered argmax point per channel.
BackwardResult backward(const ClassifierParams& params, const PointCloud& cloud,
                        int label, Objective obj);

// theta <- theta - lr * grad, elementwise. Throws on shape mismatch.
void sgd_step(ClassifierParams& params, const ParamGradients& grads, double lr);

// Checkpoint container (magic "APCK"); round-trips bit-exactly.
void save_checkpoint(const ClassifierParams& params, const std::string& path);
ClassifierParams load_checkpoint(const std::string& path);

}  // namespace artpoint
