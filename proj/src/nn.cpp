#include "artpoint/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "artpoint/common.hpp"
#include "artpoint/io_util.hpp"
#include "artpoint/rng.hpp"

namespace artpoint {

namespace {

// Smooth monotone rectifier: 0.5*(x + sqrt(x^2 + eps^2)). ReLU-shaped but
// C-inf; the knee radius is small against the unit-sphere activation scale so
// pooling winners differ strongly across shapes, and sqrt is correctly
// rounded, which keeps gradient checks tight.
constexpr double kKnee2 = 0.0025;  // eps = 0.05
inline double smooth_relu(double x) { return 0.5 * (x + std::sqrt(x * x + kKnee2)); }
inline double smooth_relu_grad(double x) {
  return 0.5 * (1.0 + x / std::sqrt(x * x + kKnee2));
}

void validate_arch(const Architecture& a) {
  if (a.h1 < 1 || a.h2 < 1 || a.h3 < 1)
    throw ConfigError("architecture: layer widths must be >= 1");
  if (a.k < 2) throw ConfigError("architecture: need at least 2 classes");
}

void validate_cloud(const PointCloud& cloud) {
  if (cloud.points.empty()) throw std::invalid_argument("nn: empty point cloud");
}

void validate_label(int label, int k) {
  if (label < 0 || label >= k)
    throw std::invalid_argument("nn: label out of range");
}

// Forward pass keeping everything backward needs.
struct Workspace {
  std::vector<double> a1, a2;   // pre-activations, n x h1 and n x h2
  std::vector<double> h1v;      // activations after layer 1, n x h1
  std::vector<double> pooled;   // h2
  std::vector<int> argmax;      // h2, first-encountered winner per channel
  std::vector<double> a3, g1;   // h3
  Logits logits;
};

void run_forward(const ClassifierParams& p, const PointCloud& cloud, Workspace& ws) {
  const Architecture& a = p.arch;
  const std::size_t n = cloud.points.size();
  const std::size_t h1 = static_cast<std::size_t>(a.h1);
  const std::size_t h2 = static_cast<std::size_t>(a.h2);
  const std::size_t h3 = static_cast<std::size_t>(a.h3);
  const std::size_t k = static_cast<std::size_t>(a.k);

  ws.a1.resize(n * h1);
  ws.h1v.resize(n * h1);
  ws.a2.resize(n * h2);
  ws.pooled.assign(h2, -std::numeric_limits<double>::infinity());
  ws.argmax.assign(h2, 0);

  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& pt = cloud.points[i];
    double* a1 = ws.a1.data() + i * h1;
    double* h1v = ws.h1v.data() + i * h1;
    for (std::size_t j = 0; j < h1; ++j) {
      const double* w = p.w1.data() + j * 3;
      a1[j] = p.b1[j] + w[0] * pt.x + w[1] * pt.y + w[2] * pt.z;
      h1v[j] = smooth_relu(a1[j]);
    }
    double* a2 = ws.a2.data() + i * h2;
    for (std::size_t c = 0; c < h2; ++c) {
      const double* w = p.w2.data() + c * h1;
      double acc = p.b2[c];
      for (std::size_t j = 0; j < h1; ++j) acc += w[j] * h1v[j];
      a2[c] = acc;
      const double act = smooth_relu(acc);
      if (act > ws.pooled[c]) {
        ws.pooled[c] = act;
        ws.argmax[c] = static_cast<int>(i);
      }
    }
  }

  ws.a3.resize(h3);
  ws.g1.resize(h3);
  for (std::size_t j = 0; j < h3; ++j) {
    const double* w = p.w3.data() + j * h2;
    double acc = p.b3[j];
    for (std::size_t c = 0; c < h2; ++c) acc += w[c] * ws.pooled[c];
    ws.a3[j] = acc;
    ws.g1[j] = smooth_relu(acc);
  }

  ws.logits.assign(k, 0.0);
  for (std::size_t o = 0; o < k; ++o) {
    const double* w = p.w4.data() + o * h3;
    double acc = p.b4[o];
    for (std::size_t j = 0; j < h3; ++j) acc += w[j] * ws.g1[j];
    ws.logits[o] = acc;
  }
}

double log_sum_exp(std::span<const double> z) {
  const double m = *std::max_element(z.begin(), z.end());
  double acc = 0.0;
  for (const double v : z) acc += std::exp(v - m);
  return m + std::log(acc);
}

// Index of the best wrong-class logit; first index wins ties.
std::size_t best_wrong(std::span<const double> z, int label) {
  std::size_t best = label == 0 ? 1 : 0;
  for (std::size_t j = 0; j < z.size(); ++j)
    if (j != static_cast<std::size_t>(label) && z[j] > z[best]) best = j;
  return best;
}

}  // namespace

ClassifierParams init_params(const Architecture& arch, std::uint64_t seed) {
  validate_arch(arch);
  ClassifierParams p;
  p.arch = arch;
  p.seed = seed;
  Rng rng(seed);
  const auto fill = [&rng](std::vector<double>& w, int rows, int cols) {
    const double s = std::sqrt(6.0 / static_cast<double>(rows + cols));
    w.resize(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
    for (double& v : w) v = rng.uniform(-s, s);
  };
  fill(p.w1, arch.h1, 3);
  fill(p.w2, arch.h2, arch.h1);
  fill(p.w3, arch.h3, arch.h2);
  fill(p.w4, arch.k, arch.h3);
  p.b1.assign(static_cast<std::size_t>(arch.h1), 0.0);
  p.b2.assign(static_cast<std::size_t>(arch.h2), 0.0);
  p.b3.assign(static_cast<std::size_t>(arch.h3), 0.0);
  p.b4.assign(static_cast<std::size_t>(arch.k), 0.0);
  return p;
}

Logits forward(const ClassifierParams& params, const PointCloud& cloud) {
  validate_cloud(cloud);
  Workspace ws;
  run_forward(params, cloud, ws);
  return ws.logits;
}

Logits forward_with_argmax(const ClassifierParams& params, const PointCloud& cloud,
                           std::vector<int>& pool_argmax) {
  validate_cloud(cloud);
  Workspace ws;
  run_forward(params, cloud, ws);
  pool_argmax = ws.argmax;
  return ws.logits;
}

int predict(const ClassifierParams& params, const PointCloud& cloud) {
  const Logits z = forward(params, cloud);
  return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

double cross_entropy(std::span<const double> logits, int label) {
  validate_label(label, static_cast<int>(logits.size()));
  return log_sum_exp(logits) - logits[static_cast<std::size_t>(label)];
}

double cw_objective(std::span<const double> logits, int label) {
  if (logits.size() < 2) throw std::invalid_argument("cw_objective: need >= 2 classes");
  validate_label(label, static_cast<int>(logits.size()));
  return logits[best_wrong(logits, label)] - logits[static_cast<std::size_t>(label)];
}

double objective_value(std::span<const double> logits, int label, Objective obj) {
  return obj == Objective::kCrossEntropy ? cross_entropy(logits, label)
                                         : cw_objective(logits, label);
}

BackwardResult backward(const ClassifierParams& p, const PointCloud& cloud,
                        int label, Objective obj) {
  validate_cloud(cloud);
  validate_label(label, p.arch.k);

  Workspace ws;
  run_forward(p, cloud, ws);

  const Architecture& a = p.arch;
  const std::size_t n = cloud.points.size();
  const std::size_t h1 = static_cast<std::size_t>(a.h1);
  const std::size_t h2 = static_cast<std::size_t>(a.h2);
  const std::size_t h3 = static_cast<std::size_t>(a.h3);
  const std::size_t k = static_cast<std::size_t>(a.k);

  BackwardResult out;
  out.grads.w1.assign(p.w1.size(), 0.0);
  out.grads.b1.assign(p.b1.size(), 0.0);
  out.grads.w2.assign(p.w2.size(), 0.0);
  out.grads.b2.assign(p.b2.size(), 0.0);
  out.grads.w3.assign(p.w3.size(), 0.0);
  out.grads.b3.assign(p.b3.size(), 0.0);
  out.grads.w4.assign(p.w4.size(), 0.0);
  out.grads.b4.assign(p.b4.size(), 0.0);
  out.coord_grads.assign(n, Vec3{});

  // objective and dL/dlogits
  std::vector<double> dz(k, 0.0);
  if (obj == Objective::kCrossEntropy) {
    const double lse = log_sum_exp(ws.logits);
    out.loss = lse - ws.logits[static_cast<std::size_t>(label)];
    for (std::size_t j = 0; j < k; ++j) dz[j] = std::exp(ws.logits[j] - lse);
    dz[static_cast<std::size_t>(label)] -= 1.0;
  } else {
    const std::size_t jstar = best_wrong(ws.logits, label);
    out.loss = ws.logits[jstar] - ws.logits[static_cast<std::size_t>(label)];
    dz[jstar] += 1.0;
    dz[static_cast<std::size_t>(label)] -= 1.0;
  }

  // global head
  std::vector<double> dg1(h3, 0.0);
  for (std::size_t o = 0; o < k; ++o) {
    const double g = dz[o];
    if (g == 0.0) continue;
    const double* w = p.w4.data() + o * h3;
    double* dw = out.grads.w4.data() + o * h3;
    for (std::size_t j = 0; j < h3; ++j) {
      dw[j] += g * ws.g1[j];
      dg1[j] += g * w[j];
    }
    out.grads.b4[o] += g;
  }

  std::vector<double> dpool(h2, 0.0);
  for (std::size_t j = 0; j < h3; ++j) {
    const double da3 = dg1[j] * smooth_relu_grad(ws.a3[j]);
    if (da3 == 0.0) continue;
    const double* w = p.w3.data() + j * h2;
    double* dw = out.grads.w3.data() + j * h2;
    for (std::size_t c = 0; c < h2; ++c) {
      dw[c] += da3 * ws.pooled[c];
      dpool[c] += da3 * w[c];
    }
    out.grads.b3[j] += da3;
  }

  // pooling routes each channel's gradient to its winning point
  std::vector<double> dh1(h1);
  std::vector<std::vector<std::pair<int, double>>> per_point(n);
  for (std::size_t c = 0; c < h2; ++c)
    if (dpool[c] != 0.0)
      per_point[static_cast<std::size_t>(ws.argmax[c])].emplace_back(
          static_cast<int>(c), dpool[c]);

  for (std::size_t i = 0; i < n; ++i) {
    if (per_point[i].empty()) continue;
    std::fill(dh1.begin(), dh1.end(), 0.0);
    const double* h1v = ws.h1v.data() + i * h1;
    const double* a2 = ws.a2.data() + i * h2;
    for (const auto& [ci, g] : per_point[i]) {
      const std::size_t c = static_cast<std::size_t>(ci);
      const double da2 = g * smooth_relu_grad(a2[c]);
      const double* w = p.w2.data() + c * h1;
      double* dw = out.grads.w2.data() + c * h1;
      for (std::size_t j = 0; j < h1; ++j) {
        dw[j] += da2 * h1v[j];
        dh1[j] += da2 * w[j];
      }
      out.grads.b2[c] += da2;
    }
    const double* a1 = ws.a1.data() + i * h1;
    const Vec3& pt = cloud.points[i];
    Vec3 dp{};
    for (std::size_t j = 0; j < h1; ++j) {
      if (dh1[j] == 0.0) continue;
      const double da1 = dh1[j] * smooth_relu_grad(a1[j]);
      const double* w = p.w1.data() + j * 3;
      double* dw = out.grads.w1.data() + j * 3;
      dw[0] += da1 * pt.x;
      dw[1] += da1 * pt.y;
      dw[2] += da1 * pt.z;
      out.grads.b1[j] += da1;
      dp.x += da1 * w[0];
      dp.y += da1 * w[1];
      dp.z += da1 * w[2];
    }
    out.coord_grads[i] = dp;
  }
  return out;
}

void sgd_step(ClassifierParams& params, const ParamGradients& grads, double lr) {
  if (!(lr > 0.0)) throw std::invalid_argument("sgd_step: learning rate must be > 0");
  const auto apply = [lr](std::vector<double>& w, const std::vector<double>& g) {
    if (w.size() != g.size()) throw std::invalid_argument("sgd_step: shape mismatch");
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * g[i];
  };
  apply(params.w1, grads.w1);
  apply(params.b1, grads.b1);
  apply(params.w2, grads.w2);
  apply(params.b2, grads.b2);
  apply(params.w3, grads.w3);
  apply(params.b3, grads.b3);
  apply(params.w4, grads.w4);
  apply(params.b4, grads.b4);
}

// Checkpoint layout (little-endian):
//   magic "APCK" | u32 version=1 | u32 h1,h2,h3,k,pooling | u64 seed
//   tensors in order w1,b1,w2,b2,w3,b3,w4,b4 as raw f64 (sizes implied)
void save_checkpoint(const ClassifierParams& params, const std::string& path) {
  BinaryWriter w(path);
  w.write_magic("APCK");
  w.write_u32(1);
  w.write_u32(static_cast<std::uint32_t>(params.arch.h1));
  w.write_u32(static_cast<std::uint32_t>(params.arch.h2));
  w.write_u32(static_cast<std::uint32_t>(params.arch.h3));
  w.write_u32(static_cast<std::uint32_t>(params.arch.k));
  w.write_u32(static_cast<std::uint32_t>(params.arch.pooling));
  w.write_u64(params.seed);
  for (const auto* t : {&params.w1, &params.b1, &params.w2, &params.b2,
                        &params.w3, &params.b3, &params.w4, &params.b4})
    for (const double v : *t) w.write_f64(v);
  w.finish();
}

ClassifierParams load_checkpoint(const std::string& path) {
  BinaryReader r(path);
  r.expect_magic("APCK", "checkpoint");
  const std::uint32_t version = r.read_u32();
  if (version != 1)
    throw FormatError("load_checkpoint: unsupported version " + std::to_string(version));
  ClassifierParams p;
  p.arch.h1 = static_cast<int>(r.read_u32());
  p.arch.h2 = static_cast<int>(r.read_u32());
  p.arch.h3 = static_cast<int>(r.read_u32());
  p.arch.k = static_cast<int>(r.read_u32());
  const std::uint32_t pooling = r.read_u32();
  if (pooling != 0) throw FormatError("load_checkpoint: unknown pooling kind");
  p.arch.pooling = Pooling::kMax;
  validate_arch(p.arch);
  p.seed = r.read_u64();
  const auto read_tensor = [&r](std::vector<double>& t, std::size_t size) {
    t.resize(size);
    for (double& v : t) v = r.read_f64();
  };
  const std::size_t h1 = static_cast<std::size_t>(p.arch.h1);
  const std::size_t h2 = static_cast<std::size_t>(p.arch.h2);
  const std::size_t h3 = static_cast<std::size_t>(p.arch.h3);
  const std::size_t k = static_cast<std::size_t>(p.arch.k);
  read_tensor(p.w1, h1 * 3);
  read_tensor(p.b1, h1);
  read_tensor(p.w2, h2 * h1);
  read_tensor(p.b2, h2);
  read_tensor(p.w3, h3 * h2);
  read_tensor(p.b3, h3);
  read_tensor(p.w4, k * h3);
  read_tensor(p.b4, k);
  return p;
}

}  // namespace artpoint
