#include "artpoint/defense.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "artpoint/common.hpp"
#include "artpoint/geometry.hpp"
#include "artpoint/io_util.hpp"

namespace artpoint {

namespace {

constexpr std::uint64_t kStreamPoolModel = 0x504f4f4cu;
constexpr std::uint64_t kStreamRetrainIter = 0x5254524eu;
constexpr std::uint64_t kStreamPoolIter = 0x504c4954u;
constexpr std::uint64_t kStreamIterEval = 0x49544556u;
constexpr std::uint64_t kStreamEpoch = 0x45504f43u;

void validate_train(const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw ConfigError("train: epochs must be >= 1");
  if (!(cfg.lr > 0.0)) throw ConfigError("train: learning rate must be > 0");
  if (!(cfg.lr_decay > 0.0)) throw ConfigError("train: lr decay must be > 0");
}

void check_class_coverage(const Dataset& ds) {
  std::vector<int> counts(static_cast<std::size_t>(ds.num_classes()), 0);
  for (const PointCloud& c : ds.train) ++counts.at(static_cast<std::size_t>(c.label));
  for (std::size_t k = 0; k < counts.size(); ++k)
    if (counts[k] == 0)
      throw ConfigError("dataset: class " + std::to_string(k) + " has no train samples");
}

template <typename T>
void shuffle_in_place(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng.uniform_index(i)]);
}

// Common SGD loop: transform(rng, sample_index) supplies the training view of
// each cloud for the current epoch.
template <typename TransformFn>
ClassifierParams sgd_train(ClassifierParams params, const Dataset& ds,
                           const TrainConfig& cfg, bool mix_clean, std::uint64_t seed,
                           TransformFn&& transform) {
  validate_train(cfg);
  if (ds.train.empty()) throw std::invalid_argument("train: empty train split");

  std::vector<std::size_t> order(ds.train.size());
  double lr = cfg.lr;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng rng(derive_seed(seed, kStreamEpoch, static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle_in_place(order, rng);
    for (const std::size_t idx : order) {
      const PointCloud view = transform(rng, idx);
      const BackwardResult bw =
          backward(params, view, view.label, Objective::kCrossEntropy);
      sgd_step(params, bw.grads, lr);
      if (mix_clean) {
        const BackwardResult clean_bw = backward(params, ds.train[idx],
                                                 ds.train[idx].label,
                                                 Objective::kCrossEntropy);
        sgd_step(params, clean_bw.grads, lr);
      }
    }
    lr *= cfg.lr_decay;
  }
  return params;
}

}  // namespace

RotationPool build_pool(std::span<const ClassifierParams> models, const Dataset& ds,
                        const AttackConfig& attack_cfg, std::uint64_t seed,
                        int workers) {
  if (models.empty()) throw std::invalid_argument("build_pool: no models");
  check_class_coverage(ds);

  RotationPool pool;
  pool.bound = attack_cfg.bound;
  for (std::size_t m = 0; m < models.size(); ++m) {
    const std::vector<AttackRecord> records = attack_dataset(
        models[m], ds.train, ds.train_ids, attack_cfg,
        derive_seed(seed, kStreamPoolModel, m), workers);
    for (const AttackRecord& r : records)
      pool.by_class[r.class_id].push_back(
          {r.angles, static_cast<int>(m), r.sample_id});
  }
  return pool;
}

EulerAngles sample_rotation(const RotationPool& pool, int class_id, Rng& rng) {
  const auto it = pool.by_class.find(class_id);
  if (it == pool.by_class.end() || it->second.empty())
    throw PoolMissError("sample_rotation: no pool entries for class " +
                        std::to_string(class_id));
  return it->second[rng.uniform_index(it->second.size())].angles;
}

ClassifierParams adversarial_retrain(ClassifierParams params, const Dataset& ds,
                                     const RotationPool& pool, const TrainConfig& cfg,
                                     bool mix_clean, std::uint64_t seed) {
  for (const PointCloud& c : ds.train)
    if (!pool.by_class.count(c.label) || pool.by_class.at(c.label).empty())
      throw PoolMissError("adversarial_retrain: pool is missing class " +
                          std::to_string(c.label));
  return sgd_train(std::move(params), ds, cfg, mix_clean, seed,
                   [&](Rng& rng, std::size_t idx) {
                     const PointCloud& cloud = ds.train[idx];
                     const EulerAngles angles =
                         sample_rotation(pool, cloud.label, rng);
                     return apply_rotation(compose(angles), cloud);
                   });
}

ClassifierParams fixed_rotation_retrain(ClassifierParams params, const Dataset& ds,
                                        std::span<const AttackRecord> records,
                                        const TrainConfig& cfg, std::uint64_t seed) {
  std::map<int, EulerAngles> by_id;
  for (const AttackRecord& r : records) by_id[r.sample_id] = r.angles;
  for (const int id : ds.train_ids)
    if (!by_id.count(id))
      throw std::invalid_argument("fixed_rotation_retrain: missing record for sample " +
                                  std::to_string(id));
  return sgd_train(std::move(params), ds, cfg, /*mix_clean=*/false, seed,
                   [&](Rng&, std::size_t idx) {
                     const EulerAngles& angles = by_id.at(ds.train_ids[idx]);
                     return apply_rotation(compose(angles), ds.train[idx]);
                   });
}

std::pair<ClassifierParams, std::vector<EvalReport>> iterative_optimize(
    ClassifierParams params, const Dataset& ds, const AttackConfig& attack_cfg,
    const DefenseConfig& cfg, std::uint64_t seed, int workers) {
  if (cfg.iterations < 1) throw ConfigError("iterative_optimize: iterations must be >= 1");
  std::vector<EvalReport> reports;
  reports.reserve(static_cast<std::size_t>(cfg.iterations));
  for (int t = 0; t < cfg.iterations; ++t) {
    // the pool is rebuilt from the CURRENT model and replaces the previous one
    const ClassifierParams snapshot = params;
    const RotationPool pool =
        build_pool(std::span(&snapshot, 1), ds, attack_cfg,
                   derive_seed(seed, kStreamPoolIter, static_cast<std::uint64_t>(t)),
                   workers);
    params = adversarial_retrain(
        std::move(params), ds, pool, cfg.retrain, cfg.mix_clean,
        derive_seed(seed, kStreamRetrainIter, static_cast<std::uint64_t>(t)));
    reports.push_back(evaluate(
        params, ds.test, Protocol::random(attack_cfg.bound),
        derive_seed(seed, kStreamIterEval, static_cast<std::uint64_t>(t)), workers));
  }
  return {std::move(params), std::move(reports)};
}

ClassifierParams one_step_optimize(ClassifierParams target,
                                   std::span<const ClassifierParams> ensemble,
                                   const Dataset& ds, const AttackConfig& attack_cfg,
                                   const DefenseConfig& cfg, std::uint64_t seed,
                                   int workers) {
  if (ensemble.empty()) throw ConfigError("one_step_optimize: empty ensemble");
  const RotationPool pool = build_pool(
      ensemble, ds, attack_cfg, derive_seed(seed, kStreamPoolIter, 0), workers);
  return adversarial_retrain(std::move(target), ds, pool, cfg.retrain, cfg.mix_clean,
                             derive_seed(seed, kStreamRetrainIter, 0));
}

ClassifierParams clean_train(ClassifierParams params, const Dataset& ds,
                             const TrainConfig& cfg, std::uint64_t seed) {
  return sgd_train(std::move(params), ds, cfg, /*mix_clean=*/false, seed,
                   [&](Rng&, std::size_t idx) { return ds.train[idx]; });
}

ClassifierParams rotation_augment_train(ClassifierParams params, const Dataset& ds,
                                        const TrainConfig& cfg, double bound,
                                        std::uint64_t seed) {
  return sgd_train(std::move(params), ds, cfg, /*mix_clean=*/false, seed,
                   [&](Rng& rng, std::size_t idx) {
                     return apply_rotation(compose(random_angles(bound, rng)),
                                           ds.train[idx]);
                   });
}

void save_pool_csv(const RotationPool& pool, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_pool_csv: cannot open " + path);
  out << "class_id,source_model,source_sample,phi_x,phi_y,phi_z\n";
  for (const auto& [cls, entries] : pool.by_class)
    for (const PoolEntry& e : entries)
      out << cls << ',' << e.source_model << ',' << e.source_sample << ','
          << format_double(e.angles.phi_x) << ',' << format_double(e.angles.phi_y)
          << ',' << format_double(e.angles.phi_z) << '\n';
  if (!out) throw IoError("save_pool_csv: write failed for " + path);
}

RotationPool load_pool_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_pool_csv: cannot open " + path);
  RotationPool pool;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError("load_pool_csv: empty file", 1);
  ++lineno;
  if (line != "class_id,source_model,source_sample,phi_x,phi_y,phi_z")
    throw ParseError("load_pool_csv: unexpected header", lineno);
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    PoolEntry e;
    int cls = 0;
    char comma = ',';
    if (!(row >> cls >> comma >> e.source_model >> comma >> e.source_sample >> comma >>
          e.angles.phi_x >> comma >> e.angles.phi_y >> comma >> e.angles.phi_z))
      throw ParseError("load_pool_csv: malformed row", lineno);
    if (std::abs(e.angles.phi_x) > kPi || std::abs(e.angles.phi_y) > kPi ||
        std::abs(e.angles.phi_z) > kPi)
      throw ParseError("load_pool_csv: angle outside [-pi, pi]", lineno);
    pool.by_class[cls].push_back(e);
  }
  return pool;
}

}  // namespace artpoint
