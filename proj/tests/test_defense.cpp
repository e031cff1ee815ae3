#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "artpoint/common.hpp"
#include "artpoint/defense.hpp"
#include "test_fixtures.hpp"

using namespace artpoint;

namespace {

AttackConfig quick_attack() {
  AttackConfig cfg;
  cfg.steps = 3;
  return cfg;
}

bool params_equal(const ClassifierParams& a, const ClassifierParams& b) {
  return a.w1 == b.w1 && a.b1 == b.b1 && a.w2 == b.w2 && a.b2 == b.b2 &&
         a.w3 == b.w3 && a.b3 == b.b3 && a.w4 == b.w4 && a.b4 == b.b4;
}

// mean cross-entropy of train samples rotated by fixed pool draws
double pool_rotated_loss(const ClassifierParams& params, const Dataset& ds,
                         const RotationPool& pool, std::uint64_t seed) {
  Rng rng(seed);
  double total = 0.0;
  for (const PointCloud& cloud : ds.train) {
    const PointCloud rotated =
        apply_rotation(compose(sample_rotation(pool, cloud.label, rng)), cloud);
    total += cross_entropy(forward(params, rotated), cloud.label);
  }
  return total / static_cast<double>(ds.train.size());
}

}  // namespace

TEST_CASE("build_pool stores model x sample entries grouped by class") {
  const Dataset& ds = testing::small_dataset();
  const ClassifierParams& model = testing::small_trained_model();

  AttackConfig cfg = quick_attack();
  cfg.bound = kPi / 4;
  const RotationPool pool = build_pool({&model, 1}, ds, cfg, 5, 2);
  CHECK(pool.size() == ds.train.size());
  CHECK(pool.bound == cfg.bound);

  std::vector<int> per_class(8, 0);
  for (const PointCloud& c : ds.train) ++per_class[static_cast<std::size_t>(c.label)];
  for (const auto& [cls, entries] : pool.by_class) {
    CHECK(entries.size() == static_cast<std::size_t>(per_class[static_cast<std::size_t>(cls)]));
    for (const PoolEntry& e : entries) {
      CHECK(std::abs(e.angles.phi_x) <= cfg.bound);
      CHECK(std::abs(e.angles.phi_y) <= cfg.bound);
      CHECK(std::abs(e.angles.phi_z) <= cfg.bound);
      CHECK(e.source_model == 0);
    }
  }

  const std::vector<ClassifierParams> three = {model, model, model};
  const RotationPool big = build_pool(three, ds, cfg, 5, 2);
  CHECK(big.size() == 3 * ds.train.size());
  for (const auto& [cls, entries] : big.by_class)
    CHECK(entries.size() ==
          3 * static_cast<std::size_t>(per_class[static_cast<std::size_t>(cls)]));
}

TEST_CASE("sample_rotation draws uniformly within a class") {
  RotationPool pool;
  pool.by_class[2] = {{{0.1, 0.2, 0.3}, 0, 7}};
  pool.by_class[5] = {{{0.5, 0.0, 0.0}, 0, 1}, {{-0.5, 0.0, 0.0}, 0, 2}};

  Rng rng(3);
  const EulerAngles only = sample_rotation(pool, 2, rng);
  CHECK(only.phi_x == 0.1);
  CHECK(only.phi_z == 0.3);

  int first = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i)
    if (sample_rotation(pool, 5, rng).phi_x > 0) ++first;
  const double freq = static_cast<double>(first) / n;
  CHECK(freq > 0.45);
  CHECK(freq < 0.55);

  CHECK_THROWS_AS(sample_rotation(pool, 4, rng), PoolMissError);
}

TEST_CASE("adversarial_retrain lowers pool-rotated loss deterministically") {
  const Dataset& ds = testing::small_dataset();
  const ClassifierParams& model = testing::small_trained_model();
  const RotationPool pool = build_pool({&model, 1}, ds, quick_attack(), 5, 2);

  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.lr = 0.02;
  const double before = pool_rotated_loss(model, ds, pool, 1234);
  const ClassifierParams after_params = adversarial_retrain(model, ds, pool, cfg, false, 88);
  const double after = pool_rotated_loss(after_params, ds, pool, 1234);
  CHECK(after < before);
  CHECK_FALSE(params_equal(after_params, model));

  const ClassifierParams rerun = adversarial_retrain(model, ds, pool, cfg, false, 88);
  CHECK(params_equal(after_params, rerun));

  // a pool missing one class is rejected
  RotationPool partial = pool;
  partial.by_class.erase(3);
  CHECK_THROWS_AS(adversarial_retrain(model, ds, partial, cfg, false, 88), PoolMissError);

  TrainConfig bad = cfg;
  bad.epochs = 0;
  CHECK_THROWS_AS(adversarial_retrain(model, ds, pool, bad, false, 88), ConfigError);
}

TEST_CASE("fixed_rotation_retrain trains on each sample's own rotation") {
  const Dataset& ds = testing::small_dataset();
  const ClassifierParams& model = testing::small_trained_model();
  const auto records =
      attack_dataset(model, ds.train, ds.train_ids, quick_attack(), 7, 2);

  TrainConfig cfg;
  cfg.epochs = 2;
  const ClassifierParams a = fixed_rotation_retrain(model, ds, records, cfg, 31);
  const ClassifierParams b = fixed_rotation_retrain(model, ds, records, cfg, 31);
  CHECK(params_equal(a, b));
  CHECK_FALSE(params_equal(a, model));

  std::vector<AttackRecord> missing(records.begin(), records.end() - 1);
  CHECK_THROWS_AS(fixed_rotation_retrain(model, ds, missing, cfg, 31),
                  std::invalid_argument);
}

TEST_CASE("one_step_optimize with ensemble {target} equals one iterative iteration") {
  const Dataset& ds = testing::small_dataset();
  const ClassifierParams& model = testing::small_trained_model();

  DefenseConfig cfg;
  cfg.iterations = 1;
  cfg.retrain.epochs = 2;
  cfg.retrain.lr = 0.02;

  const auto [iter_params, reports] =
      iterative_optimize(model, ds, quick_attack(), cfg, 61, 2);
  CHECK(reports.size() == 1);
  CHECK(reports[0].protocol == "random");

  const ClassifierParams one_step =
      one_step_optimize(model, {&model, 1}, ds, quick_attack(), cfg, 61, 2);
  CHECK(params_equal(iter_params, one_step));
}

TEST_CASE("iterative_optimize reports one row per iteration") {
  const Dataset& ds = testing::small_dataset();
  const ClassifierParams& model = testing::small_trained_model();
  DefenseConfig cfg;
  cfg.iterations = 3;
  cfg.retrain.epochs = 1;
  const auto [params, reports] = iterative_optimize(model, ds, quick_attack(), cfg, 4, 2);
  CHECK(reports.size() == 3);
  for (const EvalReport& r : reports) {
    CHECK(r.accuracy >= 0.0);
    CHECK(r.accuracy <= 1.0);
    CHECK(r.n_samples == static_cast<int>(ds.test.size()));
  }
  CHECK_FALSE(params_equal(params, model));

  DefenseConfig bad = cfg;
  bad.iterations = 0;
  CHECK_THROWS_AS(iterative_optimize(model, ds, quick_attack(), bad, 4, 1), ConfigError);
}

TEST_CASE("mix_clean interleaves clean steps") {
  const Dataset& ds = testing::small_dataset();
  const ClassifierParams& model = testing::small_trained_model();
  const RotationPool pool = build_pool({&model, 1}, ds, quick_attack(), 5, 2);
  TrainConfig cfg;
  cfg.epochs = 1;
  const ClassifierParams adversarial_only = adversarial_retrain(model, ds, pool, cfg, false, 3);
  const ClassifierParams mixed = adversarial_retrain(model, ds, pool, cfg, true, 3);
  CHECK_FALSE(params_equal(adversarial_only, mixed));
  const ClassifierParams mixed2 = adversarial_retrain(model, ds, pool, cfg, true, 3);
  CHECK(params_equal(mixed, mixed2));
}

TEST_CASE("rotation augmentation beats clean training under random rotations") {
  const Dataset& ds = testing::small_dataset();
  TrainConfig cfg;
  cfg.epochs = 15;
  cfg.lr = 0.05;
  const ClassifierParams init = init_params(testing::small_arch(), 2);
  const ClassifierParams ra = rotation_augment_train(init, ds, cfg, kPi, 10);
  const ClassifierParams clean = clean_train(init, ds, cfg, 10);
  const double ra_acc = evaluate(ra, ds.test, Protocol::random(kPi), 9, 2).accuracy;
  const double clean_acc = evaluate(clean, ds.test, Protocol::random(kPi), 9, 2).accuracy;
  CHECK(ra_acc > clean_acc);
}

TEST_CASE("training baselines are deterministic under a fixed seed") {
  const Dataset& ds = testing::small_dataset();
  const ClassifierParams init = init_params(testing::small_arch(), 2);
  TrainConfig cfg;
  cfg.epochs = 2;

  const ClassifierParams ra1 = rotation_augment_train(init, ds, cfg, kPi, 10);
  const ClassifierParams ra2 = rotation_augment_train(init, ds, cfg, kPi, 10);
  CHECK(params_equal(ra1, ra2));
  CHECK_FALSE(params_equal(ra1, init));

  const ClassifierParams c1 = clean_train(init, ds, cfg, 10);
  const ClassifierParams c2 = clean_train(init, ds, cfg, 10);
  CHECK(params_equal(c1, c2));
  CHECK_FALSE(params_equal(c1, ra1));
}

TEST_CASE("rotation pool CSV round-trips") {
  const Dataset& ds = testing::small_dataset();
  const ClassifierParams& model = testing::small_trained_model();
  const RotationPool pool = build_pool({&model, 1}, ds, quick_attack(), 5, 2);

  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / "artpoint_pool.csv";
  save_pool_csv(pool, path.string());
  const RotationPool loaded = load_pool_csv(path.string());
  REQUIRE(loaded.size() == pool.size());
  for (const auto& [cls, entries] : pool.by_class) {
    REQUIRE(loaded.by_class.count(cls) == 1);
    const auto& other = loaded.by_class.at(cls);
    REQUIRE(other.size() == entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      CHECK(other[i].angles.phi_x == entries[i].angles.phi_x);  // exact round trip
      CHECK(other[i].angles.phi_y == entries[i].angles.phi_y);
      CHECK(other[i].angles.phi_z == entries[i].angles.phi_z);
      CHECK(other[i].source_model == entries[i].source_model);
      CHECK(other[i].source_sample == entries[i].source_sample);
    }
  }

  const fs::path bad = fs::temp_directory_path() / "artpoint_pool_bad.csv";
  {
    std::ofstream out(bad);
    out << "class_id,source_model,source_sample,phi_x,phi_y,phi_z\n";
    out << "0,0,0,9.9,0.0,0.0\n";  // angle outside [-pi, pi]
  }
  CHECK_THROWS_AS(load_pool_csv(bad.string()), ParseError);
  fs::remove(path);
  fs::remove(bad);
}
