#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "artpoint/attack.hpp"
#include "artpoint/common.hpp"
#include "test_fixtures.hpp"

using namespace artpoint;

namespace {

// angles after exactly t steps, reconstructed by rerunning with the same seed
EulerAngles angles_after(const ClassifierParams& model, const PointCloud& cloud,
                         const AttackConfig& base, int t, std::uint64_t seed,
                         bool axis_wise) {
  AttackConfig cfg = base;
  cfg.steps = t;
  Rng rng(seed);
  return axis_wise ? axis_wise_attack(model, cloud, cloud.label, cfg, rng).angles
                   : standard_attack(model, cloud, cloud.label, cfg, rng).angles;
}

int changed_components(const EulerAngles& a, const EulerAngles& b) {
  int n = 0;
  if (a.phi_x != b.phi_x) ++n;
  if (a.phi_y != b.phi_y) ++n;
  if (a.phi_z != b.phi_z) ++n;
  return n;
}

}  // namespace

TEST_CASE("random_angles covers the box uniformly and deterministically") {
  Rng a(77), b(77);
  const EulerAngles first = random_angles(kPi, a);
  const EulerAngles second = random_angles(kPi, b);
  CHECK(first.phi_x == second.phi_x);
  CHECK(first.phi_y == second.phi_y);
  CHECK(first.phi_z == second.phi_z);

  Rng rng(123);
  double mean[3] = {0, 0, 0};
  bool pos[3] = {false, false, false}, neg[3] = {false, false, false};
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const EulerAngles draw = random_angles(kPi, rng);
    const double v[3] = {draw.phi_x, draw.phi_y, draw.phi_z};
    for (int c = 0; c < 3; ++c) {
      CHECK(std::abs(v[c]) <= kPi);
      mean[c] += v[c];
      pos[c] |= v[c] > 0;
      neg[c] |= v[c] < 0;
    }
  }
  for (int c = 0; c < 3; ++c) {
    CHECK(std::abs(mean[c] / n) < 0.05);
    CHECK(pos[c]);
    CHECK(neg[c]);
  }

  Rng r2(5);
  const EulerAngles quarter = random_angles(kPi / 4, r2);
  CHECK(std::abs(quarter.phi_x) <= kPi / 4);
  CHECK_THROWS_AS(random_angles(0.0, r2), std::invalid_argument);
}

TEST_CASE("axis_wise_attack contract: T=0 no-op, trace length, rigid adversary") {
  const ClassifierParams& model = testing::small_trained_model();
  const PointCloud& cloud = testing::small_dataset().test[0];

  AttackConfig cfg;
  cfg.steps = 0;
  cfg.random_start = false;
  Rng rng(1);
  const AttackOutcome noop = axis_wise_attack(model, cloud, cloud.label, cfg, rng);
  CHECK(noop.trace.size() == 1);
  CHECK(noop.angles.phi_x == 0.0);
  CHECK(noop.angles.phi_y == 0.0);
  CHECK(noop.angles.phi_z == 0.0);
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    CHECK(noop.adversarial.points[i].x == doctest::Approx(cloud.points[i].x));
    CHECK(noop.adversarial.points[i].z == doctest::Approx(cloud.points[i].z));
  }

  cfg.steps = 7;
  cfg.random_start = true;
  Rng rng2(9);
  const AttackOutcome outcome = axis_wise_attack(model, cloud, cloud.label, cfg, rng2);
  CHECK(outcome.trace.size() == 8);
  CHECK(std::abs(outcome.angles.phi_x) <= cfg.bound);
  CHECK(std::abs(outcome.angles.phi_y) <= cfg.bound);
  CHECK(std::abs(outcome.angles.phi_z) <= cfg.bound);

  // adversarial cloud is the original input under the final rotation
  const PointCloud expected = apply_rotation(compose(outcome.angles), cloud);
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    CHECK(outcome.adversarial.points[i].x == expected.points[i].x);
    CHECK(outcome.adversarial.points[i].y == expected.points[i].y);
  }

  // rigid: pairwise distances survive
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = i + 1; j < 10; ++j) {
      const double before = (cloud.points[i] - cloud.points[j]).norm();
      const double after =
          (outcome.adversarial.points[i] - outcome.adversarial.points[j]).norm();
      CHECK(std::abs(before - after) < 1e-9);
    }

  CHECK_THROWS_AS(axis_wise_attack(model, cloud, 99, cfg, rng2), std::invalid_argument);
  AttackConfig bad = cfg;
  bad.step_size = 0.0;
  CHECK_THROWS_AS(axis_wise_attack(model, cloud, cloud.label, bad, rng2), ConfigError);
}

TEST_CASE("axis_wise_attack moves exactly one axis per step by at most alpha") {
  const ClassifierParams& model = testing::small_trained_model();
  AttackConfig cfg;
  cfg.steps = 6;
  const std::uint64_t seed = 314;

  for (std::size_t s = 0; s < 4; ++s) {
    const PointCloud& cloud = testing::small_dataset().test[s];
    EulerAngles prev = angles_after(model, cloud, cfg, 0, seed, true);
    for (int t = 1; t <= cfg.steps; ++t) {
      const EulerAngles cur = angles_after(model, cloud, cfg, t, seed, true);
      CHECK(changed_components(prev, cur) <= 1);
      for (const Axis a : {Axis::kX, Axis::kY, Axis::kZ})
        CHECK(std::abs(cur[a] - prev[a]) <= cfg.step_size + 1e-12);
      CHECK(std::abs(cur.phi_x) <= cfg.bound);
      prev = cur;
    }
  }
}

TEST_CASE("attack is deterministic without random start") {
  const ClassifierParams& model = testing::small_trained_model();
  const PointCloud& cloud = testing::small_dataset().test[2];
  AttackConfig cfg;
  cfg.steps = 5;
  cfg.random_start = false;
  Rng r1(1), r2(999);  // generators unused when random start is off
  const AttackOutcome a = axis_wise_attack(model, cloud, cloud.label, cfg, r1);
  const AttackOutcome b = axis_wise_attack(model, cloud, cloud.label, cfg, r2);
  CHECK(a.angles.phi_x == b.angles.phi_x);
  CHECK(a.angles.phi_y == b.angles.phi_y);
  CHECK(a.angles.phi_z == b.angles.phi_z);
  CHECK(a.trace == b.trace);
}

TEST_CASE("attack budget: mean objective grows with T on the test split") {
  const ClassifierParams& model = testing::small_trained_model();
  const Dataset& ds = testing::small_dataset();
  AttackConfig cfg;
  cfg.steps = 10;

  double mean1 = 0.0, mean5 = 0.0, mean10 = 0.0;
  for (std::size_t s = 0; s < ds.test.size(); ++s) {
    Rng rng(derive_seed(555, 1, s));
    const AttackOutcome outcome =
        axis_wise_attack(model, ds.test[s], ds.test[s].label, cfg, rng);
    // with a shared start, the T=1/5/10 finals are prefixes of one trajectory
    mean1 += outcome.trace[1];
    mean5 += outcome.trace[5];
    mean10 += outcome.trace[10];
  }
  mean1 /= static_cast<double>(ds.test.size());
  mean5 /= static_cast<double>(ds.test.size());
  mean10 /= static_cast<double>(ds.test.size());
  CHECK(mean5 > mean1);
  CHECK(mean10 > mean5);
}

TEST_CASE("standard_attack stands still on zero gradients and can move all axes") {
  // zeroed output head kills every gradient upstream
  ClassifierParams flat = init_params(testing::small_arch(), 4);
  std::fill(flat.w4.begin(), flat.w4.end(), 0.0);
  const PointCloud& cloud = testing::small_dataset().test[1];

  AttackConfig cfg;
  cfg.steps = 4;
  Rng rng(42), rng_replay(42);
  const AttackOutcome stuck = standard_attack(flat, cloud, cloud.label, cfg, rng);
  const EulerAngles start = random_angles(cfg.bound, rng_replay);
  CHECK(stuck.angles.phi_x == start.phi_x);
  CHECK(stuck.angles.phi_y == start.phi_y);
  CHECK(stuck.angles.phi_z == start.phi_z);

  // against a real model, some step moves more than one axis
  const ClassifierParams& model = testing::small_trained_model();
  const std::uint64_t seed = 271;
  int multi_axis_steps = 0;
  EulerAngles prev = angles_after(model, cloud, cfg, 0, seed, false);
  for (int t = 1; t <= cfg.steps; ++t) {
    const EulerAngles cur = angles_after(model, cloud, cfg, t, seed, false);
    if (changed_components(prev, cur) >= 2) ++multi_axis_steps;
    prev = cur;
  }
  CHECK(multi_axis_steps > 0);
}

TEST_CASE("random_rotation_attack draws within the bound, deterministically") {
  const ClassifierParams& model = testing::small_trained_model();
  const PointCloud& cloud = testing::small_dataset().test[3];
  Rng r1(8), r2(8);
  const AttackOutcome a =
      random_rotation_attack(model, cloud, cloud.label, kPi / 4, Objective::kCw, r1);
  const AttackOutcome b =
      random_rotation_attack(model, cloud, cloud.label, kPi / 4, Objective::kCw, r2);
  CHECK(a.trace.size() == 1);
  CHECK(std::abs(a.angles.phi_x) <= kPi / 4);
  CHECK(std::abs(a.angles.phi_y) <= kPi / 4);
  CHECK(std::abs(a.angles.phi_z) <= kPi / 4);
  CHECK(a.angles.phi_z == b.angles.phi_z);
  CHECK(a.trace[0] == b.trace[0]);
}

TEST_CASE("attack_dataset emits one stable record per sample") {
  const ClassifierParams& model = testing::small_trained_model();
  const Dataset& ds = testing::small_dataset();
  AttackConfig cfg;
  cfg.steps = 3;

  const auto records =
      attack_dataset(model, ds.test, ds.test_ids, cfg, 99, /*workers=*/1);
  REQUIRE(records.size() == ds.test.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].sample_id == ds.test_ids[i]);
    CHECK(records[i].class_id == ds.test[i].label);
    CHECK(std::abs(records[i].angles.phi_x) <= cfg.bound);
  }

  // same seed -> identical; parallel == serial
  const auto again = attack_dataset(model, ds.test, ds.test_ids, cfg, 99, 1);
  const auto parallel = attack_dataset(model, ds.test, ds.test_ids, cfg, 99, 2, 4);
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].angles.phi_x == again[i].angles.phi_x);
    CHECK(records[i].final_objective == again[i].final_objective);
    CHECK(records[i].angles.phi_x == parallel[i].angles.phi_x);
    CHECK(records[i].final_objective == parallel[i].final_objective);
  }

  const auto path = std::filesystem::temp_directory_path() / "artpoint_records.csv";
  save_attack_records_csv(records, path.string());
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "sample_id,class_id,phi_x,phi_y,phi_z,final_objective");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) ++rows;
  CHECK(rows == records.size());
  std::filesystem::remove(path);
}
