#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "artpoint/geometry.hpp"
#include "artpoint/gradcheck.hpp"
#include "artpoint/nn.hpp"
#include "artpoint/rng.hpp"
#include "test_fixtures.hpp"

using namespace artpoint;

namespace {

bool approx_vec(const Vec3& a, const Vec3& b, double tol = 1e-12) {
  return std::abs(a.x - b.x) < tol && std::abs(a.y - b.y) < tol &&
         std::abs(a.z - b.z) < tol;
}

// independent 3x3 product for cross-checking compose()
RotationMatrix brute_product(const RotationMatrix& a, const RotationMatrix& b) {
  RotationMatrix out;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += a(r, k) * b(k, c);
      out(r, c) = acc;
    }
  return out;
}

}  // namespace

TEST_CASE("axis_rotation matches the analytic quarter turns") {
  const RotationMatrix id = axis_rotation(Axis::kZ, 0.0);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) CHECK(id(r, c) == doctest::Approx(r == c ? 1.0 : 0.0));

  CHECK(approx_vec(axis_rotation(Axis::kZ, kPi / 2).apply({1, 0, 0}), {0, 1, 0}));
  CHECK(approx_vec(axis_rotation(Axis::kX, kPi / 2).apply({0, 0, 1}), {0, -1, 0}));

  CHECK_THROWS_AS(axis_rotation(Axis::kX, std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(axis_rotation(Axis::kY, INFINITY), std::invalid_argument);
}

TEST_CASE("compose applies Rz * Ry * Rx") {
  const EulerAngles zero{};
  const RotationMatrix id = compose(zero);
  CHECK(id.orthonormality_error() < 1e-15);
  CHECK(approx_vec(id.apply({0.3, -0.7, 0.2}), {0.3, -0.7, 0.2}));

  // quarter turn about x then z moves e_z onto e_x
  const EulerAngles a{kPi / 2, 0.0, kPi / 2};
  CHECK(approx_vec(compose(a).apply({0, 0, 1}), {1, 0, 0}, 1e-12));

  // cross-check against an explicit matrix product for random angles
  Rng rng(31);
  for (int i = 0; i < 50; ++i) {
    const EulerAngles phi{rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi),
                          rng.uniform(-kPi, kPi)};
    const RotationMatrix expected = brute_product(
        axis_rotation(Axis::kZ, phi.phi_z),
        brute_product(axis_rotation(Axis::kY, phi.phi_y),
                      axis_rotation(Axis::kX, phi.phi_x)));
    const RotationMatrix got = compose(phi);
    for (int e = 0; e < 9; ++e) CHECK(got.m[e] == doctest::Approx(expected.m[e]).epsilon(1e-12));
  }

  CHECK_THROWS_AS(compose({0.0, std::nan(""), 0.0}), std::invalid_argument);
}

TEST_CASE("compose yields proper rotations for any angles") {
  Rng rng(47);
  for (int i = 0; i < 2000; ++i) {
    const RotationMatrix r = compose({rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi),
                                      rng.uniform(-kPi, kPi)});
    CHECK(r.orthonormality_error() < 1e-9);
    CHECK(std::abs(r.det() - 1.0) < 1e-9);
  }
}

TEST_CASE("apply_rotation is rigid and label-preserving") {
  PointCloud cloud;
  cloud.label = 3;
  cloud.points = {{1, 0, 0}, {0, 1, 0}};

  const PointCloud same = apply_rotation(compose({}), cloud);
  CHECK(same.label == 3);
  CHECK(approx_vec(same.points[0], cloud.points[0]));

  const PointCloud flipped = apply_rotation(axis_rotation(Axis::kZ, kPi), cloud);
  CHECK(approx_vec(flipped.points[0], {-1, 0, 0}));
  CHECK(approx_vec(flipped.points[1], {0, -1, 0}));

  // pairwise distances and max norm survive a random rotation
  Rng rng(5);
  PointCloud big;
  big.label = 1;
  for (int i = 0; i < 40; ++i)
    big.points.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
  const RotationMatrix r = compose({rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi),
                                    rng.uniform(-kPi, kPi)});
  const PointCloud rotated = apply_rotation(r, big);
  REQUIRE(rotated.points.size() == big.points.size());
  double max_before = 0.0, max_after = 0.0;
  for (std::size_t i = 0; i < big.points.size(); ++i) {
    max_before = std::max(max_before, big.points[i].norm());
    max_after = std::max(max_after, rotated.points[i].norm());
    for (std::size_t j = i + 1; j < big.points.size(); ++j) {
      const double before = (big.points[i] - big.points[j]).norm();
      const double after = (rotated.points[i] - rotated.points[j]).norm();
      CHECK(std::abs(before - after) < 1e-9);
    }
  }
  CHECK(std::abs(max_before - max_after) < 1e-9);

  CHECK_THROWS_AS(apply_rotation(r, PointCloud{}), std::invalid_argument);
}

TEST_CASE("angle_gradients matches direct substitution") {
  {
    const Vec3 p{1, 0, 0}, g{0, 1, 0};
    const AngleGradient grad = angle_gradients({&p, 1}, {&g, 1});
    CHECK(grad.d_phi_x == doctest::Approx(0.0));
    CHECK(grad.d_phi_y == doctest::Approx(0.0));
    CHECK(grad.d_phi_z == doctest::Approx(1.0));
  }
  {
    const Vec3 p{0, 0, 1}, g{1, 0, 0};
    const AngleGradient grad = angle_gradients({&p, 1}, {&g, 1});
    CHECK(grad.d_phi_x == doctest::Approx(0.0));
    CHECK(grad.d_phi_y == doctest::Approx(1.0));
    CHECK(grad.d_phi_z == doctest::Approx(0.0));
  }

  const std::vector<Vec3> pts = {{1, 2, 3}};
  const std::vector<Vec3> grads = {{1, 0, 0}, {0, 1, 0}};
  CHECK_THROWS_AS(angle_gradients(pts, grads), std::invalid_argument);
}

TEST_CASE("angle_gradients is linear in the coordinate gradients") {
  Rng rng(99);
  std::vector<Vec3> pts, g1, g2, mix;
  const double a = 0.7, b = -2.3;
  for (int i = 0; i < 25; ++i) {
    pts.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    g1.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    g2.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    mix.push_back(g1.back() * a + g2.back() * b);
  }
  const AngleGradient lhs = angle_gradients(pts, mix);
  const AngleGradient r1 = angle_gradients(pts, g1);
  const AngleGradient r2 = angle_gradients(pts, g2);
  CHECK(lhs.d_phi_x == doctest::Approx(a * r1.d_phi_x + b * r2.d_phi_x).epsilon(1e-12));
  CHECK(lhs.d_phi_y == doctest::Approx(a * r1.d_phi_y + b * r2.d_phi_y).epsilon(1e-12));
  CHECK(lhs.d_phi_z == doctest::Approx(a * r1.d_phi_z + b * r2.d_phi_z).epsilon(1e-12));
}

TEST_CASE("angle_gradients agrees with finite differences on a trained model") {
  // pooling-argmax ties inside the +/-h probe make the loss locally
  // nonsmooth; those samples are skipped, as in the gradcheck harness
  const ClassifierParams& model = testing::small_trained_model();
  int checked = 0;
  for (std::size_t s = 0; s < testing::small_dataset().test.size(); ++s) {
    const PointCloud& cloud = testing::small_dataset().test[s];
    const PairCheck check = gradcheck_pair(model, cloud, cloud.label, 1e-4, 1e-3);
    if (check.tie) continue;
    CHECK(check.pass);
    CHECK(check.rel_err[0] < 1e-3);
    CHECK(check.rel_err[1] < 1e-3);
    CHECK(check.rel_err[2] < 1e-3);
    ++checked;
  }
  CHECK(checked >= 10);
}

TEST_CASE("euler_angle_gradients is the chain rule through the composition") {
  // oracle: a linear loss L(q) = sum c_i . q_i is smooth, so central
  // differences through compose() are exact to O(h^2)
  Rng rng(2024);
  std::vector<Vec3> base, coeff;
  for (int i = 0; i < 20; ++i) {
    base.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    coeff.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
  }
  const auto loss_at = [&](const EulerAngles& phi) {
    const RotationMatrix r = compose(phi);
    double acc = 0.0;
    for (std::size_t i = 0; i < base.size(); ++i) acc += coeff[i].dot(r.apply(base[i]));
    return acc;
  };

  const double h = 1e-6;
  for (int rep = 0; rep < 25; ++rep) {
    const EulerAngles phi{rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi),
                          rng.uniform(-kPi, kPi)};
    const RotationMatrix r = compose(phi);
    std::vector<Vec3> rotated;
    for (const Vec3& p : base) rotated.push_back(r.apply(p));
    const AngleGradient world = angle_gradients(rotated, coeff);
    const AngleGradient euler = euler_angle_gradients(phi, world);

    for (const Axis axis : {Axis::kX, Axis::kY, Axis::kZ}) {
      EulerAngles up = phi, down = phi;
      up[axis] += h;
      down[axis] -= h;
      const double fd = (loss_at(up) - loss_at(down)) / (2 * h);
      CHECK(euler[axis] == doctest::Approx(fd).epsilon(1e-6));
    }
  }

  // reduces to the world-axis form at zero angles
  const AngleGradient m{0.3, -1.2, 0.7};
  const AngleGradient at_zero = euler_angle_gradients({}, m);
  CHECK(at_zero.d_phi_x == doctest::Approx(m.d_phi_x));
  CHECK(at_zero.d_phi_y == doctest::Approx(m.d_phi_y));
  CHECK(at_zero.d_phi_z == doctest::Approx(m.d_phi_z));
}

TEST_CASE("project_angles clamps onto the box") {
  const EulerAngles clamped = project_angles({3.5, -4.0, 0.2}, kPi);
  CHECK(clamped.phi_x == doctest::Approx(kPi));
  CHECK(clamped.phi_y == doctest::Approx(-kPi));
  CHECK(clamped.phi_z == doctest::Approx(0.2));

  const EulerAngles inside = project_angles({0.1, -0.2, 0.3}, kPi);
  CHECK(inside.phi_x == doctest::Approx(0.1));
  CHECK(inside.phi_y == doctest::Approx(-0.2));
  CHECK(inside.phi_z == doctest::Approx(0.3));

  const EulerAngles quarter = project_angles({0.3, -1.0, 0.0}, kPi / 4);
  CHECK(quarter.phi_x == doctest::Approx(0.3));
  CHECK(quarter.phi_y == doctest::Approx(-kPi / 4));
  CHECK(quarter.phi_z == doctest::Approx(0.0));

  // idempotence
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    const EulerAngles raw{rng.uniform(-8, 8), rng.uniform(-8, 8), rng.uniform(-8, 8)};
    const double bound = rng.uniform(0.1, kPi);
    const EulerAngles once = project_angles(raw, bound);
    const EulerAngles twice = project_angles(once, bound);
    CHECK(once.phi_x == twice.phi_x);
    CHECK(once.phi_y == twice.phi_y);
    CHECK(once.phi_z == twice.phi_z);
    CHECK(std::abs(once.phi_x) <= bound);
  }

  CHECK_THROWS_AS(project_angles({0, 0, 0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(project_angles({0, 0, 0}, 4.0), std::invalid_argument);
}
