#include "artpoint/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace artpoint {

RotationMatrix RotationMatrix::operator*(const RotationMatrix& o) const {
  RotationMatrix out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += (*this)(r, k) * o(k, c);
      out(r, c) = acc;
    }
  }
  return out;
}

double RotationMatrix::det() const {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) -
         m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

double RotationMatrix::orthonormality_error() const {
  double worst = 0.0;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += (*this)(k, r) * (*this)(k, c);
      const double target = (r == c) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(acc - target));
    }
  }
  return worst;
}

RotationMatrix axis_rotation(Axis axis, double phi) {
  if (!std::isfinite(phi)) throw std::invalid_argument("axis_rotation: non-finite angle");
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  RotationMatrix r;
  switch (axis) {
    case Axis::kX:
      r.m = {1, 0, 0,
             0, c, -s,
             0, s, c};
      break;
    case Axis::kY:
      r.m = {c, 0, s,
             0, 1, 0,
             -s, 0, c};
      break;
    case Axis::kZ:
      r.m = {c, -s, 0,
             s, c, 0,
             0, 0, 1};
      break;
  }
  return r;
}

RotationMatrix compose(const EulerAngles& a) {
  if (!std::isfinite(a.phi_x) || !std::isfinite(a.phi_y) || !std::isfinite(a.phi_z))
    throw std::invalid_argument("compose: non-finite angle");
  return axis_rotation(Axis::kZ, a.phi_z) *
         (axis_rotation(Axis::kY, a.phi_y) * axis_rotation(Axis::kX, a.phi_x));
}

PointCloud apply_rotation(const RotationMatrix& rot, const PointCloud& cloud) {
  if (cloud.points.empty()) throw std::invalid_argument("apply_rotation: empty cloud");
  PointCloud out;
  out.label = cloud.label;
  out.points.reserve(cloud.points.size());
  for (const Vec3& p : cloud.points) out.points.push_back(rot.apply(p));
  return out;
}

AngleGradient angle_gradients(std::span<const Vec3> points,
                              std::span<const Vec3> coord_grads) {
  if (points.empty() || points.size() != coord_grads.size())
    throw std::invalid_argument("angle_gradients: point/gradient length mismatch");
  AngleGradient g;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec3& p = points[i];
    const Vec3& d = coord_grads[i];
    g.d_phi_z += -p.y * d.x + p.x * d.y;
    g.d_phi_x += -p.z * d.y + p.y * d.z;
    g.d_phi_y += -p.x * d.z + p.z * d.x;
  }
  return g;
}

AngleGradient euler_angle_gradients(const EulerAngles& angles,
                                    const AngleGradient& world_gradient) {
  const double cz = std::cos(angles.phi_z), sz = std::sin(angles.phi_z);
  const double cy = std::cos(angles.phi_y), sy = std::sin(angles.phi_y);
  const Vec3 m{world_gradient.d_phi_x, world_gradient.d_phi_y, world_gradient.d_phi_z};
  const Vec3 ux{cz * cy, sz * cy, -sy};  // Rz * Ry * ex
  const Vec3 uy{-sz, cz, 0.0};           // Rz * ey
  AngleGradient out;
  out.d_phi_x = ux.dot(m);
  out.d_phi_y = uy.dot(m);
  out.d_phi_z = m.z;  // uz = ez
  return out;
}

EulerAngles project_angles(const EulerAngles& angles, double bound) {
  if (!(bound > 0.0) || bound > kPi)
    throw std::invalid_argument("project_angles: bound must lie in (0, pi]");
  EulerAngles out;
  out.phi_x = std::clamp(angles.phi_x, -bound, bound);
  out.phi_y = std::clamp(angles.phi_y, -bound, bound);
  out.phi_z = std::clamp(angles.phi_z, -bound, bound);
  return out;
}

}  // namespace artpoint
