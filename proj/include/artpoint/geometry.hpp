#pragma once

#include <array>
#include <span>

#include "artpoint/point_cloud.hpp"

namespace artpoint {

inline constexpr double kPi = 3.14159265358979323846;

enum class Axis { kX = 0, kY = 1, kZ = 2 };  // ordering x < y < z is the tie-break order

// Per-axis rotation angles in radians; the attack's optimization variable.
struct EulerAngles {
  double phi_x = 0.0, phi_y = 0.0, phi_z = 0.0;

  double operator[](Axis a) const {
    switch (a) {
      case Axis::kX: return phi_x;
      case Axis::kY: return phi_y;
      default: return phi_z;
    }
  }
  double& operator[](Axis a) {
    switch (a) {
      case Axis::kX: return phi_x;
      case Axis::kY: return phi_y;
      default: return phi_z;
    }
  }
};

// Loss sensitivity per radian about each axis.
struct AngleGradient {
  double d_phi_x = 0.0, d_phi_y = 0.0, d_phi_z = 0.0;

  double operator[](Axis a) const {
    switch (a) {
      case Axis::kX: return d_phi_x;
      case Axis::kY: return d_phi_y;
      default: return d_phi_z;
    }
  }
};

// 3x3 rotation matrix, row-major.
struct RotationMatrix {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  double operator()(int r, int c) const { return m[static_cast<std::size_t>(r * 3 + c)]; }
  double& operator()(int r, int c) { return m[static_cast<std::size_t>(r * 3 + c)]; }

  Vec3 apply(const Vec3& p) const {
    return {m[0] * p.x + m[1] * p.y + m[2] * p.z,
            m[3] * p.x + m[4] * p.y + m[5] * p.z,
            m[6] * p.x + m[7] * p.y + m[8] * p.z};
  }

  RotationMatrix operator*(const RotationMatrix& o) const;

  double det() const;
  // max-abs entry of R^T R - I
  double orthonormality_error() const;
};

// Single-axis rotation matrix. Throws std::invalid_argument on non-finite phi.
RotationMatrix axis_rotation(Axis axis, double phi);

// R = Rz(phi_z) * Ry(phi_y) * Rx(phi_x).
RotationMatrix compose(const EulerAngles& angles);

// Rotates every point; label and point count unchanged.
PointCloud apply_rotation(const RotationMatrix& rot, const PointCloud& cloud);

// Converts coordinate-space loss gradients into angle-space gradients:
//   d_phi_z = sum(-y_i*gx_i + x_i*gy_i)
//   d_phi_x = sum(-z_i*gy_i + y_i*gz_i)
//   d_phi_y = sum(-x_i*gz_i + z_i*gx_i)
// Equivalently the torque sum(q_i x g_i): each component is the loss
// sensitivity to an extra rotation of the given points about that world axis.
AngleGradient angle_gradients(std::span<const Vec3> points,
                              std::span<const Vec3> coord_grads);

// Loss sensitivity to each Euler angle of the fixed composition
// R = Rz * Ry * Rx evaluated at `angles`: projects the world-axis gradient
// onto the moving rotation axes (u_z = ez, u_y = Rz ey, u_x = Rz Ry ex).
// Coincides with the world-axis form at zero angles.
AngleGradient euler_angle_gradients(const EulerAngles& angles,
                                    const AngleGradient& world_gradient);

// Clamps each component onto [-bound, bound]. bound must lie in (0, pi].
EulerAngles project_angles(const EulerAngles& angles, double bound);

}  // namespace artpoint
