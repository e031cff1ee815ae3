#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "artpoint/point_cloud.hpp"

namespace artpoint {

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
};

// Labeled train/test splits plus the recipe and seed that produced them.
// Sample ids are global, assigned at generation, and disjoint across splits.
struct Dataset {
  std::vector<std::string> class_names;
  std::vector<PointCloud> train;
  std::vector<PointCloud> test;
  std::vector<int> train_ids;
  std::vector<int> test_ids;
  std::uint64_t seed = 0;
  std::string recipe;

  int num_classes() const { return static_cast<int>(class_names.size()); }
};

// Parameterized surface primitives available to gen_synthetic.
// Unknown names raise ConfigError.
const std::vector<std::string>& known_recipes();

struct SyntheticConfig {
  std::vector<std::string> classes;  // empty -> all known recipes
  int train_per_class = 100;
  int test_per_class = 30;
  int points_per_cloud = 256;
  double jitter = 0.01;    // Gaussian coordinate noise, pre-normalization scale
  double max_tilt = 0.35;  // canonical-pose imperfection: tilt up to this many
                           // radians about a random horizontal axis
};

// Procedurally samples primitive surfaces with per-sample shape variation and
// Gaussian jitter, normalizes each cloud to the unit sphere, and splits
// train/test. Pure function of (config, seed).
Dataset gen_synthetic(const SyntheticConfig& cfg, std::uint64_t seed);

// Subtract centroid, divide by max point norm. Throws DegenerateInputError
// when all points coincide.
PointCloud normalize_unit_sphere(const PointCloud& cloud);

// OFF mesh reader. Polygon faces are fan-triangulated. Malformed input raises
// ParseError carrying the offending line number.
TriangleMesh load_off(const std::string& path);
void save_off(const TriangleMesh& mesh, const std::string& path);

// Area-uniform surface sampling: faces chosen proportionally to area, points
// placed by square-root barycentric sampling, result normalized to the unit
// sphere. Label of the returned cloud is 0 (unlabeled).
PointCloud sample_mesh(const TriangleMesh& mesh, int n, std::uint64_t seed);

// Versioned binary container (magic "APDS"); round-trips bit-exactly.
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

// Inspection export: sample_id, class_id, point_index, x, y, z.
void export_dataset_csv(const Dataset& ds, const std::string& path);

}  // namespace artpoint
