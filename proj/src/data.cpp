#include "artpoint/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>

#include "artpoint/common.hpp"
#include "artpoint/geometry.hpp"
#include "artpoint/io_util.hpp"
#include "artpoint/rng.hpp"

namespace artpoint {

namespace {

constexpr std::uint64_t kStreamSample = 0x5a4d504cu;  // per-sample generation

// --- primitive surface samplers -------------------------------------------
// Each sampler draws one surface point of the canonical, axis-aligned shape.
// Shape parameters vary per sample; clouds are normalized afterwards, so only
// relative proportions matter.

Vec3 sample_sphere_dir(Rng& rng) {
  const double z = rng.uniform(-1.0, 1.0);
  const double t = rng.uniform(0.0, 2.0 * kPi);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(t), r * std::sin(t), z};
}

struct ShapeParams {
  double a = 0.0, b = 0.0;
};

using SurfaceFn = std::function<Vec3(Rng&, const ShapeParams&)>;

Vec3 cube_point(Rng& rng, const ShapeParams& sp) {
  // sp.a/sp.b: mild aspect scales on y and z
  const int face = static_cast<int>(rng.uniform_index(6));
  const double u = rng.uniform(-1.0, 1.0);
  const double v = rng.uniform(-1.0, 1.0);
  Vec3 p;
  switch (face) {
    case 0: p = {1, u, v}; break;
    case 1: p = {-1, u, v}; break;
    case 2: p = {u, 1, v}; break;
    case 3: p = {u, -1, v}; break;
    case 4: p = {u, v, 1}; break;
    default: p = {u, v, -1}; break;
  }
  return {p.x, p.y * sp.a, p.z * sp.b};
}

Vec3 cylinder_point(Rng& rng, const ShapeParams& sp) {
  const double r = sp.a, h = sp.b;  // radius, half-height
  const double lateral = 2.0 * kPi * r * 2.0 * h;
  const double caps = 2.0 * kPi * r * r;
  const double t = rng.uniform(0.0, 2.0 * kPi);
  if (rng.uniform01() * (lateral + caps) < lateral) {
    return {r * std::cos(t), r * std::sin(t), rng.uniform(-h, h)};
  }
  const double rr = r * std::sqrt(rng.uniform01());
  const double z = rng.uniform01() < 0.5 ? h : -h;
  return {rr * std::cos(t), rr * std::sin(t), z};
}

Vec3 cone_point(Rng& rng, const ShapeParams& sp) {
  const double r = sp.a, h = sp.b;  // base radius, height (apex at z=h, base at z=0)
  const double slant = std::sqrt(r * r + h * h);
  const double lateral = kPi * r * slant;
  const double base = kPi * r * r;
  const double t = rng.uniform(0.0, 2.0 * kPi);
  if (rng.uniform01() * (lateral + base) < lateral) {
    const double s = std::sqrt(rng.uniform01());  // area grows with distance from apex
    return {s * r * std::cos(t), s * r * std::sin(t), h * (1.0 - s)};
  }
  const double rr = r * std::sqrt(rng.uniform01());
  return {rr * std::cos(t), rr * std::sin(t), 0.0};
}

Vec3 torus_point(Rng& rng, const ShapeParams& sp) {
  const double major = 1.0, minor = sp.a;
  // area element is proportional to major + minor*cos(v); rejection-sample v
  double v;
  for (;;) {
    v = rng.uniform(0.0, 2.0 * kPi);
    const double w = (major + minor * std::cos(v)) / (major + minor);
    if (rng.uniform01() <= w) break;
  }
  const double u = rng.uniform(0.0, 2.0 * kPi);
  const double ring = major + minor * std::cos(v);
  return {ring * std::cos(u), ring * std::sin(u), minor * std::sin(v)};
}

Vec3 triangle_point(Rng& rng, const Vec3& a, const Vec3& b, const Vec3& c) {
  const double su = std::sqrt(rng.uniform01());
  const double v = rng.uniform01();
  const double w0 = 1.0 - su;
  const double w1 = su * (1.0 - v);
  const double w2 = su * v;
  return a * w0 + b * w1 + c * w2;
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

Vec3 pyramid_point(Rng& rng, const ShapeParams& sp) {
  const double half = sp.a, h = sp.b;  // base half-side, apex height
  const Vec3 apex{0, 0, h};
  const Vec3 c0{half, half, 0}, c1{-half, half, 0}, c2{-half, -half, 0}, c3{half, -half, 0};
  const double side = triangle_area(c0, c1, apex);
  const double base = 4.0 * half * half;
  const double total = 4.0 * side + base;
  const double pick = rng.uniform01() * total;
  if (pick < base) {
    return {rng.uniform(-half, half), rng.uniform(-half, half), 0.0};
  }
  const int face = static_cast<int>((pick - base) / side);
  const Vec3* corners[4][2] = {{&c0, &c1}, {&c1, &c2}, {&c2, &c3}, {&c3, &c0}};
  const int f = std::min(face, 3);
  return triangle_point(rng, *corners[f][0], *corners[f][1], apex);
}

Vec3 ellipsoid_point(Rng& rng, const ShapeParams& sp) {
  const Vec3 d = sample_sphere_dir(rng);
  return {d.x, d.y * sp.a, d.z * sp.b};
}

Vec3 capsule_point(Rng& rng, const ShapeParams& sp) {
  const double r = sp.a, h = sp.b;  // radius, cylinder half-length
  const double lateral = 2.0 * kPi * r * 2.0 * h;
  const double caps = 4.0 * kPi * r * r;
  if (rng.uniform01() * (lateral + caps) < lateral) {
    const double t = rng.uniform(0.0, 2.0 * kPi);
    return {r * std::cos(t), r * std::sin(t), rng.uniform(-h, h)};
  }
  const Vec3 d = sample_sphere_dir(rng);
  const double zoff = d.z >= 0.0 ? h : -h;
  return {r * d.x, r * d.y, r * d.z + zoff};
}

struct Recipe {
  std::string name;
  // draws per-sample shape parameters
  std::function<ShapeParams(Rng&)> params;
  SurfaceFn surface;
};

// Class pairs differ by fine, pose-dependent features (cap shape, base shape,
// a thin-direction deficit): upright poses expose them at a fixed location so
// aligned data stays cleanly separable, while rotation-robust discrimination
// has to cover every direction, which is the regime the attack and defense
// experiments need.
const std::vector<Recipe>& recipes() {
  static const std::vector<Recipe> table = {
      {"sphere", [](Rng&) { return ShapeParams{}; },
       [](Rng& rng, const ShapeParams&) { return sample_sphere_dir(rng); }},
      {"cube",
       [](Rng& rng) { return ShapeParams{rng.uniform(0.85, 1.15), rng.uniform(0.85, 1.15)}; },
       cube_point},
      {"cylinder",
       [](Rng& rng) { return ShapeParams{rng.uniform(0.3, 0.45), rng.uniform(0.8, 1.1)}; },
       cylinder_point},
      {"cone",
       [](Rng& rng) { return ShapeParams{rng.uniform(0.4, 0.6), rng.uniform(1.2, 1.6)}; },
       cone_point},
      {"torus",
       [](Rng& rng) { return ShapeParams{rng.uniform(0.25, 0.4), 0.0}; },
       torus_point},
      // pyramid's base circumradius tracks the cone's radius range, so the
      // pair differs mainly by base shape and edges
      {"pyramid",
       [](Rng& rng) { return ShapeParams{rng.uniform(0.28, 0.42), rng.uniform(1.2, 1.6)}; },
       pyramid_point},
      // upright z-extent separates it from the sphere; under rotation only a
      // thin-direction deficit does
      {"ellipsoid",
       [](Rng& rng) { return ShapeParams{rng.uniform(0.92, 0.97), rng.uniform(0.8, 0.88)}; },
       ellipsoid_point},
      // same radius range as the cylinder with overlapping overall height, so
      // the pair differs mainly by cap shape
      {"capsule",
       [](Rng& rng) { return ShapeParams{rng.uniform(0.3, 0.45), rng.uniform(0.45, 0.75)}; },
       capsule_point},
  };
  return table;
}

const Recipe& find_recipe(const std::string& name) {
  for (const Recipe& r : recipes())
    if (r.name == name) return r;
  throw ConfigError("gen_synthetic: unknown shape recipe '" + name + "'");
}

}  // namespace

const std::vector<std::string>& known_recipes() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const Recipe& r : recipes()) out.push_back(r.name);
    return out;
  }();
  return names;
}

PointCloud normalize_unit_sphere(const PointCloud& cloud) {
  if (cloud.points.empty())
    throw std::invalid_argument("normalize_unit_sphere: empty cloud");
  Vec3 centroid{0, 0, 0};
  for (const Vec3& p : cloud.points) centroid = centroid + p;
  const double inv = 1.0 / static_cast<double>(cloud.points.size());
  centroid = centroid * inv;

  double max_norm = 0.0;
  for (const Vec3& p : cloud.points)
    max_norm = std::max(max_norm, (p - centroid).norm());
  if (max_norm == 0.0)
    throw DegenerateInputError("normalize_unit_sphere: all points identical");

  PointCloud out;
  out.label = cloud.label;
  out.points.reserve(cloud.points.size());
  const double scale = 1.0 / max_norm;
  for (const Vec3& p : cloud.points) out.points.push_back((p - centroid) * scale);
  return out;
}

Dataset gen_synthetic(const SyntheticConfig& cfg, std::uint64_t seed) {
  std::vector<std::string> classes = cfg.classes;
  if (classes.empty()) classes = known_recipes();
  if (classes.size() < 2) throw ConfigError("gen_synthetic: need at least 2 classes");
  if (cfg.train_per_class < 1 || cfg.test_per_class < 1)
    throw ConfigError("gen_synthetic: per-class counts must be >= 1");
  if (cfg.points_per_cloud < 8)
    throw ConfigError("gen_synthetic: need at least 8 points per cloud");
  if (cfg.jitter < 0.0) throw ConfigError("gen_synthetic: negative jitter");
  if (cfg.max_tilt < 0.0 || cfg.max_tilt > kPi)
    throw ConfigError("gen_synthetic: max_tilt must lie in [0, pi]");

  Dataset ds;
  ds.class_names = classes;
  ds.seed = seed;
  {
    std::ostringstream recipe;
    recipe << "primitives-v1:";
    for (std::size_t i = 0; i < classes.size(); ++i)
      recipe << (i ? "," : "") << classes[i];
    recipe << ";train=" << cfg.train_per_class << ";test=" << cfg.test_per_class
           << ";points=" << cfg.points_per_cloud << ";jitter=" << cfg.jitter
           << ";tilt=" << cfg.max_tilt;
    ds.recipe = recipe.str();
  }

  const int per_class = cfg.train_per_class + cfg.test_per_class;
  int next_id = 0;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    const Recipe& recipe = find_recipe(classes[k]);
    for (int j = 0; j < per_class; ++j) {
      const int id = next_id++;
      Rng rng(derive_seed(seed, kStreamSample, static_cast<std::uint64_t>(id)));
      const ShapeParams sp = recipe.params(rng);
      // canonical pose mirrors aligned CAD scans: objects share the gravity
      // axis but not a compass heading, and carry a bounded alignment tilt
      const double heading = rng.uniform(0.0, 2.0 * kPi);
      const double tilt_dir = rng.uniform(0.0, 2.0 * kPi);
      const double tilt = rng.uniform(0.0, cfg.max_tilt);
      const RotationMatrix pose =
          axis_rotation(Axis::kZ, tilt_dir) *
          (axis_rotation(Axis::kX, tilt) *
           (axis_rotation(Axis::kZ, heading - tilt_dir)));
      PointCloud cloud;
      cloud.label = static_cast<int>(k);
      cloud.points.reserve(static_cast<std::size_t>(cfg.points_per_cloud));
      for (int i = 0; i < cfg.points_per_cloud; ++i) {
        Vec3 p = pose.apply(recipe.surface(rng, sp));
        p.x += rng.normal(0.0, cfg.jitter);
        p.y += rng.normal(0.0, cfg.jitter);
        p.z += rng.normal(0.0, cfg.jitter);
        cloud.points.push_back(p);
      }
      cloud = normalize_unit_sphere(cloud);
      if (j < cfg.train_per_class) {
        ds.train.push_back(std::move(cloud));
        ds.train_ids.push_back(id);
      } else {
        ds.test.push_back(std::move(cloud));
        ds.test_ids.push_back(id);
      }
    }
  }
  return ds;
}

// --- OFF ---------------------------------------------------------------

namespace {

// Reads the next line that is neither blank nor a '#' comment.
bool next_content_line(std::istream& in, std::string& line, std::size_t& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;
    if (line[pos] == '#') continue;
    return true;
  }
  return false;
}

}  // namespace

TriangleMesh load_off(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_off: cannot open " + path);

  std::size_t lineno = 0;
  std::string line;
  if (!next_content_line(in, line, lineno))
    throw ParseError("load_off: empty file", lineno);

  std::istringstream header(line);
  std::string tag;
  header >> tag;
  if (tag != "OFF") throw ParseError("load_off: missing OFF header", lineno);

  // counts may share the header line ("OFF nv nf ne") or follow it
  long nv = -1, nf = -1, ne = 0;
  if (!(header >> nv >> nf >> ne)) {
    if (!next_content_line(in, line, lineno))
      throw ParseError("load_off: missing element counts", lineno);
    std::istringstream counts(line);
    if (!(counts >> nv >> nf)) throw ParseError("load_off: malformed counts", lineno);
    counts >> ne;
  }
  if (nv < 0 || nf < 1) throw ParseError("load_off: invalid counts", lineno);

  TriangleMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(nv));
  for (long i = 0; i < nv; ++i) {
    if (!next_content_line(in, line, lineno))
      throw ParseError("load_off: unexpected end of vertex list", lineno);
    std::istringstream vs(line);
    Vec3 v;
    if (!(vs >> v.x >> v.y >> v.z))
      throw ParseError("load_off: malformed vertex", lineno);
    mesh.vertices.push_back(v);
  }

  for (long f = 0; f < nf; ++f) {
    if (!next_content_line(in, line, lineno))
      throw ParseError("load_off: unexpected end of face list", lineno);
    std::istringstream fs(line);
    long k = 0;
    if (!(fs >> k) || k < 3) throw ParseError("load_off: malformed face", lineno);
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (long i = 0; i < k; ++i) {
      long v;
      if (!(fs >> v)) throw ParseError("load_off: malformed face", lineno);
      if (v < 0 || v >= nv)
        throw ParseError("load_off: vertex index out of range", lineno);
      idx[static_cast<std::size_t>(i)] = static_cast<int>(v);
    }
    for (long i = 1; i + 1 < k; ++i)  // fan triangulation
      mesh.faces.push_back({idx[0], idx[static_cast<std::size_t>(i)],
                            idx[static_cast<std::size_t>(i + 1)]});
  }
  return mesh;
}

void save_off(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_off: cannot open " + path);
  out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.faces.size() << " 0\n";
  for (const Vec3& v : mesh.vertices)
    out << format_double(v.x) << ' ' << format_double(v.y) << ' '
        << format_double(v.z) << '\n';
  for (const auto& f : mesh.faces)
    out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  if (!out) throw IoError("save_off: write failed for " + path);
}

PointCloud sample_mesh(const TriangleMesh& mesh, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_mesh: n must be >= 1");
  if (mesh.faces.empty()) throw std::invalid_argument("sample_mesh: mesh has no faces");

  std::vector<double> cumulative(mesh.faces.size());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& face = mesh.faces[f];
    total += triangle_area(mesh.vertices[static_cast<std::size_t>(face[0])],
                           mesh.vertices[static_cast<std::size_t>(face[1])],
                           mesh.vertices[static_cast<std::size_t>(face[2])]);
    cumulative[f] = total;
  }
  if (total <= 0.0) throw DegenerateInputError("sample_mesh: zero total surface area");

  Rng rng(seed);
  PointCloud cloud;
  cloud.points.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double pick = rng.uniform01() * total;
    const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), pick);
    const std::size_t f = static_cast<std::size_t>(it - cumulative.begin());
    const auto& face = mesh.faces[std::min(f, mesh.faces.size() - 1)];
    cloud.points.push_back(
        triangle_point(rng, mesh.vertices[static_cast<std::size_t>(face[0])],
                       mesh.vertices[static_cast<std::size_t>(face[1])],
                       mesh.vertices[static_cast<std::size_t>(face[2])]));
  }
  // a single point has no extent to normalize; return it on the face plane
  if (n == 1) return cloud;
  return normalize_unit_sphere(cloud);
}

// --- dataset container ---------------------------------------------------
// Layout (little-endian):
//   magic "APDS" | u32 version=1 | u64 seed
//   str recipe | u32 nclasses | nclasses * str
//   u32 ntrain | ntrain * sample | u32 ntest | ntest * sample
// sample: i32 id | i32 label | u32 npoints | npoints * 3 * f64
// str: u32 length | bytes

namespace {

void write_sample(BinaryWriter& w, const PointCloud& cloud, int id) {
  w.write_i32(id);
  w.write_i32(cloud.label);
  w.write_u32(static_cast<std::uint32_t>(cloud.points.size()));
  for (const Vec3& p : cloud.points) {
    w.write_f64(p.x);
    w.write_f64(p.y);
    w.write_f64(p.z);
  }
}

PointCloud read_sample(BinaryReader& r, int& id) {
  id = r.read_i32();
  PointCloud cloud;
  cloud.label = r.read_i32();
  const std::uint32_t n = r.read_u32();
  cloud.points.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    Vec3 p;
    p.x = r.read_f64();
    p.y = r.read_f64();
    p.z = r.read_f64();
    cloud.points.push_back(p);
  }
  return cloud;
}

}  // namespace

void save_dataset(const Dataset& ds, const std::string& path) {
  BinaryWriter w(path);
  w.write_magic("APDS");
  w.write_u32(1);
  w.write_u64(ds.seed);
  w.write_string(ds.recipe);
  w.write_u32(static_cast<std::uint32_t>(ds.class_names.size()));
  for (const std::string& name : ds.class_names) w.write_string(name);
  w.write_u32(static_cast<std::uint32_t>(ds.train.size()));
  for (std::size_t i = 0; i < ds.train.size(); ++i)
    write_sample(w, ds.train[i], ds.train_ids[i]);
  w.write_u32(static_cast<std::uint32_t>(ds.test.size()));
  for (std::size_t i = 0; i < ds.test.size(); ++i)
    write_sample(w, ds.test[i], ds.test_ids[i]);
  w.finish();
}

Dataset load_dataset(const std::string& path) {
  BinaryReader r(path);
  r.expect_magic("APDS", "dataset");
  const std::uint32_t version = r.read_u32();
  if (version != 1)
    throw FormatError("load_dataset: unsupported version " + std::to_string(version));
  Dataset ds;
  ds.seed = r.read_u64();
  ds.recipe = r.read_string();
  const std::uint32_t nclasses = r.read_u32();
  for (std::uint32_t i = 0; i < nclasses; ++i) ds.class_names.push_back(r.read_string());
  const std::uint32_t ntrain = r.read_u32();
  for (std::uint32_t i = 0; i < ntrain; ++i) {
    int id = 0;
    ds.train.push_back(read_sample(r, id));
    ds.train_ids.push_back(id);
  }
  const std::uint32_t ntest = r.read_u32();
  for (std::uint32_t i = 0; i < ntest; ++i) {
    int id = 0;
    ds.test.push_back(read_sample(r, id));
    ds.test_ids.push_back(id);
  }
  return ds;
}

void export_dataset_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("export_dataset_csv: cannot open " + path);
  out << "sample_id,class_id,point_index,x,y,z\n";
  const auto dump = [&](const std::vector<PointCloud>& split, const std::vector<int>& ids) {
    for (std::size_t s = 0; s < split.size(); ++s) {
      for (std::size_t i = 0; i < split[s].points.size(); ++i) {
        const Vec3& p = split[s].points[i];
        out << ids[s] << ',' << split[s].label << ',' << i << ','
            << format_double(p.x) << ',' << format_double(p.y) << ','
            << format_double(p.z) << '\n';
      }
    }
  };
  dump(ds.train, ds.train_ids);
  dump(ds.test, ds.test_ids);
  if (!out) throw IoError("export_dataset_csv: write failed for " + path);
}

}  // namespace artpoint
