#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "artpoint/attack.hpp"
#include "artpoint/data.hpp"
#include "artpoint/defense.hpp"
#include "artpoint/eval.hpp"
#include "artpoint/gradcheck.hpp"
#include "artpoint/nn.hpp"

namespace py = pybind11;
using namespace artpoint;

PYBIND11_MODULE(_artpoint, m) {
  m.doc() = "Adversarial rotation attacks and retraining for point-cloud classifiers";

  py::class_<Vec3>(m, "Vec3")
      .def(py::init<>())
      .def(py::init([](double x, double y, double z) { return Vec3{x, y, z}; }))
      .def_readwrite("x", &Vec3::x)
      .def_readwrite("y", &Vec3::y)
      .def_readwrite("z", &Vec3::z)
      .def("__repr__", [](const Vec3& v) {
        return "Vec3(" + std::to_string(v.x) + ", " + std::to_string(v.y) + ", " +
               std::to_string(v.z) + ")";
      });

  py::class_<PointCloud>(m, "PointCloud")
      .def(py::init<>())
      .def_readwrite("points", &PointCloud::points)
      .def_readwrite("label", &PointCloud::label)
      .def("__len__", [](const PointCloud& c) { return c.points.size(); });

  py::class_<EulerAngles>(m, "EulerAngles")
      .def(py::init<>())
      .def(py::init([](double x, double y, double z) { return EulerAngles{x, y, z}; }))
      .def_readwrite("phi_x", &EulerAngles::phi_x)
      .def_readwrite("phi_y", &EulerAngles::phi_y)
      .def_readwrite("phi_z", &EulerAngles::phi_z);

  py::class_<RotationMatrix>(m, "RotationMatrix")
      .def("apply", &RotationMatrix::apply)
      .def("det", &RotationMatrix::det)
      .def_readonly("m", &RotationMatrix::m);

  py::enum_<Axis>(m, "Axis").value("X", Axis::kX).value("Y", Axis::kY).value("Z", Axis::kZ);
  py::enum_<Objective>(m, "Objective")
      .value("CROSS_ENTROPY", Objective::kCrossEntropy)
      .value("CW", Objective::kCw);

  m.def("axis_rotation", &axis_rotation, py::arg("axis"), py::arg("phi"));
  m.def("compose", &compose, py::arg("angles"));
  m.def("apply_rotation", &apply_rotation, py::arg("rotation"), py::arg("cloud"));
  m.def(
      "angle_gradients",
      [](const std::vector<Vec3>& pts, const std::vector<Vec3>& grads) {
        const AngleGradient g = angle_gradients(pts, grads);
        return py::make_tuple(g.d_phi_x, g.d_phi_y, g.d_phi_z);
      },
      py::arg("points"), py::arg("coord_grads"));
  m.def("project_angles", &project_angles, py::arg("angles"), py::arg("bound"));

  py::class_<SyntheticConfig>(m, "SyntheticConfig")
      .def(py::init<>())
      .def_readwrite("classes", &SyntheticConfig::classes)
      .def_readwrite("train_per_class", &SyntheticConfig::train_per_class)
      .def_readwrite("test_per_class", &SyntheticConfig::test_per_class)
      .def_readwrite("points_per_cloud", &SyntheticConfig::points_per_cloud)
      .def_readwrite("jitter", &SyntheticConfig::jitter);

  py::class_<Dataset>(m, "Dataset")
      .def_readonly("class_names", &Dataset::class_names)
      .def_readonly("train", &Dataset::train)
      .def_readonly("test", &Dataset::test)
      .def_readonly("train_ids", &Dataset::train_ids)
      .def_readonly("test_ids", &Dataset::test_ids)
      .def_readonly("seed", &Dataset::seed)
      .def_readonly("recipe", &Dataset::recipe);

  m.def("known_recipes", &known_recipes);
  m.def("gen_synthetic", &gen_synthetic, py::arg("config"), py::arg("seed"));
  m.def("normalize_unit_sphere", &normalize_unit_sphere, py::arg("cloud"));
  m.def("save_dataset", &save_dataset, py::arg("dataset"), py::arg("path"));
  m.def("load_dataset", &load_dataset, py::arg("path"));

  py::class_<TriangleMesh>(m, "TriangleMesh")
      .def(py::init<>())
      .def_readwrite("vertices", &TriangleMesh::vertices)
      .def_readwrite("faces", &TriangleMesh::faces);
  m.def("load_off", &load_off, py::arg("path"));
  m.def("save_off", &save_off, py::arg("mesh"), py::arg("path"));
  m.def("sample_mesh", &sample_mesh, py::arg("mesh"), py::arg("n"), py::arg("seed"));

  py::class_<Architecture>(m, "Architecture")
      .def(py::init<>())
      .def_readwrite("h1", &Architecture::h1)
      .def_readwrite("h2", &Architecture::h2)
      .def_readwrite("h3", &Architecture::h3)
      .def_readwrite("k", &Architecture::k);

  py::class_<ClassifierParams>(m, "ClassifierParams")
      .def_readonly("arch", &ClassifierParams::arch)
      .def_readonly("seed", &ClassifierParams::seed);

  m.def("init_params", &init_params, py::arg("arch"), py::arg("seed"));
  m.def("forward", &forward, py::arg("params"), py::arg("cloud"));
  m.def("predict", &predict, py::arg("params"), py::arg("cloud"));
  m.def(
      "cross_entropy",
      [](const std::vector<double>& z, int label) { return cross_entropy(z, label); },
      py::arg("logits"), py::arg("label"));
  m.def(
      "cw_objective",
      [](const std::vector<double>& z, int label) { return cw_objective(z, label); },
      py::arg("logits"), py::arg("label"));
  m.def(
      "coordinate_gradients",
      [](const ClassifierParams& p, const PointCloud& c, int label, Objective obj) {
        return backward(p, c, label, obj).coord_grads;
      },
      py::arg("params"), py::arg("cloud"), py::arg("label"), py::arg("objective"));
  m.def("save_checkpoint", &save_checkpoint, py::arg("params"), py::arg("path"));
  m.def("load_checkpoint", &load_checkpoint, py::arg("path"));

  py::class_<AttackConfig>(m, "AttackConfig")
      .def(py::init<>())
      .def_readwrite("steps", &AttackConfig::steps)
      .def_readwrite("step_size", &AttackConfig::step_size)
      .def_readwrite("bound", &AttackConfig::bound)
      .def_readwrite("random_start", &AttackConfig::random_start)
      .def_readwrite("objective", &AttackConfig::objective)
      .def_readwrite("restarts", &AttackConfig::restarts);

  py::class_<AttackOutcome>(m, "AttackOutcome")
      .def_readonly("angles", &AttackOutcome::angles)
      .def_readonly("adversarial", &AttackOutcome::adversarial)
      .def_readonly("trace", &AttackOutcome::trace);

  m.def(
      "axis_wise_attack",
      [](const ClassifierParams& p, const PointCloud& c, int label,
         const AttackConfig& cfg, std::uint64_t seed) {
        Rng rng(seed);
        return axis_wise_attack(p, c, label, cfg, rng);
      },
      py::arg("params"), py::arg("cloud"), py::arg("label"), py::arg("config"),
      py::arg("seed"));
  m.def(
      "standard_attack",
      [](const ClassifierParams& p, const PointCloud& c, int label,
         const AttackConfig& cfg, std::uint64_t seed) {
        Rng rng(seed);
        return standard_attack(p, c, label, cfg, rng);
      },
      py::arg("params"), py::arg("cloud"), py::arg("label"), py::arg("config"),
      py::arg("seed"));

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("lr", &TrainConfig::lr)
      .def_readwrite("lr_decay", &TrainConfig::lr_decay);

  py::class_<DefenseConfig>(m, "DefenseConfig")
      .def(py::init<>())
      .def_readwrite("retrain", &DefenseConfig::retrain)
      .def_readwrite("iterations", &DefenseConfig::iterations)
      .def_readwrite("ensemble_size", &DefenseConfig::ensemble_size)
      .def_readwrite("mix_clean", &DefenseConfig::mix_clean);

  py::class_<RotationPool>(m, "RotationPool")
      .def("size", &RotationPool::size)
      .def_readonly("bound", &RotationPool::bound);

  m.def(
      "build_pool",
      [](const std::vector<ClassifierParams>& models, const Dataset& ds,
         const AttackConfig& cfg, std::uint64_t seed, int workers) {
        return build_pool(models, ds, cfg, seed, workers);
      },
      py::arg("models"), py::arg("dataset"), py::arg("attack_config"), py::arg("seed"),
      py::arg("workers") = 1);
  m.def(
      "sample_rotation",
      [](const RotationPool& pool, int class_id, std::uint64_t seed) {
        Rng rng(seed);
        return sample_rotation(pool, class_id, rng);
      },
      py::arg("pool"), py::arg("class_id"), py::arg("seed"));
  m.def("adversarial_retrain", &adversarial_retrain, py::arg("params"),
        py::arg("dataset"), py::arg("pool"), py::arg("config"), py::arg("mix_clean"),
        py::arg("seed"));
  m.def("clean_train", &clean_train, py::arg("params"), py::arg("dataset"),
        py::arg("config"), py::arg("seed"));
  m.def("rotation_augment_train", &rotation_augment_train, py::arg("params"),
        py::arg("dataset"), py::arg("config"), py::arg("bound"), py::arg("seed"));
  m.def(
      "one_step_optimize",
      [](const ClassifierParams& target, const std::vector<ClassifierParams>& ensemble,
         const Dataset& ds, const AttackConfig& acfg, const DefenseConfig& dcfg,
         std::uint64_t seed, int workers) {
        return one_step_optimize(target, ensemble, ds, acfg, dcfg, seed, workers);
      },
      py::arg("target"), py::arg("ensemble"), py::arg("dataset"),
      py::arg("attack_config"), py::arg("defense_config"), py::arg("seed"),
      py::arg("workers") = 1);
  m.def(
      "iterative_optimize",
      [](const ClassifierParams& params, const Dataset& ds, const AttackConfig& acfg,
         const DefenseConfig& dcfg, std::uint64_t seed, int workers) {
        auto [result, reports] = iterative_optimize(params, ds, acfg, dcfg, seed, workers);
        std::vector<double> accuracies;
        for (const EvalReport& r : reports) accuracies.push_back(r.accuracy);
        return py::make_tuple(result, accuracies);
      },
      py::arg("params"), py::arg("dataset"), py::arg("attack_config"),
      py::arg("defense_config"), py::arg("seed"), py::arg("workers") = 1);

  py::class_<Protocol>(m, "Protocol")
      .def_static("clean", &Protocol::clean)
      .def_static("random", &Protocol::random, py::arg("bound"))
      .def_static("attacked", &Protocol::attacked, py::arg("config"));

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("protocol", &EvalReport::protocol)
      .def_readonly("accuracy", &EvalReport::accuracy)
      .def_readonly("mean_loss", &EvalReport::mean_loss)
      .def_readonly("success_rate", &EvalReport::success_rate)
      .def_readonly("n_samples", &EvalReport::n_samples);

  m.def(
      "evaluate",
      [](const ClassifierParams& p, const std::vector<PointCloud>& test,
         const Protocol& protocol, std::uint64_t seed, int workers) {
        return evaluate(p, test, protocol, seed, workers);
      },
      py::arg("params"), py::arg("test"), py::arg("protocol"), py::arg("seed"),
      py::arg("workers") = 1);
  m.def(
      "attack_success_rate",
      [](const ClassifierParams& p, const std::vector<PointCloud>& test,
         const AttackConfig& cfg, std::uint64_t seed, int workers) {
        return attack_success_rate(p, test, cfg, seed, workers);
      },
      py::arg("params"), py::arg("test"), py::arg("attack_config"), py::arg("seed"),
      py::arg("workers") = 1);

  py::class_<GradCheckConfig>(m, "GradCheckConfig")
      .def(py::init<>())
      .def_readwrite("pairs", &GradCheckConfig::pairs)
      .def_readwrite("fd_step", &GradCheckConfig::fd_step)
      .def_readwrite("rel_tol", &GradCheckConfig::rel_tol);

  py::class_<GradCheckReport>(m, "GradCheckReport")
      .def_readonly("checked", &GradCheckReport::checked)
      .def_readonly("skipped_ties", &GradCheckReport::skipped_ties)
      .def_readonly("passed", &GradCheckReport::passed)
      .def_readonly("pass_", &GradCheckReport::pass);

  m.def(
      "run_gradcheck",
      [](const ClassifierParams& p, const std::vector<PointCloud>& clouds,
         const GradCheckConfig& cfg, std::uint64_t seed) {
        return run_gradcheck(p, clouds, cfg, seed);
      },
      py::arg("params"), py::arg("clouds"), py::arg("config"), py::arg("seed"));
}
