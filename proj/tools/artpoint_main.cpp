// Command-line front end: gen-data, train, attack, defend, eval, gradcheck.
// Every subcommand is a pure function of (config file + flags + seed); output
// files carry config digests and contain no timestamps, so reruns are
// byte-identical.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <utility>
#include <vector>

#include "artpoint/attack.hpp"
#include "artpoint/common.hpp"
#include "artpoint/data.hpp"
#include "artpoint/defense.hpp"
#include "artpoint/eval.hpp"
#include "artpoint/gradcheck.hpp"
#include "artpoint/io_util.hpp"
#include "artpoint/nn.hpp"

namespace fs = std::filesystem;
using namespace artpoint;

namespace {

constexpr std::uint64_t kSeedInit = 0x494e4954u;
constexpr std::uint64_t kSeedTrain = 0x5452414eu;
constexpr std::uint64_t kSeedAttack = 0x4154544bu;
constexpr std::uint64_t kSeedSweep = 0x53575045u;
constexpr std::uint64_t kSeedDefend = 0x4446454eu;
constexpr std::uint64_t kSeedEval = 0x45564c31u;
constexpr std::uint64_t kSeedGrad = 0x47524144u;
constexpr std::uint64_t kSeedEnsemble = 0x454e534du;

struct CommonOpts {
  std::string out = "out";
  std::uint64_t seed = 42;
  int workers = 1;
};

struct AttackOpts {
  int steps = 10;
  double step_size = 0.01;
  double bound = kPi;
  bool no_random_start = false;
  std::string objective = "cw";
  int batch = 17;

  AttackConfig to_config() const {
    AttackConfig cfg;
    cfg.steps = steps;
    cfg.step_size = step_size;
    cfg.bound = bound;
    cfg.random_start = !no_random_start;
    if (objective == "cw")
      cfg.objective = Objective::kCw;
    else if (objective == "ce")
      cfg.objective = Objective::kCrossEntropy;
    else
      throw ConfigError("unknown objective '" + objective + "' (use cw or ce)");
    return cfg;
  }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--out", opts.out, "Output directory (created if missing)");
  cmd->add_option("--seed", opts.seed, "Global seed");
  cmd->add_option("--workers", opts.workers, "Per-sample parallelism")
      ->check(CLI::PositiveNumber);
}

void add_attack(CLI::App* cmd, AttackOpts& opts) {
  cmd->add_option("--attack-steps", opts.steps, "PGD steps T")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--step-size", opts.step_size, "PGD step size alpha (radians)");
  cmd->add_option("--rotation-bound", opts.bound, "Angle bound (radians, <= pi)");
  cmd->add_flag("--no-random-start", opts.no_random_start,
                "Start from zero angles instead of a random rotation");
  cmd->add_option("--objective", opts.objective, "Attack objective: cw or ce");
  cmd->add_option("--attack-batch", opts.batch,
                  "Samples claimed per worker at a time (throughput only)");
}

void ensure_out_dir(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create output directory " + out + ": " + ec.message());
}

fs::path out_path(const CommonOpts& opts, const std::string& name) {
  return fs::path(opts.out) / name;
}

void write_provenance(const fs::path& path,
                      const std::vector<std::pair<std::string, std::string>>& rows) {
  Digest digest;
  for (const auto& [key, value] : rows) digest.add(key).add(value);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "key,value\n";
  for (const auto& [key, value] : rows) out << key << ',' << value << '\n';
  out << "config_digest," << digest.hex() << '\n';
}

Architecture arch_from(int h1, int h2, int h3, int k) {
  Architecture arch;
  arch.h1 = h1;
  arch.h2 = h2;
  arch.h3 = h3;
  arch.k = k;
  return arch;
}

std::vector<EvalReport> run_protocols(const ClassifierParams& params,
                                      const Dataset& ds, const AttackConfig& attack,
                                      double bound, std::uint64_t seed, int workers) {
  std::vector<EvalReport> reports;
  reports.push_back(
      evaluate(params, ds.test, Protocol::clean(), derive_seed(seed, kSeedEval, 0), workers));
  reports.push_back(evaluate(params, ds.test, Protocol::random(bound),
                             derive_seed(seed, kSeedEval, 1), workers));
  reports.push_back(evaluate(params, ds.test, Protocol::attacked(attack),
                             derive_seed(seed, kSeedEval, 2), workers));
  return reports;
}

// ---------------------------------------------------------------- gen-data

struct GenDataOpts {
  CommonOpts common;
  std::vector<std::string> classes;
  int train_per_class = 100;
  int test_per_class = 30;
  int points = 256;
  double jitter = 0.01;
  bool export_csv = false;
};

int cmd_gen_data(const GenDataOpts& o) {
  ensure_out_dir(o.common.out);
  SyntheticConfig cfg;
  cfg.classes = o.classes;
  cfg.train_per_class = o.train_per_class;
  cfg.test_per_class = o.test_per_class;
  cfg.points_per_cloud = o.points;
  cfg.jitter = o.jitter;
  const Dataset ds = gen_synthetic(cfg, o.common.seed);
  save_dataset(ds, out_path(o.common, "dataset.apds").string());
  if (o.export_csv)
    export_dataset_csv(ds, out_path(o.common, "dataset.csv").string());

  std::string class_list;
  for (const std::string& name : ds.class_names)
    class_list += (class_list.empty() ? "" : ";") + name;
  write_provenance(out_path(o.common, "gen_data_provenance.csv"),
                   {{"command", "gen-data"},
                    {"classes", class_list},
                    {"train_per_class", std::to_string(o.train_per_class)},
                    {"test_per_class", std::to_string(o.test_per_class)},
                    {"points", std::to_string(o.points)},
                    {"jitter", format_double(o.jitter)},
                    {"seed", std::to_string(o.common.seed)},
                    {"recipe", ds.recipe}});
  std::cout << "gen-data: wrote " << ds.train.size() << " train / " << ds.test.size()
            << " test clouds to " << o.common.out << "\n";
  return 0;
}

// ------------------------------------------------------------------- train

struct TrainOpts {
  CommonOpts common;
  std::string data;
  std::string mode = "clean";
  int epochs = -1;  // resolved per mode: 30 clean, 120 rotation-augment
  double lr = 0.05;
  double lr_decay = 0.98;
  double bound = kPi;
  int h1 = 64, h2 = 128, h3 = 64;
  AttackOpts attack;
};

int cmd_train(const TrainOpts& o) {
  ensure_out_dir(o.common.out);
  const Dataset ds = load_dataset(o.data);
  const Architecture arch = arch_from(o.h1, o.h2, o.h3, ds.num_classes());
  ClassifierParams params = init_params(arch, derive_seed(o.common.seed, kSeedInit));

  TrainConfig cfg;
  cfg.lr = o.lr;
  cfg.lr_decay = o.lr_decay;
  const std::uint64_t train_seed = derive_seed(o.common.seed, kSeedTrain);
  if (o.mode == "clean") {
    cfg.epochs = o.epochs > 0 ? o.epochs : 30;
    params = clean_train(std::move(params), ds, cfg, train_seed);
  } else if (o.mode == "rotation-augment") {
    cfg.epochs = o.epochs > 0 ? o.epochs : 120;
    params = rotation_augment_train(std::move(params), ds, cfg, o.bound, train_seed);
  } else {
    throw ConfigError("train: unknown mode '" + o.mode + "'");
  }

  save_checkpoint(params, out_path(o.common, "model.ckpt").string());
  const std::vector<EvalReport> reports = run_protocols(
      params, ds, o.attack.to_config(), o.bound, o.common.seed, o.common.workers);
  emit_report(reports, out_path(o.common, "eval.csv").string());

  write_provenance(out_path(o.common, "train_provenance.csv"),
                   {{"command", "train"},
                    {"data", o.data},
                    {"mode", o.mode},
                    {"epochs", std::to_string(cfg.epochs)},
                    {"lr", format_double(o.lr)},
                    {"lr_decay", format_double(o.lr_decay)},
                    {"rotation_bound", format_double(o.bound)},
                    {"arch", std::to_string(o.h1) + "/" + std::to_string(o.h2) + "/" +
                                 std::to_string(o.h3) + "/" + std::to_string(arch.k)},
                    {"seed", std::to_string(o.common.seed)}});
  std::cout << "train(" << o.mode << "): clean acc " << reports[0].accuracy
            << ", random acc " << reports[1].accuracy << ", attack acc "
            << reports[2].accuracy << "\n";
  return 0;
}

// ------------------------------------------------------------------ attack

struct AttackCmdOpts {
  CommonOpts common;
  std::string data;
  std::string checkpoint;
  AttackOpts attack;
  int sweep_restarts = 1;
};

int cmd_attack(const AttackCmdOpts& o) {
  ensure_out_dir(o.common.out);
  const Dataset ds = load_dataset(o.data);
  const ClassifierParams params = load_checkpoint(o.checkpoint);
  const AttackConfig cfg = o.attack.to_config();

  const std::vector<AttackRecord> records =
      attack_dataset(params, ds.test, ds.test_ids, cfg,
                     derive_seed(o.common.seed, kSeedAttack), o.common.workers,
                     o.attack.batch);
  save_attack_records_csv(records, out_path(o.common, "attack_records.csv").string());

  AttackConfig sweep_cfg = cfg;
  sweep_cfg.restarts = o.sweep_restarts;
  std::vector<AttackVariant> variants;
  variants.push_back({"random", AttackVariant::Kind::kRandom, sweep_cfg});
  variants.push_back({"standard", AttackVariant::Kind::kStandard, sweep_cfg});
  variants.push_back({"axis-wise", AttackVariant::Kind::kAxisWise, sweep_cfg});
  const std::vector<SweepRow> rows = loss_sweep(
      params, ds.test, variants, derive_seed(o.common.seed, kSeedSweep), o.common.workers);
  save_sweep_csv(rows, out_path(o.common, "loss_sweep.csv").string());

  write_provenance(out_path(o.common, "attack_provenance.csv"),
                   {{"command", "attack"},
                    {"data", o.data},
                    {"checkpoint", o.checkpoint},
                    {"attack_steps", std::to_string(cfg.steps)},
                    {"step_size", format_double(cfg.step_size)},
                    {"rotation_bound", format_double(cfg.bound)},
                    {"random_start", cfg.random_start ? "1" : "0"},
                    {"objective", o.attack.objective},
                    {"sweep_restarts", std::to_string(o.sweep_restarts)},
                    {"attack_batch", std::to_string(o.attack.batch)},
                    {"seed", std::to_string(o.common.seed)}});

  double mean_final = 0.0;
  for (const AttackRecord& r : records) mean_final += r.final_objective;
  mean_final /= static_cast<double>(records.size());
  std::cout << "attack: " << records.size() << " records, mean final objective "
            << mean_final << "\n";
  return 0;
}

// ------------------------------------------------------------------ defend

struct DefendOpts {
  CommonOpts common;
  std::string data;
  std::string checkpoint;
  std::string mode = "one-step";
  int iterations = 10;
  int epochs = -1;  // resolved per mode: 50 iterative, 200 one-step
  double lr = 0.05;
  double lr_decay = 0.985;
  std::vector<std::string> ensemble;
  int ensemble_size = 3;
  int pretrain_epochs = 30;
  bool mix_clean = false;
  AttackOpts attack;
};

int cmd_defend(const DefendOpts& o) {
  ensure_out_dir(o.common.out);
  const Dataset ds = load_dataset(o.data);
  ClassifierParams target = load_checkpoint(o.checkpoint);
  const AttackConfig attack_cfg = o.attack.to_config();

  DefenseConfig cfg;
  cfg.iterations = o.iterations;
  cfg.ensemble_size = o.ensemble_size;
  cfg.mix_clean = o.mix_clean;
  cfg.retrain.lr = o.lr;
  cfg.retrain.lr_decay = o.lr_decay;

  const std::uint64_t defend_seed = derive_seed(o.common.seed, kSeedDefend);
  std::ofstream iter_csv(out_path(o.common, "defense_iterations.csv"));
  if (!iter_csv) throw IoError("cannot write defense_iterations.csv");
  iter_csv << "iteration,protocol,accuracy,mean_loss,n_samples,seed,config_digest\n";

  ClassifierParams robust;
  if (o.mode == "iterative") {
    cfg.retrain.epochs = o.epochs > 0 ? o.epochs : 50;
    auto [params, reports] =
        iterative_optimize(std::move(target), ds, attack_cfg, cfg, defend_seed,
                           o.common.workers);
    robust = std::move(params);
    for (std::size_t t = 0; t < reports.size(); ++t) {
      const EvalReport& r = reports[t];
      iter_csv << (t + 1) << ',' << r.protocol << ',' << format_double(r.accuracy)
               << ',' << format_double(r.mean_loss) << ',' << r.n_samples << ','
               << r.seed << ',' << r.config_digest << '\n';
    }
  } else if (o.mode == "one-step") {
    cfg.retrain.epochs = o.epochs > 0 ? o.epochs : 200;
    std::vector<ClassifierParams> ensemble;
    ensemble.push_back(target);
    for (const std::string& path : o.ensemble)
      ensemble.push_back(load_checkpoint(path));
    // pad with clean-trained width variants until the ensemble is full
    const int base_h1 = target.arch.h1;
    const std::vector<int> widths = {std::max(8, base_h1 / 2), base_h1 * 2, base_h1};
    for (std::size_t v = 0; ensemble.size() < static_cast<std::size_t>(cfg.ensemble_size);
         ++v) {
      if (v >= widths.size())
        throw ConfigError("defend: cannot auto-build more than " +
                          std::to_string(widths.size()) + " ensemble variants");
      Architecture arch = target.arch;
      arch.h1 = widths[v];
      TrainConfig pre;
      pre.epochs = o.pretrain_epochs;
      pre.lr = o.lr;
      pre.lr_decay = o.lr_decay;
      ensemble.push_back(clean_train(
          init_params(arch, derive_seed(o.common.seed, kSeedEnsemble, v)), ds, pre,
          derive_seed(o.common.seed, kSeedEnsemble, 100 + v)));
    }
    robust = one_step_optimize(std::move(target), ensemble, ds, attack_cfg, cfg,
                               defend_seed, o.common.workers);
    const EvalReport r = evaluate(robust, ds.test, Protocol::random(attack_cfg.bound),
                                  derive_seed(defend_seed, kSeedEval, 0),
                                  o.common.workers);
    iter_csv << 1 << ',' << r.protocol << ',' << format_double(r.accuracy) << ','
             << format_double(r.mean_loss) << ',' << r.n_samples << ',' << r.seed
             << ',' << r.config_digest << '\n';
  } else {
    throw ConfigError("defend: unknown mode '" + o.mode + "'");
  }
  iter_csv.close();

  save_checkpoint(robust, out_path(o.common, "robust.ckpt").string());
  write_provenance(out_path(o.common, "defend_provenance.csv"),
                   {{"command", "defend"},
                    {"data", o.data},
                    {"checkpoint", o.checkpoint},
                    {"mode", o.mode},
                    {"iterations", std::to_string(o.iterations)},
                    {"epochs", std::to_string(o.epochs)},
                    {"lr", format_double(o.lr)},
                    {"lr_decay", format_double(o.lr_decay)},
                    {"ensemble_size", std::to_string(o.ensemble_size)},
                    {"pretrain_epochs", std::to_string(o.pretrain_epochs)},
                    {"mix_clean", o.mix_clean ? "1" : "0"},
                    {"attack_steps", std::to_string(attack_cfg.steps)},
                    {"step_size", format_double(attack_cfg.step_size)},
                    {"rotation_bound", format_double(attack_cfg.bound)},
                    {"seed", std::to_string(o.common.seed)}});
  std::cout << "defend(" << o.mode << "): robust checkpoint written to "
            << o.common.out << "\n";
  return 0;
}

// -------------------------------------------------------------------- eval

struct EvalOpts {
  CommonOpts common;
  std::string data;
  std::string checkpoint;
  double bound = kPi;
  AttackOpts attack;
};

int cmd_eval(const EvalOpts& o) {
  ensure_out_dir(o.common.out);
  const Dataset ds = load_dataset(o.data);
  const ClassifierParams params = load_checkpoint(o.checkpoint);
  AttackConfig attack_cfg = o.attack.to_config();
  attack_cfg.bound = std::min(attack_cfg.bound, o.bound);
  const std::vector<EvalReport> reports =
      run_protocols(params, ds, attack_cfg, o.bound, o.common.seed, o.common.workers);
  emit_report(reports, out_path(o.common, "eval.csv").string());
  write_provenance(out_path(o.common, "eval_provenance.csv"),
                   {{"command", "eval"},
                    {"data", o.data},
                    {"checkpoint", o.checkpoint},
                    {"rotation_bound", format_double(o.bound)},
                    {"attack_steps", std::to_string(attack_cfg.steps)},
                    {"step_size", format_double(attack_cfg.step_size)},
                    {"seed", std::to_string(o.common.seed)}});
  for (const EvalReport& r : reports)
    std::cout << "eval[" << r.protocol << "]: accuracy " << r.accuracy
              << ", mean loss " << r.mean_loss
              << (r.success_rate ? ", success rate " + format_double(*r.success_rate)
                                 : std::string())
              << "\n";
  return 0;
}

// --------------------------------------------------------------- gradcheck

struct GradCheckOpts {
  CommonOpts common;
  std::string data;
  std::string checkpoint;
  int pairs = 200;
  double fd_step = 1e-4;
  double rel_tol = 1e-3;
};

int cmd_gradcheck(const GradCheckOpts& o) {
  ensure_out_dir(o.common.out);
  const Dataset ds = load_dataset(o.data);
  const ClassifierParams params = load_checkpoint(o.checkpoint);
  GradCheckConfig cfg;
  cfg.pairs = o.pairs;
  cfg.fd_step = o.fd_step;
  cfg.rel_tol = o.rel_tol;
  const GradCheckReport report =
      run_gradcheck(params, ds.test, cfg, derive_seed(o.common.seed, kSeedGrad));

  Digest digest;
  digest.add("gradcheck").add(o.pairs).add(o.fd_step).add(o.rel_tol).add(o.common.seed);
  std::ofstream csv(out_path(o.common, "gradcheck.csv"));
  if (!csv) throw IoError("cannot write gradcheck.csv");
  csv << "checked,skipped_ties,passed,worst_rel_err_x,worst_rel_err_y,worst_rel_err_z,"
         "fd_step,rel_tol,pass,config_digest\n";
  csv << report.checked << ',' << report.skipped_ties << ',' << report.passed << ','
      << format_double(report.worst_rel_err[0]) << ','
      << format_double(report.worst_rel_err[1]) << ','
      << format_double(report.worst_rel_err[2]) << ',' << format_double(o.fd_step)
      << ',' << format_double(o.rel_tol) << ',' << (report.pass ? 1 : 0) << ','
      << digest.hex() << '\n';
  csv.close();

  std::cout << "gradcheck: " << (report.pass ? "PASS" : "FAIL") << " (" << report.passed
            << "/" << report.checked << " within " << o.rel_tol << ", worst rel err x="
            << report.worst_rel_err[0] << " y=" << report.worst_rel_err[1]
            << " z=" << report.worst_rel_err[2] << ", skipped " << report.skipped_ties
            << " tied samples)\n";
  return report.pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adversarial rotation attacks and retraining for point-cloud classifiers"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI config file (flags win)");

  GenDataOpts gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-data", "Generate the synthetic shape dataset");
  add_common(gen_cmd, gen.common);
  gen_cmd->add_option("--classes", gen.classes,
                      "Shape recipes (default: all eight primitives)");
  gen_cmd->add_option("--train-per-class", gen.train_per_class, "Train samples per class");
  gen_cmd->add_option("--test-per-class", gen.test_per_class, "Test samples per class");
  gen_cmd->add_option("--points", gen.points, "Points per cloud");
  gen_cmd->add_option("--jitter", gen.jitter, "Gaussian coordinate jitter std-dev");
  gen_cmd->add_flag("--export-csv", gen.export_csv, "Also write dataset.csv");

  TrainOpts train;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a classifier from scratch");
  add_common(train_cmd, train.common);
  train_cmd->add_option("--data", train.data, "Dataset file")->required();
  train_cmd->add_option("--mode", train.mode, "clean | rotation-augment");
  train_cmd->add_option("--epochs", train.epochs,
                        "Training epochs (default 30 clean, 120 rotation-augment)");
  train_cmd->add_option("--lr", train.lr, "Learning rate");
  train_cmd->add_option("--lr-decay", train.lr_decay, "Per-epoch learning-rate factor");
  train_cmd->add_option("--rotation-bound", train.bound,
                        "Rotation range for rotation-augment mode and evaluation");
  train_cmd->add_option("--arch-h1", train.h1, "Per-point layer 1 width");
  train_cmd->add_option("--arch-h2", train.h2, "Per-point layer 2 width");
  train_cmd->add_option("--arch-h3", train.h3, "Global layer width");
  add_attack(train_cmd, train.attack);

  AttackCmdOpts attack;
  CLI::App* attack_cmd =
      app.add_subcommand("attack", "Attack the test split and sweep variants");
  add_common(attack_cmd, attack.common);
  attack_cmd->add_option("--data", attack.data, "Dataset file")->required();
  attack_cmd->add_option("--checkpoint", attack.checkpoint, "Model checkpoint")->required();
  attack_cmd->add_option("--sweep-restarts", attack.sweep_restarts,
                         "Random restarts per sample in the loss sweep");
  add_attack(attack_cmd, attack.attack);

  DefendOpts defend;
  CLI::App* defend_cmd =
      app.add_subcommand("defend", "Adversarial retraining (iterative or one-step)");
  add_common(defend_cmd, defend.common);
  defend_cmd->add_option("--data", defend.data, "Dataset file")->required();
  defend_cmd->add_option("--checkpoint", defend.checkpoint, "Target checkpoint")->required();
  defend_cmd->add_option("--mode", defend.mode, "iterative | one-step");
  defend_cmd->add_option("--iterations", defend.iterations, "Min-max iterations (iterative)");
  defend_cmd->add_option("--epochs", defend.epochs,
                         "Retraining epochs (default 50 iterative, 200 one-step)");
  defend_cmd->add_option("--lr", defend.lr, "Retraining learning rate");
  defend_cmd->add_option("--lr-decay", defend.lr_decay, "Per-epoch learning-rate factor");
  defend_cmd->add_option("--ensemble", defend.ensemble,
                         "Extra ensemble checkpoints (one-step)");
  defend_cmd->add_option("--ensemble-size", defend.ensemble_size,
                         "Total ensemble size for one-step mode");
  defend_cmd->add_option("--pretrain-epochs", defend.pretrain_epochs,
                         "Epochs for auto-built ensemble variants");
  defend_cmd->add_flag("--mix-clean", defend.mix_clean,
                       "Interleave a clean SGD step per sample");
  add_attack(defend_cmd, defend.attack);

  EvalOpts eval_opts;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate all three protocols");
  add_common(eval_cmd, eval_opts.common);
  eval_cmd->add_option("--data", eval_opts.data, "Dataset file")->required();
  eval_cmd->add_option("--checkpoint", eval_opts.checkpoint, "Model checkpoint")->required();
  eval_cmd->add_option("--rotation-bound", eval_opts.bound,
                       "Rotation range for the random protocol and attack projection");
  add_attack(eval_cmd, eval_opts.attack);

  GradCheckOpts grad;
  CLI::App* grad_cmd =
      app.add_subcommand("gradcheck", "Finite-difference check of the angle gradients");
  add_common(grad_cmd, grad.common);
  grad_cmd->add_option("--data", grad.data, "Dataset file")->required();
  grad_cmd->add_option("--checkpoint", grad.checkpoint, "Model checkpoint")->required();
  grad_cmd->add_option("--pairs", grad.pairs, "Tie-free pairs to check");
  grad_cmd->add_option("--fd-step", grad.fd_step, "Central-difference step (radians)");
  grad_cmd->add_option("--tol", grad.rel_tol, "Relative error tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_cmd->parsed()) return cmd_gen_data(gen);
    if (train_cmd->parsed()) return cmd_train(train);
    if (attack_cmd->parsed()) return cmd_attack(attack);
    if (defend_cmd->parsed()) return cmd_defend(defend);
    if (eval_cmd->parsed()) return cmd_eval(eval_opts);
    if (grad_cmd->parsed()) return cmd_gradcheck(grad);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
