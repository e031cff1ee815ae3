#include "artpoint/eval.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "artpoint/common.hpp"
#include "artpoint/geometry.hpp"
#include "artpoint/io_util.hpp"
#include "artpoint/parallel.hpp"

namespace artpoint {

namespace {

constexpr std::uint64_t kStreamEval = 0x4556414cu;
constexpr std::uint64_t kStreamSweep = 0x53574550u;

Digest attack_digest(const AttackConfig& cfg) {
  Digest d;
  d.add(cfg.steps)
      .add(cfg.step_size)
      .add(cfg.bound)
      .add(cfg.random_start ? 1 : 0)
      .add(static_cast<int>(cfg.objective))
      .add(cfg.restarts);
  return d;
}

}  // namespace

std::string Protocol::name() const {
  switch (kind) {
    case Kind::kClean: return "clean";
    case Kind::kRandom: return "random";
    default: return "attack";
  }
}

std::string Protocol::digest() const {
  Digest d;
  d.add(name());
  if (kind == Kind::kRandom) d.add(bound);
  if (kind == Kind::kAttack) d = attack_digest(attack).add(name());
  return d.hex();
}

EvalReport evaluate(const ClassifierParams& params, std::span<const PointCloud> test,
                    const Protocol& protocol, std::uint64_t seed, int workers) {
  if (test.empty()) throw std::invalid_argument("evaluate: empty test set");

  struct PerSample {
    bool correct_before = false;
    bool correct_after = false;
    double loss = 0.0;
  };
  std::vector<PerSample> rows(test.size());

  parallel_for(test.size(), workers, [&](std::size_t i) {
    const PointCloud& cloud = test[i];
    PerSample& row = rows[i];
    switch (protocol.kind) {
      case Protocol::Kind::kClean: {
        const Logits z = forward(params, cloud);
        row.correct_after =
            static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin()) ==
            cloud.label;
        row.loss = cross_entropy(z, cloud.label);
        break;
      }
      case Protocol::Kind::kRandom: {
        Rng rng(derive_seed(seed, kStreamEval, i));
        const PointCloud rotated =
            apply_rotation(compose(random_angles(protocol.bound, rng)), cloud);
        const Logits z = forward(params, rotated);
        row.correct_after =
            static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin()) ==
            cloud.label;
        row.loss = cross_entropy(z, cloud.label);
        break;
      }
      case Protocol::Kind::kAttack: {
        row.correct_before = predict(params, cloud) == cloud.label;
        Rng rng(derive_seed(seed, kStreamEval, i));
        const AttackOutcome outcome =
            axis_wise_attack(params, cloud, cloud.label, protocol.attack, rng);
        const Logits z = forward(params, outcome.adversarial);
        row.correct_after =
            static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin()) ==
            cloud.label;
        row.loss = cross_entropy(z, cloud.label);
        break;
      }
    }
  });

  EvalReport report;
  report.protocol = protocol.name();
  report.n_samples = static_cast<int>(test.size());
  report.seed = seed;
  report.config_digest = protocol.digest();
  int correct = 0, correct_before = 0, correct_both = 0;
  double loss_sum = 0.0;
  for (const PerSample& row : rows) {
    correct += row.correct_after ? 1 : 0;
    correct_before += row.correct_before ? 1 : 0;
    correct_both += (row.correct_before && row.correct_after) ? 1 : 0;
    loss_sum += row.loss;
  }
  report.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
  report.mean_loss = loss_sum / static_cast<double>(test.size());
  if (protocol.kind == Protocol::Kind::kAttack && correct_before > 0)
    report.success_rate = success_rate_from_counts(correct_before, correct_both);
  return report;
}

double success_rate_from_counts(int correct_before, int correct_before_and_after) {
  if (correct_before <= 0)
    throw UndefinedMetricError("success rate undefined: nothing correct before attack");
  if (correct_before_and_after < 0 || correct_before_and_after > correct_before)
    throw std::invalid_argument("success_rate_from_counts: inconsistent counts");
  return static_cast<double>(correct_before - correct_before_and_after) /
         static_cast<double>(correct_before);
}

double attack_success_rate(const ClassifierParams& params,
                           std::span<const PointCloud> test, const AttackConfig& cfg,
                           std::uint64_t seed, int workers) {
  const EvalReport report =
      evaluate(params, test, Protocol::attacked(cfg), seed, workers);
  if (!report.success_rate)
    throw UndefinedMetricError(
        "attack_success_rate: no sample is correctly classified before the attack");
  return *report.success_rate;
}

std::vector<SweepRow> loss_sweep(const ClassifierParams& params,
                                 std::span<const PointCloud> test,
                                 std::span<const AttackVariant> variants,
                                 std::uint64_t seed, int workers) {
  if (variants.empty()) throw std::invalid_argument("loss_sweep: no variants");
  if (test.empty()) throw std::invalid_argument("loss_sweep: empty test set");

  std::vector<SweepRow> rows;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    const AttackVariant& variant = variants[v];
    const int restarts = std::max(1, variant.cfg.restarts);
    const std::size_t steps =
        variant.kind == AttackVariant::Kind::kRandom
            ? 1
            : static_cast<std::size_t>(std::max(0, variant.cfg.steps)) + 1;

    // per-sample traces under both aggregations
    std::vector<std::vector<double>> best(test.size()), mean(test.size());
    parallel_for(test.size(), workers, [&](std::size_t i) {
      std::vector<double> mean_acc(steps, 0.0);
      std::vector<double> best_trace;
      double best_final = 0.0;
      for (int r = 0; r < restarts; ++r) {
        Rng rng(derive_seed(seed, kStreamSweep,
                            (v << 40) ^ (static_cast<std::uint64_t>(r) << 24) ^ i));
        AttackOutcome outcome;
        switch (variant.kind) {
          case AttackVariant::Kind::kRandom:
            outcome = random_rotation_attack(params, test[i], test[i].label,
                                             variant.cfg.bound,
                                             variant.cfg.objective, rng);
            break;
          case AttackVariant::Kind::kAxisWise:
            outcome = axis_wise_attack(params, test[i], test[i].label, variant.cfg, rng);
            break;
          case AttackVariant::Kind::kStandard:
            outcome = standard_attack(params, test[i], test[i].label, variant.cfg, rng);
            break;
        }
        for (std::size_t s = 0; s < steps; ++s) mean_acc[s] += outcome.trace[s];
        if (r == 0 || outcome.trace.back() > best_final) {
          best_final = outcome.trace.back();
          best_trace = outcome.trace;
        }
      }
      for (double& v2 : mean_acc) v2 /= static_cast<double>(restarts);
      mean[i] = std::move(mean_acc);
      best[i] = std::move(best_trace);
    });

    const std::string digest =
        attack_digest(variant.cfg).add(variant.name).add(static_cast<int>(variant.kind)).hex();
    const auto reduce = [&](const std::vector<std::vector<double>>& traces) {
      std::vector<double> out(steps, 0.0);
      for (const auto& t : traces)
        for (std::size_t s = 0; s < steps; ++s) out[s] += t[s];
      for (double& v2 : out) v2 /= static_cast<double>(traces.size());
      return out;
    };
    rows.push_back({variant.name, "mean", reduce(mean), digest});
    rows.push_back({variant.name, "best", reduce(best), digest});
  }
  return rows;
}

void emit_report(std::span<const EvalReport> reports, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("emit_report: cannot open " + path);
  out << "protocol,accuracy,mean_loss,success_rate,n_samples,seed,config_digest\n";
  for (const EvalReport& r : reports) {
    out << r.protocol << ',' << format_double(r.accuracy) << ','
        << format_double(r.mean_loss) << ','
        << (r.success_rate ? format_double(*r.success_rate) : std::string()) << ','
        << r.n_samples << ',' << r.seed << ',' << r.config_digest << '\n';
  }
  if (!out) throw IoError("emit_report: write failed for " + path);
}

void save_sweep_csv(std::span<const SweepRow> rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_sweep_csv: cannot open " + path);
  out << "variant,aggregation,step,mean_objective,config_digest\n";
  for (const SweepRow& row : rows)
    for (std::size_t s = 0; s < row.mean_objective.size(); ++s)
      out << row.variant << ',' << row.aggregation << ',' << s << ','
          << format_double(row.mean_objective[s]) << ',' << row.config_digest << '\n';
  if (!out) throw IoError("save_sweep_csv: write failed for " + path);
}

}  // namespace artpoint
