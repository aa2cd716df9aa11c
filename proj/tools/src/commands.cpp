#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <string_view>

#include "qladder/analysis.hpp"
#include "qladder/bellman.hpp"
#include "qladder/density.hpp"
#include "qladder/errors.hpp"
#include "qladder/ladder.hpp"
#include "qladder/numeric.hpp"
#include "table.hpp"

namespace qladder::cli {

namespace {

constexpr std::string_view kManifestFormat = "qladder-brw/1";

const std::vector<std::string> kTrajectoryHeader{"step", "y_max", "y_min", "N"};
const std::vector<std::string> kSnapshotHeader{"step", "z", "count", "h"};

Block root_block(const Experiment& exp) { return Block(exp.doc, "config"); }

std::filesystem::path output_dir(const Experiment& exp) {
  if (exp.overrides.out) return *exp.overrides.out;
  const Block root = root_block(exp);
  if (!root.has("out")) throw CliError(ExitCode::kValidation, "no output directory: pass --out or set config.out");
  return root.string("out");
}

Json numbers_to_json(std::span<const double> xs) {
  Json arr = Json::array();
  for (double x : xs) arr.push_back(x);
  return arr;
}

std::string replica_dir(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "replica_%03zu", index);
  return buf;
}

}  // namespace

Experiment load_experiment(const std::filesystem::path& config_path, Overrides overrides) {
  Experiment exp{read_json_file(config_path, ExitCode::kValidation), config_path, std::move(overrides)};
  if (!exp.doc.is_object()) throw CliError(ExitCode::kValidation, config_path.string() + ": top level must be an object");
  return exp;
}

void cmd_stationary(const Experiment& exp) {
  const Block ladder = root_block(exp).child("ladder");
  const double a = ladder.number("a");
  const auto q = ladder.numbers("q");
  const auto out_dir = output_dir(exp);

  const LadderConfig config(a, q);
  const auto f = stationary_exogenous(config);
  const auto Q = config.tail_sums();
  const double lambda2 = second_eigenvalue_modulus(config);

  CsvWriter csv({"level", "density"});
  for (std::size_t i = 0; i < f.size(); ++i) {
    csv.field(i + 1).field(f[i]).end_row();
  }
  Json summary;
  summary["command"] = "stationary";
  summary["ladder"] = {{"m", config.m()}, {"a", config.a()}, {"q", numbers_to_json(config.q())}};
  summary["Q"] = numbers_to_json(Q);
  summary["f1"] = f[0];
  summary["second_eigenvalue_modulus"] = lambda2;

  OutputBundle bundle(out_dir);
  bundle.add("stationary.csv", csv.str());
  bundle.add_json("summary.json", summary);
  bundle.commit();
}

void cmd_density(const Experiment& exp) {
  const Block block = root_block(exp).child("density");
  const auto m = block.integer("m");
  const double a = block.number("a");
  std::vector<double> sweep;
  if (block.raw("q_m").is_array()) {
    sweep = block.numbers("q_m");
  } else {
    sweep.push_back(block.number("q_m"));
  }
  if (m < 2) block.fail("m", "must be >= 2");
  const auto out_dir = output_dir(exp);

  std::vector<StationarySolution> solutions;
  for (double qm : sweep) {
    solutions.push_back(solve_stationary_density(DensityModelConfig(static_cast<std::size_t>(m), a, qm)));
  }

  OutputBundle bundle(out_dir);
  CsvWriter summary({"index", "q_m", "mu", "x1", "at_boundary"});
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    const auto& sol = solutions[k];
    summary.field(k).field(sweep[k]).field(sol.mu).field(sol.x1).field(sol.at_boundary ? 1 : 0).end_row();
    CsvWriter profile({"level", "x"});
    for (std::size_t i = 0; i < sol.x.size(); ++i) profile.field(i + 1).field(sol.x[i]).end_row();
    char name[48];
    std::snprintf(name, sizeof name, "profile_%03zu.csv", k);
    bundle.add(name, profile.str());
  }
  bundle.add("summary.csv", summary.str());
  Json echo;
  echo["command"] = "density";
  echo["density"] = {{"m", m}, {"a", a}, {"q_m", numbers_to_json(sweep)}};
  bundle.add_json("summary.json", echo);
  bundle.commit();
}

void cmd_bellman(const Experiment& exp) {
  const Block block = root_block(exp).child("bellman");
  const EconomicParams params(block.number("a"), block.number("lambda"), block.number("beta0"), block.number("C"));
  const auto m = block.integer("m");
  const auto j_min = block.integer("j_min");
  const auto mode = block.string("mode");
  const double tol = block.optional_number("tol").value_or(kDefaultBellmanTol);
  constexpr auto kIntMax = std::numeric_limits<int>::max();
  if (std::abs(m) > kIntMax / 2) block.fail("m", "out of range");
  if (std::abs(j_min) > kIntMax / 2) block.fail("j_min", "out of range");
  if (mode != "leapfrog" && mode != "imitation") block.fail("mode", "must be \"leapfrog\" or \"imitation\"");
  const auto out_dir = output_dir(exp);

  Json result;
  result["command"] = "bellman";
  result["bellman"] = {{"a", params.a()},   {"lambda", params.lambda()}, {"beta0", params.beta0()},
                       {"C", params.cost()}, {"beta", params.beta()},     {"m", m},
                       {"j_min", j_min},     {"mode", mode},               {"tol", tol}};

  ValueSolution sol;
  if (mode == "leapfrog") {
    sol = solve_leapfrog_only(params, static_cast<int>(m), static_cast<int>(j_min), tol);
  } else {
    const double qm = block.number("q_m");
    const auto max_outer = block.optional_integer("max_outer").value_or(200);
    if (max_outer < 1 || max_outer > kIntMax) block.fail("max_outer", "must be a positive integer");
    result["bellman"]["q_m"] = qm;
    result["bellman"]["max_outer"] = max_outer;
    auto coupled = solve_leapfrog_imitation(params, static_cast<int>(m), static_cast<int>(j_min), qm, tol,
                                            static_cast<int>(max_outer));
    sol = std::move(coupled.values);
    result["visited_support_sizes"] = coupled.visited;
    result["density"] = {{"mu", coupled.density.mu},
                         {"x1", coupled.density.x1},
                         {"degenerate", coupled.density.degenerate},
                         {"x", numbers_to_json(coupled.density.x.values())}};
  }
  result["j0"] = sol.j0;
  result["support_size"] = sol.support_size;
  result["sweeps"] = sol.residuals.size();
  result["final_residual"] = sol.residuals.empty() ? 0.0 : sol.residuals.back();

  CsvWriter csv({"j", "V", "V_LF", "V_NLF"});
  for (int j = sol.j_min; j <= sol.m; ++j) {
    csv.field(j).field(sol.V(j)).field(sol.V_LF(j)).field(sol.V_NLF(j)).end_row();
  }
  OutputBundle bundle(out_dir);
  bundle.add("values.csv", csv.str());
  bundle.add_json("result.json", result);
  bundle.commit();
}

void cmd_brw(const Experiment& exp) {
  const Block root = root_block(exp);
  const Block block = root.child("brw");
  const BRWParams params(block.number("a"), block.number("mu"));
  const Block policy_block = block.child("policy");
  const auto policy_type = policy_block.string("type");
  CullPolicy policy;
  Json policy_json;
  Count default_firms = 1;
  if (policy_type == "keep_top_n") {
    const Count n = policy_block.count("n");
    if (n == 0) policy_block.fail("n", "must be >= 1");
    policy = KeepTopN{n};
    policy_json = {{"type", "keep_top_n"}, {"n", count_to_json(n)}};
    default_firms = n;
  } else if (policy_type == "window") {
    const auto width = policy_block.integer("width");
    if (width < 1) policy_block.fail("width", "must be >= 1");
    policy = WindowL{width};
    policy_json = {{"type", "window"}, {"width", width}};
  } else {
    policy_block.fail("type", "must be \"keep_top_n\" or \"window\"");
  }
  const auto steps = block.integer("steps");
  if (steps < 1) block.fail("steps", "must be >= 1");
  const Count firms = block.has("initial_firms") ? block.count("initial_firms") : default_firms;
  if (firms == 0) block.fail("initial_firms", "must be >= 1");

  std::int64_t snapshot_every = 0;
  if (exp.overrides.snapshot_every) {
    snapshot_every = *exp.overrides.snapshot_every;
  } else if (block.has("snapshot_every")) {
    snapshot_every = block.integer("snapshot_every");
  }
  if (snapshot_every < 0) throw CliError(ExitCode::kValidation, "snapshot_every must be >= 0");

  std::uint64_t seed = 0;
  if (exp.overrides.seed) {
    seed = *exp.overrides.seed;
  } else if (root.has("seed")) {
    seed = root.unsigned_integer("seed");
  } else {
    throw CliError(ExitCode::kValidation, "no base seed: pass --seed or set config.seed");
  }
  std::uint64_t replicas = 1;
  if (exp.overrides.replicas) {
    replicas = *exp.overrides.replicas;
  } else if (root.has("replicas")) {
    replicas = root.unsigned_integer("replicas");
  }
  if (replicas < 1 || replicas > 100000) throw CliError(ExitCode::kValidation, "replicas must lie in [1, 100000]");
  const auto out_dir = output_dir(exp);

  const auto initial = ParticleState::point_mass(firms, 0);
  const auto records = run_replicas(initial, params, policy, steps, seed, replicas, snapshot_every);

  Json header;
  header["format"] = kManifestFormat;
  header["command"] = "brw";
  header["generator"] = kGeneratorId;
  header["seed_mixing"] = kSeedMixingId;
  header["base_seed"] = seed;
  header["replicas"] = replicas;
  header["steps"] = steps;
  header["snapshot_every"] = snapshot_every;
  header["params"] = {{"a", params.a()}, {"mu", params.mu()}};
  header["policy"] = policy_json;
  header["initial"] = {{"firms", count_to_json(firms)}, {"level", 0}};

  OutputBundle bundle(out_dir);
  Json manifest = header;
  manifest["runs"] = Json::array();
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    const auto dir = replica_dir(r);
    manifest["runs"].push_back({{"replica", r}, {"seed", rec.seed}, {"dir", dir}});

    Json replica_header = header;
    replica_header["replica"] = r;
    replica_header["seed"] = rec.seed;
    bundle.add_json(std::filesystem::path(dir) / "header.json", replica_header);

    CsvWriter traj(kTrajectoryHeader);
    for (std::size_t t = 0; t < rec.y_max.size(); ++t) {
      traj.field(t).field(rec.y_max[t]).field(rec.y_min[t]).count(rec.total[t]).end_row();
    }
    bundle.add(std::filesystem::path(dir) / "trajectory.csv", traj.str());

    CsvWriter snaps(kSnapshotHeader);
    for (const auto& snap : rec.snapshots) {
      const auto h = snap.upper_cumulative();
      for (std::size_t z = 0; z < snap.counts.size(); ++z) {
        snaps.field(snap.step).field(z).count(snap.counts[z]).field(h[z]).end_row();
      }
    }
    bundle.add(std::filesystem::path(dir) / "snapshots.csv", snaps.str());
  }
  bundle.add_json("manifest.json", manifest);
  bundle.commit();
}

namespace {

struct LoadedRun {
  BRWParams params{0.5, 1.0};
  CullPolicy policy;
  Json policy_json;
  std::vector<TrajectoryRecord> records;
};

TrajectoryRecord load_replica(const std::filesystem::path& dir, std::uint64_t seed) {
  TrajectoryRecord rec;
  rec.seed = seed;
  const auto traj_path = dir / "trajectory.csv";
  const auto traj = read_csv(traj_path, kTrajectoryHeader);
  if (traj.rows.empty()) throw CliError(ExitCode::kIo, traj_path.string() + ": no rows");
  for (std::size_t i = 0; i < traj.rows.size(); ++i) {
    const auto& row = traj.rows[i];
    const std::string where = traj_path.string() + " row " + std::to_string(i + 1);
    if (parse_integer_field(row[0], where) != static_cast<std::int64_t>(i)) {
      throw CliError(ExitCode::kIo, where + ": steps must run 0, 1, 2, ...");
    }
    rec.y_max.push_back(parse_integer_field(row[1], where));
    rec.y_min.push_back(parse_integer_field(row[2], where));
    rec.total.push_back(parse_count_field(row[3], where));
    if (rec.y_max.back() < rec.y_min.back()) throw CliError(ExitCode::kIo, where + ": y_max < y_min");
  }

  const auto snap_path = dir / "snapshots.csv";
  const auto snaps = read_csv(snap_path, kSnapshotHeader);
  for (std::size_t i = 0; i < snaps.rows.size(); ++i) {
    const auto& row = snaps.rows[i];
    const std::string where = snap_path.string() + " row " + std::to_string(i + 1);
    const auto step = parse_integer_field(row[0], where);
    const auto z = parse_integer_field(row[1], where);
    const auto count = parse_count_field(row[2], where);
    if (z == 0) {
      if (step < 0 || step >= static_cast<std::int64_t>(rec.y_min.size())) {
        throw CliError(ExitCode::kIo, where + ": snapshot step outside the trajectory");
      }
      if (!rec.snapshots.empty() && step <= rec.snapshots.back().step) {
        throw CliError(ExitCode::kIo, where + ": snapshot steps must increase");
      }
      rec.snapshots.push_back(Snapshot{step, rec.y_min[static_cast<std::size_t>(step)], {}});
    } else if (rec.snapshots.empty() || rec.snapshots.back().step != step ||
               static_cast<std::int64_t>(rec.snapshots.back().counts.size()) != z) {
      throw CliError(ExitCode::kIo, where + ": snapshot levels must run z = 0, 1, 2, ... per step");
    }
    rec.snapshots.back().counts.push_back(count);
  }
  return rec;
}

LoadedRun load_run(const std::filesystem::path& input) {
  const Json manifest = read_json_file(input / "manifest.json", ExitCode::kIo);
  const Block m(manifest, "manifest", ExitCode::kIo);
  if (m.string("format") != kManifestFormat) m.fail("format", "unsupported manifest format");
  const Block params_block = m.child("params");
  LoadedRun run;
  try {
    run.params = BRWParams(params_block.number("a"), params_block.number("mu"));
  } catch (const ParameterError& e) {
    throw CliError(ExitCode::kIo, std::string("manifest.params: ") + e.what());
  }
  const Block policy = m.child("policy");
  const auto type = policy.string("type");
  if (type == "keep_top_n") {
    run.policy = KeepTopN{policy.count("n")};
  } else if (type == "window") {
    run.policy = WindowL{policy.integer("width")};
  } else {
    policy.fail("type", "unknown culling policy");
  }
  run.policy_json = manifest.at("policy");

  const Json& runs = m.raw("runs");
  if (!runs.is_array() || runs.empty()) m.fail("runs", "must be a non-empty array");
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const Block entry(runs[r], "manifest.runs[" + std::to_string(r) + "]", ExitCode::kIo);
    const auto dir = entry.string("dir");
    if (dir.empty() || dir.find("..") != std::string::npos || std::filesystem::path(dir).is_absolute()) {
      entry.fail("dir", "must be a relative replica directory name");
    }
    run.records.push_back(load_replica(input / dir, entry.unsigned_integer("seed")));
  }
  return run;
}

struct MeanAndError {
  double mean = 0.0;
  double stderr_ = 0.0;
};

MeanAndError mean_and_error(const std::vector<double>& xs) {
  CompensatedSum sum;
  for (double x : xs) sum.add(x);
  const double n = static_cast<double>(xs.size());
  MeanAndError out{sum.value() / n, std::numeric_limits<double>::quiet_NaN()};
  if (xs.size() >= 2) {
    CompensatedSum sq;
    for (double x : xs) sq.add((x - out.mean) * (x - out.mean));
    out.stderr_ = std::sqrt(sq.value() / (n - 1.0) / n);
  }
  return out;
}

}  // namespace

void cmd_analyze(const Experiment& exp) {
  const Block block = root_block(exp).child("analyze");
  const std::filesystem::path input = block.string("input");
  const auto burn_in = block.integer("burn_in");
  if (burn_in < 0) block.fail("burn_in", "must be >= 0");
  const auto min_snapshots = block.optional_integer("min_snapshots").value_or(100);
  if (min_snapshots < 1) block.fail("min_snapshots", "must be >= 1");
  const auto out_dir = output_dir(exp);

  const LoadedRun run = load_run(input);
  const SpeedProfile profile = find_gamma_c(run.params);

  std::vector<double> velocities;
  std::vector<double> naive_errors;
  std::vector<double> supports;
  std::vector<double> populations;
  for (const auto& rec : run.records) {
    const auto est = estimate_velocity(rec, burn_in);
    velocities.push_back(est.v_hat);
    naive_errors.push_back(est.stderr_naive);
    supports.push_back(support_statistics(rec, burn_in).mean);
    populations.push_back(mean_population(rec, burn_in));
  }
  auto velocity = mean_and_error(velocities);
  const bool across_replicas = velocities.size() >= 2;
  if (!across_replicas) velocity.stderr_ = naive_errors.front();
  const double mean_support = mean_and_error(supports).mean;
  const double mean_n = mean_and_error(populations).mean;

  Json verdict;
  verdict["command"] = "analyze";
  verdict["input"] = input.string();
  verdict["burn_in"] = burn_in;
  verdict["replicas"] = run.records.size();
  verdict["params"] = {{"a", run.params.a()}, {"mu", run.params.mu()}};
  verdict["policy"] = run.policy_json;
  verdict["speed_profile"] = {{"gamma_c", profile.gamma_c}, {"v_c", profile.v_c}, {"v_second", profile.v_second}};

  double size_parameter = 0.0;
  double predicted = 0.0;
  Json support = {{"mean", mean_support}};
  if (const auto* keep = std::get_if<KeepTopN>(&run.policy)) {
    const double n = to_double(keep->n);
    size_parameter = n;
    predicted = predict_vN(profile, n);
    const double L0 = predict_L0(profile, n);
    support["L0"] = L0;
    support["excess_over_L0"] = mean_support - L0;
  } else {
    const auto width = static_cast<double>(std::get<WindowL>(run.policy).width);
    size_parameter = width;
    predicted = predict_vL(profile, width);
    const double N0 = predict_N0(profile, width);
    verdict["population"] = {{"mean", mean_n},
                             {"N0", N0},
                             {"log_mean_over_L", std::log(mean_n) / width},
                             {"relative_error_vs_gamma_c", std::abs(std::log(mean_n) / width - profile.gamma_c) /
                                                               profile.gamma_c}};
  }
  verdict["support"] = support;
  const double band = 0.5 * (profile.v_c - predicted);
  verdict["velocity"] = {{"measured", velocity.mean},
                         {"stderr", velocity.stderr_},
                         {"stderr_kind", across_replicas ? "across_replicas" : "naive_least_squares"},
                         {"predicted", predicted},
                         {"v_c", profile.v_c},
                         {"below_v_c", velocity.mean < profile.v_c},
                         {"within_half_correction_band", std::abs(velocity.mean - predicted) <= band},
                         {"theorem_applies", run.params.mu() == 1.0}};

  CsvWriter velocity_csv({"N_or_L", "predicted", "measured", "stderr"});
  velocity_csv.field(size_parameter).field(predicted).field(velocity.mean).field(velocity.stderr_).end_row();

  CsvWriter shape_csv({"z", "h", "in_fit_window"});
  Json shape;
  try {
    const auto front = estimate_front_profile(run.records, burn_in, static_cast<std::size_t>(min_snapshots));
    shape["snapshots"] = front.snapshots;
    shape["mean_support"] = front.mean_support;
    std::pair<int, int> window{1, 0};
    try {
      window = bulk_window(front);
      const double slope = fit_decay_slope(front, window.first, window.second);
      shape["fit_window"] = {window.first, window.second};
      shape["slope"] = slope;
      shape["expected_slope"] = -profile.gamma_c;
      shape["relative_error"] = std::abs(slope + profile.gamma_c) / profile.gamma_c;
    } catch (const WindowError& e) {
      shape["slope"] = nullptr;
      shape["reason"] = e.what();
    }
    for (std::size_t z = 0; z < front.h.size(); ++z) {
      const auto zi = static_cast<int>(z);
      shape_csv.field(z).field(front.h[z]).field(zi >= window.first && zi <= window.second ? 1 : 0).end_row();
    }
  } catch (const WindowError& e) {
    shape = {{"slope", nullptr}, {"reason", e.what()}};
  }
  verdict["shape"] = shape;

  OutputBundle bundle(out_dir);
  bundle.add("velocity.csv", velocity_csv.str());
  bundle.add("shape.csv", shape_csv.str());
  bundle.add_json("verdict.json", verdict);
  bundle.commit();
}

int exit_code_for(const std::exception& e) noexcept {
  if (const auto* cli = dynamic_cast<const CliError*>(&e)) return static_cast<int>(cli->code());
  if (dynamic_cast<const NumericError*>(&e) || dynamic_cast<const ModelViolationError*>(&e) ||
      dynamic_cast<const ExtinctionError*>(&e)) {
    return static_cast<int>(ExitCode::kNumeric);
  }
  if (dynamic_cast<const Error*>(&e)) return static_cast<int>(ExitCode::kValidation);
  if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return static_cast<int>(ExitCode::kIo);
  return 1;
}

}  // namespace qladder::cli
