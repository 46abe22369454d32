#include "cli.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pinchwave/invariants.hpp"
#include "pinchwave/units.hpp"

namespace pinchwave::cli {

using nlohmann::json;

void RunConfig::merge_from(const RunConfig& o) {
  auto take = [](auto& dst, const auto& src) {
    if (src) dst = src;
  };
  take(carrier_frequency_ghz, o.carrier_frequency_ghz);
  take(noise_power_dbm, o.noise_power_dbm);
  take(waveguide_height_m, o.waveguide_height_m);
  take(min_spacing_m, o.min_spacing_m);
  take(region_side_m, o.region_side_m);
  take(refractive_index, o.refractive_index);
  take(power_dbm, o.power_dbm);
  take(feed_x_m, o.feed_x_m);
  take(num_antennas, o.num_antennas);
  take(user, o.user);
  take(systems, o.systems);
  take(sweep_variable, o.sweep_variable);
  take(sweep_values, o.sweep_values);
  take(trials, o.trials);
  take(seed, o.seed);
  take(step_div, o.step_div);
  take(phase_tolerance_rad, o.phase_tolerance_rad);
  take(oracle_step_div, o.oracle_step_div);
  take(oracle_window_halfwidth_m, o.oracle_window_halfwidth_m);
  take(full_span, o.full_span);
  take(cases, o.cases);
  take(out, o.out);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) items.push_back(item.substr(b, e - b + 1));
  }
  return items;
}

namespace {

double parse_number(const std::string& s, const std::string& field) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ConfigError(field + ": not a number: '" + s + "'");
  return v;
}

std::vector<double> parse_numbers(const std::string& text, const std::string& field) {
  std::vector<double> values;
  for (const auto& item : split_list(text)) values.push_back(parse_number(item, field));
  return values;
}

template <typename T>
T get_field(const json& j, const std::string& key, const std::string& origin) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(origin + ": field '" + key + "' has the wrong type (" + j.type_name() + ")");
  }
}

}  // namespace

UserPosition parse_user(const std::string& text) {
  const auto parts = split_list(text);
  if (parts.size() != 2) throw ConfigError("user: expected X,Y but got '" + text + "'");
  return {parse_number(parts[0], "user"), parse_number(parts[1], "user")};
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(origin + ": top level must be a JSON object");

  RunConfig cfg;
  for (const auto& [key, value] : j.items()) {
    auto num = [&] { return get_field<double>(value, key, origin); };
    if (key == "carrier_frequency_ghz") cfg.carrier_frequency_ghz = num();
    else if (key == "noise_power_dbm") cfg.noise_power_dbm = num();
    else if (key == "waveguide_height_m") cfg.waveguide_height_m = num();
    else if (key == "min_spacing_m") cfg.min_spacing_m = num();
    else if (key == "region_side_m") cfg.region_side_m = num();
    else if (key == "refractive_index") cfg.refractive_index = num();
    else if (key == "power_dbm") cfg.power_dbm = num();
    else if (key == "feed_x_m") cfg.feed_x_m = num();
    else if (key == "num_antennas") cfg.num_antennas = get_field<int>(value, key, origin);
    else if (key == "user") {
      if (value.is_string()) {
        cfg.user = parse_user(value.get<std::string>());
      } else {
        const auto xy = get_field<std::vector<double>>(value, key, origin);
        if (xy.size() != 2) throw ConfigError(origin + ": field 'user' must hold two numbers");
        cfg.user = UserPosition{xy[0], xy[1]};
      }
    } else if (key == "systems") {
      cfg.systems = value.is_string() ? split_list(value.get<std::string>())
                                      : get_field<std::vector<std::string>>(value, key, origin);
    } else if (key == "sweep_variable") cfg.sweep_variable = get_field<std::string>(value, key, origin);
    else if (key == "sweep_values") cfg.sweep_values = get_field<std::vector<double>>(value, key, origin);
    else if (key == "trials") cfg.trials = get_field<int>(value, key, origin);
    else if (key == "seed") cfg.seed = get_field<std::uint64_t>(value, key, origin);
    else if (key == "step_div") cfg.step_div = num();
    else if (key == "phase_tolerance_rad") cfg.phase_tolerance_rad = num();
    else if (key == "oracle_step_div") cfg.oracle_step_div = num();
    else if (key == "oracle_window_halfwidth_m") cfg.oracle_window_halfwidth_m = num();
    else if (key == "full_span") cfg.full_span = get_field<bool>(value, key, origin);
    else if (key == "cases") cfg.cases = get_field<int>(value, key, origin);
    else if (key == "out") cfg.out = get_field<std::string>(value, key, origin);
    else throw ConfigError(origin + ": unknown field '" + key + "'");
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

ResolvedRun resolve(const RunConfig& cfg) {
  ResolvedRun run;
  auto& md = run.metadata;
  auto record = [&md](const std::string& key, const std::string& value, bool user_set) {
    md.push_back({key, value, user_set});
  };
  auto pick = [&](const std::optional<double>& v, double fallback, const std::string& key) {
    const double value = v.value_or(fallback);
    record(key, format_double(value), v.has_value());
    return value;
  };

  SystemParams& p = run.params;
  p.carrier_frequency_hz = ghz_to_hz(pick(cfg.carrier_frequency_ghz, 28.0, "carrier_frequency_ghz"));
  p.noise_power_w = dbm_to_watts(pick(cfg.noise_power_dbm, -90.0, "noise_power_dbm"));
  p.waveguide_height_m = pick(cfg.waveguide_height_m, 3.0, "waveguide_height_m");
  p.refractive_index = pick(cfg.refractive_index, 1.4, "refractive_index");
  const double lambda = kSpeedOfLight / p.carrier_frequency_hz;
  p.min_spacing_m = pick(cfg.min_spacing_m, lambda / 2.0, "min_spacing_m");
  p.region_side_m = pick(cfg.region_side_m, 10.0, "region_side_m");
  p.feed_x_m = pick(cfg.feed_x_m, SystemParams::default_feed_x(p.region_side_m), "feed_x_m");
  p.total_power_w = dbm_to_watts(pick(cfg.power_dbm, 30.0, "power_dbm"));
  p.num_antennas = cfg.num_antennas.value_or(2);
  record("num_antennas", std::to_string(p.num_antennas), cfg.num_antennas.has_value());

  if (cfg.user) {
    run.user = cfg.user;
    record("user", format_double(cfg.user->x_m) + "," + format_double(cfg.user->y_m), true);
  }

  ExperimentSpec& spec = run.spec;
  spec.systems.clear();
  const std::vector<std::string> default_systems{"pinching_two_stage", "conventional", "movable"};
  const auto& names = cfg.systems ? *cfg.systems : default_systems;
  std::string joined;
  for (const auto& name : names) {
    const auto kind = parse_system(name);
    if (!kind) throw ConfigError("systems: unknown system '" + name + "'");
    spec.systems.push_back(*kind);
    joined += (joined.empty() ? "" : ";") + name;
  }
  record("systems", joined, cfg.systems.has_value());

  const std::string variable = cfg.sweep_variable.value_or("power_dbm");
  const auto parsed_variable = parse_sweep_variable(variable);
  if (!parsed_variable) throw ConfigError("sweep_variable: unknown variable '" + variable + "'");
  spec.sweep_variable = *parsed_variable;
  record("sweep_variable", variable, cfg.sweep_variable.has_value());

  spec.sweep_values = cfg.sweep_values.value_or(std::vector<double>{10, 15, 20, 25, 30, 35, 40});
  std::string values;
  for (double v : spec.sweep_values) values += (values.empty() ? "" : ";") + format_double(v);
  record("sweep_values", values, cfg.sweep_values.has_value());

  bool has_oracle = false;
  for (auto k : spec.systems) has_oracle = has_oracle || k == SystemKind::PinchingOracle;
  spec.trials = cfg.trials.value_or(has_oracle ? ExperimentSpec::kDefaultOracleTrials : 10000);
  record("trials", std::to_string(spec.trials), cfg.trials.has_value());
  spec.rng_seed = cfg.seed.value_or(1);
  record("seed", std::to_string(spec.rng_seed), cfg.seed.has_value());
  record("rng_algorithm", std::string(kRngAlgorithm), false);

  SolverConfig& solver = run.solver;
  solver.refinement_step_divisor = pick(cfg.step_div, 200.0, "step_div");
  solver.oracle_step_divisor = pick(cfg.oracle_step_div, 50.0, "oracle_step_div");
  solver.oracle_window_halfwidth_m =
      pick(cfg.oracle_window_halfwidth_m, 5.0 * lambda, "oracle_window_halfwidth_m");
  solver.oracle_full_span = cfg.full_span.value_or(false);
  record("full_span", solver.oracle_full_span ? "true" : "false", cfg.full_span.has_value());

  p.validate();
  run.refinement = solver.refinement(p);
  run.refinement.phase_tolerance_rad = pick(cfg.phase_tolerance_rad, 0.05, "phase_tolerance_rad");
  if (!run.refinement.is_valid(p))
    throw std::invalid_argument("step_div: refinement step must be positive and below a quarter guided wavelength");
  if (!solver.oracle(p).is_valid(p))
    throw std::invalid_argument("oracle settings: step must be at most one fiftieth of a wavelength");
  spec.threads = threads_from_env();
  return run;
}

std::string sweep_csv(const SweepResult& result, const ResolvedRun& run) {
  std::ostringstream os;
  os << "# pinchwave sweep\n";
  for (const auto& m : run.metadata)
    os << "# " << m.key << '=' << m.value << " (" << (m.user_set ? "user" : "default") << ")\n";
  os << "sweep_value,system,mean_rate_bps_hz,stderr,trials,seed\n";
  for (const auto& row : result.rows) {
    os << format_double(row.sweep_value) << ',' << to_string(row.system) << ','
       << format_double(row.estimate.mean) << ',' << format_double(row.estimate.std_error) << ','
       << row.estimate.trials << ',' << result.spec.rng_seed << '\n';
  }
  return os.str();
}

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << content;
}

std::string join(const std::vector<double>& v, int precision = 9) {
  std::ostringstream os;
  os << std::setprecision(precision);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  return os.str();
}

int cmd_solve(const ResolvedRun& run, const std::optional<std::string>& out_path, std::ostream& out,
              std::ostream& err) {
  if (!run.user) {
    err << "solve: a user position is required (--user X,Y or \"user\" in the config)\n";
    return kConfigError;
  }
  const UserPosition user = *run.user;
  const SystemParams& p = run.params;
  const TwoStageResult ts = two_stage_optimize(user, p, run.refinement);
  const RateReport conv = conventional_array_rate(user, p);
  const MovableSolution mov = movable_placement(user, p);

  std::vector<double> gaps;
  for (std::size_t n = 1; n < ts.refined_layout.size(); ++n)
    gaps.push_back(phase_gap(ts.report.per_antenna_phase_rad[n - 1], ts.report.per_antenna_phase_rad[n]));

  if (!ts.stage1.condition_satisfied)
    err << "warning: y_m^2 + d^2 < (N-1)^2 spacing^2; the closed-form stage-1 layout may not be optimal\n";

  out << std::setprecision(9);
  out << "user: (" << user.x_m << ", " << user.y_m << ") m, N = " << p.num_antennas
      << ", spacing = " << p.min_spacing_m << " m\n";
  out << "stage-1 layout [m]:  " << join(ts.stage1.layout.antenna_x) << "\n";
  out << "refined layout [m]:  " << join(ts.refined_layout.antenna_x) << "\n";
  out << "distances [m]:       " << join(ts.report.per_antenna_distance_m) << "\n";
  out << "phases [rad]:        " << join(ts.report.per_antenna_phase_rad, 12) << "\n";
  out << "phase gaps [rad]:    " << join(gaps) << "\n";
  out << "refinement accepted: " << (ts.refinement_accepted ? "yes" : "no") << "\n";
  out << "rate pinching two-stage  [bit/s/Hz]: " << ts.report.rate_bits << "\n";
  out << "rate pinching stage-1    [bit/s/Hz]: " << ts.stage1_report.rate_bits << "\n";
  out << "rate conventional        [bit/s/Hz]: " << conv.rate_bits << "\n";
  out << "rate movable             [bit/s/Hz]: " << mov.report.rate_bits << "\n";

  if (out_path) {
    json j;
    j["user"] = {user.x_m, user.y_m};
    json md = json::object();
    for (const auto& m : run.metadata) md[m.key] = {{"value", m.value}, {"origin", m.user_set ? "user" : "default"}};
    j["config"] = md;
    j["stage1"] = {{"antenna_x_m", ts.stage1.layout.antenna_x},
                   {"objective_inv_m", ts.stage1.objective_value},
                   {"condition_satisfied", ts.stage1.condition_satisfied},
                   {"rate_bps_hz", ts.stage1_report.rate_bits}};
    j["pinching"] = {{"antenna_x_m", ts.refined_layout.antenna_x},
                     {"distance_m", ts.report.per_antenna_distance_m},
                     {"phase_rad", ts.report.per_antenna_phase_rad},
                     {"phase_gap_rad", gaps},
                     {"max_phase_gap_rad", ts.max_phase_gap_rad},
                     {"refinement_accepted", ts.refinement_accepted},
                     {"snr_linear", ts.report.snr_linear},
                     {"rate_bps_hz", ts.report.rate_bits}};
    j["conventional"] = {{"snr_linear", conv.snr_linear}, {"rate_bps_hz", conv.rate_bits}};
    std::vector<double> ys;
    for (const auto& a : mov.antennas) ys.push_back(a.y);
    j["movable"] = {{"antenna_y_m", ys}, {"snr_linear", mov.report.snr_linear}, {"rate_bps_hz", mov.report.rate_bits}};
    write_file(*out_path, j.dump(2) + "\n");
  }
  return kOk;
}

int cmd_sweep(const ResolvedRun& run, const std::optional<std::string>& out_path, std::ostream& out) {
  const SweepResult result = run_sweep(run.spec, run.params, run.solver);
  const std::string csv = sweep_csv(result, run);
  if (out_path) write_file(*out_path, csv);
  else out << csv;
  return kOk;
}

int cmd_verify(const ResolvedRun& run, std::optional<int> cases, std::ostream& out, std::ostream& err) {
  const auto sizes = cases ? invariants::SuiteSizes::uniform(*cases) : invariants::SuiteSizes{};
  bool all = true;
  for (const auto& r : invariants::run_all(run.spec.rng_seed, sizes, run.params)) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.cases << " cases)\n";
    if (!r.passed) {
      err << "invariant failed: " << r.name << ": " << r.detail << "\n";
      all = false;
    }
  }
  return all ? kOk : kInvariantFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pinching-antenna placement optimizer and rate simulator", "pinchwave"};
  app.require_subcommand(1);

  std::optional<std::string> config_path, user, systems, sweep_var, values, out_path;
  std::optional<int> antennas, trials, cases;
  std::optional<double> power_dbm, side_length, step_div;
  std::optional<std::uint64_t> seed;
  bool full_span = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--antennas", antennas, "Number of antennas N");
    sub->add_option("--power-dbm", power_dbm, "Transmit power [dBm]");
    sub->add_option("--side-length", side_length, "Side length D of the square region [m]");
    sub->add_option("--step-div", step_div, "Refinement step is wavelength / K");
    sub->add_option("--seed", seed, "RNG seed");
    sub->add_option("--out", out_path, "Output file");
  };

  CLI::App* solve = app.add_subcommand("solve", "Optimize the layout for one user");
  add_common(solve);
  solve->add_option("--user", user, "User position X,Y [m]");

  CLI::App* sweep = app.add_subcommand("sweep", "Monte Carlo ergodic-rate sweep, CSV output");
  add_common(sweep);
  sweep->add_option("--systems", systems, "Comma-separated systems");
  sweep->add_option("--trials", trials, "Trials per sweep point");
  sweep->add_option("--sweep", sweep_var, "power_dbm | side_length_m | num_antennas");
  sweep->add_option("--values", values, "Comma-separated, strictly increasing sweep values");
  sweep->add_flag("--full-span", full_span, "Oracle searches the whole region");

  CLI::App* verify = app.add_subcommand("verify", "Run the placement invariant checks");
  add_common(verify);
  verify->add_option("--cases", cases, "Scenarios per check");

  std::vector<const char*> argv{"pinchwave"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    RunConfig cfg;
    if (config_path) cfg = load_config_file(*config_path);
    RunConfig flags;
    if (user) flags.user = parse_user(*user);
    if (systems) flags.systems = split_list(*systems);
    if (sweep_var) flags.sweep_variable = *sweep_var;
    if (values) flags.sweep_values = parse_numbers(*values, "--values");
    flags.num_antennas = antennas;
    flags.trials = trials;
    flags.power_dbm = power_dbm;
    flags.region_side_m = side_length;
    flags.step_div = step_div;
    flags.seed = seed;
    flags.cases = cases;
    if (full_span) flags.full_span = true;
    flags.out = out_path;
    cfg.merge_from(flags);

    const ResolvedRun resolved = resolve(cfg);
    if (solve->parsed()) return cmd_solve(resolved, cfg.out, out, err);
    if (sweep->parsed()) return cmd_sweep(resolved, cfg.out, out);
    return cmd_verify(resolved, cfg.cases, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const CostGuardError& e) {
    err << "infeasible input: " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::invalid_argument& e) {
    err << "infeasible input: " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace pinchwave::cli
