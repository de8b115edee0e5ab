#ifndef MAGICSIM_CLI_HPP_
#define MAGICSIM_CLI_HPP_

// Batch front-end. Subcommands reproduce the standard result artifacts of
// the three-ion setup (crystal geometry, coupling matrix, trap scan,
// addressing spectrum, J measurement, CNOT, parity), writing plot-ready
// CSV plus a JSON document with the fully resolved configuration and seed.
// Exit codes: 0 ok, 2 configuration error, 3 numeric failure.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "magicsim/config.hpp"
#include "magicsim/constants.hpp"
#include "magicsim/coupling.hpp"
#include "magicsim/experiments.hpp"
#include "magicsim/field_map.hpp"
#include "magicsim/ion_crystal.hpp"
#include "magicsim/report.hpp"

namespace magicsim {

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool ideal = false;
  bool no_timestamp = false;
};

namespace cli_detail {

inline RunConfig resolve_config(const CliOptions& opt) {
  RunConfig cfg =
      opt.config_path.empty() ? RunConfig{} : load_config(opt.config_path);
  if (opt.seed) cfg.seed = *opt.seed;
  if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
  if (opt.ideal) cfg.strip_stochastics();
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);
  return cfg;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline nlohmann::ordered_json metadata(const std::string& command,
                                       const RunConfig& cfg,
                                       const CliOptions& opt) {
  nlohmann::ordered_json doc;
  doc["command"] = command;
  if (!opt.no_timestamp) doc["timestamp_utc"] = utc_timestamp();
  doc["seed"] = cfg.seed;
  doc["config"] = cfg.resolved_json();
  return doc;
}

struct Pipeline {
  IonSpecies species;
  CrystalModes modes;
  IonFrequencies freqs;
  CouplingMatrix j;

  explicit Pipeline(const RunConfig& cfg) {
    species = cfg.make_species();
    modes = axial_normal_modes(cfg.make_trap(), species);
    freqs = ion_frequencies(modes, cfg.make_field(), species);
    j = j_matrix(modes, freqs, species);
  }
};

inline ExperimentOptions experiment_options(const RunConfig& cfg,
                                            const Pipeline& pipe) {
  ExperimentOptions opt;
  opt.noise = cfg.make_noise();
  if (cfg.crosstalk.enabled) {
    opt.crosstalk.enabled = true;
    opt.crosstalk.omega = pipe.freqs.omega;
  }
  opt.detection = cfg.make_detection();
  opt.n_repeats = cfg.experiment.repeats;
  opt.n_trajectories = cfg.experiment.trajectories;
  opt.seed = cfg.seed;
  return opt;
}

inline std::vector<double> phi_grid(int n) {
  std::vector<double> phis(n);
  for (int f = 0; f < n; ++f) phis[f] = constants::two_pi * f / n;
  return phis;
}

inline double auto_tau(double configured, double j_ij, double phase_target) {
  if (configured > 0) return configured;
  return phase_target / (2.0 * j_ij);
}

inline nlohmann::ordered_json fit_json(const FringeFit& fit) {
  return {{"amplitude", fit.amplitude},
          {"phase_rad", fit.phase},
          {"offset", fit.offset},
          {"rms_residual", fit.rms_residual}};
}

}  // namespace cli_detail

inline int cmd_crystal(const CliOptions& opt) {
  const RunConfig cfg = cli_detail::resolve_config(opt);
  const auto species = cfg.make_species();
  const auto modes = axial_normal_modes(cfg.make_trap(), species);
  const std::filesystem::path out(cfg.out_dir);

  CsvWriter positions(out / "crystal_positions.csv");
  positions.header({"ion", "z[um]", "spacing_to_next[um]"});
  const int n = cfg.trap.n_ions;
  for (int l = 0; l < n; ++l) {
    std::vector<std::string> cells{std::to_string(l + 1),
                                   CsvWriter::format(modes.positions[l] * 1e6)};
    if (l + 1 < n)
      cells.push_back(
          CsvWriter::format((modes.positions[l + 1] - modes.positions[l]) * 1e6));
    else
      cells.emplace_back("");
    positions.write_row(cells);
  }

  CsvWriter mode_table(out / "crystal_modes.csv");
  std::vector<std::string> head{"mode", "freq[2pi*kHz]"};
  for (int l = 0; l < n; ++l) head.push_back("s_ion" + std::to_string(l + 1));
  mode_table.header(head);
  for (int m = 0; m < n; ++m) {
    std::vector<std::string> cells{
        std::to_string(m + 1),
        CsvWriter::format(to_hz_2pi(modes.mode_freqs[m]) / 1e3)};
    for (int l = 0; l < n; ++l)
      cells.push_back(CsvWriter::format(modes.mode_matrix(m, l)));
    mode_table.write_row(cells);
  }

  auto doc = cli_detail::metadata("crystal", cfg, opt);
  doc["results"]["length_scale_um"] =
      chain_length_scale(cfg.make_trap(), species) * 1e6;
  doc["results"]["min_spacing_um"] =
      n >= 2 ? min_spacing(cfg.make_trap(), species) * 1e6 : 0.0;
  doc["results"]["linear_chain_stable"] = linear_chain_stable(cfg.make_trap());
  doc["outputs"] = {"crystal_positions.csv", "crystal_modes.csv"};
  write_json(out / "crystal.json", doc);
  return 0;
}

inline int cmd_jmatrix(const CliOptions& opt) {
  const RunConfig cfg = cli_detail::resolve_config(opt);
  const cli_detail::Pipeline pipe(cfg);
  const std::filesystem::path out(cfg.out_dir);
  const int n = cfg.trap.n_ions;

  CsvWriter ions(out / "jmatrix_ions.csv");
  ions.header({"ion", "z[um]", "b[T/m]", "resonance_offset[2pi*MHz]"});
  for (int l = 0; l < n; ++l)
    ions.row({static_cast<double>(l + 1), pipe.modes.positions[l] * 1e6,
              pipe.freqs.gradient_at_ion[l],
              to_hz_2pi(pipe.freqs.omega[l] - cfg.species.hyperfine) / 1e6});

  const auto kappa = kappa_matrix(pipe.modes, pipe.freqs, pipe.species);
  CsvWriter ktable(out / "jmatrix_kappa.csv");
  std::vector<std::string> khead{"mode"};
  for (int l = 0; l < n; ++l) khead.push_back("kappa_ion" + std::to_string(l + 1));
  ktable.header(khead);
  for (int m = 0; m < n; ++m) {
    std::vector<double> cells{static_cast<double>(m + 1)};
    for (int l = 0; l < n; ++l) cells.push_back(kappa.kappa(m, l));
    ktable.row(cells);
  }

  CsvWriter jtable(out / "jmatrix.csv");
  jtable.header({"i", "j", "J[rad/s]", "J[2pi*Hz]"});
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      jtable.row({static_cast<double>(a + 1), static_cast<double>(b + 1),
                  pipe.j.j(a, b), to_hz_2pi(pipe.j.j(a, b))});

  auto doc = cli_detail::metadata("jmatrix", cfg, opt);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      doc["results"]["j_2pi_hz"][std::to_string(a + 1) + std::to_string(b + 1)] =
          to_hz_2pi(pipe.j.j(a, b));
  doc["outputs"] = {"jmatrix_ions.csv", "jmatrix_kappa.csv", "jmatrix.csv"};
  write_json(out / "jmatrix.json", doc);
  return 0;
}

inline int cmd_scan_j(const CliOptions& opt) {
  const RunConfig cfg = cli_detail::resolve_config(opt);
  const auto species = cfg.make_species();
  const std::filesystem::path out(cfg.out_dir);

  std::vector<double> nus;
  const int pts = cfg.experiment.scan_points;
  for (int k = 0; k < pts; ++k) {
    const double f = pts == 1 ? 0.0 : static_cast<double>(k) / (pts - 1);
    nus.push_back(cfg.experiment.scan_nu_min *
                  std::pow(cfg.experiment.scan_nu_max / cfg.experiment.scan_nu_min, f));
  }
  const auto rows = j_vs_trap_scan(nus, cfg.field.grad_pm, cfg.trap.n_ions,
                                   species, cfg.trap.nu_radial);

  const int n = cfg.trap.n_ions;
  CsvWriter table(out / "scan_j.csv");
  std::vector<std::string> head{"nu_axial[2pi*kHz]"};
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      head.push_back("J_" + std::to_string(a + 1) + std::to_string(b + 1) +
                     "[2pi*Hz]");
  table.header(head);
  for (const auto& row : rows) {
    std::vector<double> cells{to_hz_2pi(row.nu_axial) / 1e3};
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) cells.push_back(to_hz_2pi(row.j.j(a, b)));
    table.row(cells);
  }

  auto doc = cli_detail::metadata("scan-j", cfg, opt);
  if (rows.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& row : rows) {
      const double x = std::log(row.nu_axial);
      const double y = std::log(row.j.j(0, 1));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const auto m = static_cast<double>(rows.size());
    doc["results"]["loglog_slope_first_pair"] =
        (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  doc["outputs"] = {"scan_j.csv"};
  write_json(out / "scan_j.json", doc);
  return 0;
}

inline int cmd_spectrum(const CliOptions& opt) {
  const RunConfig cfg = cli_detail::resolve_config(opt);
  const cli_detail::Pipeline pipe(cfg);
  const std::filesystem::path out(cfg.out_dir);

  const double margin = hz_2pi(1.5e6);
  const double lo = pipe.freqs.omega.front() - margin;
  const double hi = pipe.freqs.omega.back() + margin;
  std::vector<double> drive(cfg.experiment.spectrum_points);
  for (int k = 0; k < cfg.experiment.spectrum_points; ++k)
    drive[k] = lo + (hi - lo) * k / (cfg.experiment.spectrum_points - 1);

  const auto table = microwave_spectrum(pipe.freqs, cfg.experiment.rabi,
                                        cfg.experiment.pulse_length, drive);

  CsvWriter csv(out / "spectrum.csv");
  std::vector<std::string> head{"drive_offset[2pi*MHz]"};
  for (int l = 0; l < cfg.trap.n_ions; ++l)
    head.push_back("p_ion" + std::to_string(l + 1));
  head.emplace_back("expected_bright");
  csv.header(head);
  for (const auto& pt : table) {
    std::vector<double> cells{
        to_hz_2pi(pt.drive - cfg.species.hyperfine) / 1e6};
    for (double p : pt.p_ion) cells.push_back(p);
    cells.push_back(pt.total);
    csv.row(cells);
  }

  auto doc = cli_detail::metadata("spectrum", cfg, opt);
  for (std::size_t l = 0; l < pipe.freqs.omega.size(); ++l)
    doc["results"]["resonance_offset_2pi_mhz"].push_back(
        to_hz_2pi(pipe.freqs.omega[l] - cfg.species.hyperfine) / 1e6);
  doc["outputs"] = {"spectrum.csv"};
  write_json(out / "spectrum.json", doc);
  return 0;
}

inline int cmd_measure_j(const CliOptions& opt) {
  const RunConfig cfg = cli_detail::resolve_config(opt);
  const cli_detail::Pipeline pipe(cfg);
  const std::filesystem::path out(cfg.out_dir);
  const auto [a, b] = cfg.make_pair();
  const double tau = cli_detail::auto_tau(cfg.experiment.tau, pipe.j.j(a, b),
                                          0.25 * constants::pi);

  const auto phis = cli_detail::phi_grid(cfg.experiment.phi_points);
  const auto result =
      measure_j(pipe.j, a, b, tau, cfg.make_echo(), phis,
                cli_detail::experiment_options(cfg, pipe));

  CsvWriter csv(out / "measure_j_fringe.csv");
  csv.header({"phi[rad]", "p_up_control_down", "p_up_control_up"});
  for (const auto& row : result.fringe) csv.row({row[0], row[1], row[2]});

  auto doc = cli_detail::metadata("measure-j", cfg, opt);
  doc["results"] = {
      {"pair", {a + 1, b + 1}},
      {"tau_s", tau},
      {"j_estimate_rad_per_s", result.j_estimate},
      {"j_estimate_2pi_hz", to_hz_2pi(result.j_estimate)},
      {"j_calculated_rad_per_s", pipe.j.j(a, b)},
      {"j_calculated_2pi_hz", to_hz_2pi(pipe.j.j(a, b))},
      {"delta_phi_rad", result.delta_phi},
      {"phase_wrap_risk", result.wrap_risk},
      {"fit_control_down", cli_detail::fit_json(result.fit_down)},
      {"fit_control_up", cli_detail::fit_json(result.fit_up)}};
  doc["outputs"] = {"measure_j_fringe.csv"};
  write_json(out / "measure_j.json", doc);
  return 0;
}

inline int cmd_cnot(const CliOptions& opt) {
  const RunConfig cfg = cli_detail::resolve_config(opt);
  const cli_detail::Pipeline pipe(cfg);
  const std::filesystem::path out(cfg.out_dir);
  const auto [control, target] = cfg.make_pair();
  const double tau = cli_detail::auto_tau(
      cfg.experiment.tau, pipe.j.j(control, target), 0.5 * constants::pi);

  const auto phis = cli_detail::phi_grid(cfg.experiment.phi_points);
  const auto result =
      cnot_truth_table(pipe.j, control, target, tau, cfg.make_echo(), phis,
                       cli_detail::experiment_options(cfg, pipe));

  CsvWriter fringes(out / "cnot_fringes.csv");
  fringes.header({"phi[rad]", "p_up_prep_dd", "p_up_prep_ud", "p_up_prep_du",
                  "p_up_prep_uu"});
  for (std::size_t k = 0; k < phis.size(); ++k)
    fringes.row({phis[k], result.fringes[0][k].second,
                 result.fringes[1][k].second, result.fringes[2][k].second,
                 result.fringes[3][k].second});

  CsvWriter truth(out / "cnot_truth_table.csv");
  truth.header({"prep", "p_dd", "p_ud", "p_du", "p_uu"});
  const char* preps[4] = {"dd", "ud", "du", "uu"};
  for (int prep = 0; prep < 4; ++prep)
    truth.write_row({preps[prep], CsvWriter::format(result.truth_table(prep, 0)),
                     CsvWriter::format(result.truth_table(prep, 1)),
                     CsvWriter::format(result.truth_table(prep, 2)),
                     CsvWriter::format(result.truth_table(prep, 3))});

  auto doc = cli_detail::metadata("cnot", cfg, opt);
  doc["results"] = {
      {"control", control + 1},
      {"target", target + 1},
      {"tau_s", tau},
      {"phase_shift_target_down_rad", result.phase_shift_target_down},
      {"phase_shift_target_up_rad", result.phase_shift_target_up}};
  for (int prep = 0; prep < 4; ++prep)
    doc["results"]["fits"][preps[prep]] = cli_detail::fit_json(result.fits[prep]);
  doc["outputs"] = {"cnot_fringes.csv", "cnot_truth_table.csv"};
  write_json(out / "cnot.json", doc);
  return 0;
}

inline int cmd_parity(const CliOptions& opt) {
  const RunConfig cfg = cli_detail::resolve_config(opt);
  const cli_detail::Pipeline pipe(cfg);
  const std::filesystem::path out(cfg.out_dir);
  const auto [control, target] = cfg.make_pair();
  const double tau = cli_detail::auto_tau(
      cfg.experiment.tau, pipe.j.j(control, target), 0.5 * constants::pi);

  const auto phis = cli_detail::phi_grid(cfg.experiment.phi_points);
  const auto result =
      parity_scan(pipe.j, control, target, tau, cfg.make_echo(), phis,
                  cli_detail::experiment_options(cfg, pipe));

  CsvWriter csv(out / "parity.csv");
  csv.header({"phi[rad]", "parity"});
  for (const auto& [phi, parity] : result.samples) csv.row({phi, parity});

  auto doc = cli_detail::metadata("parity", cfg, opt);
  doc["results"] = {{"control", control + 1},
                    {"target", target + 1},
                    {"tau_s", tau},
                    {"pi_z", result.pi_z},
                    {"visibility", result.visibility},
                    {"fidelity", result.fidelity},
                    {"entangled", result.entangled},
                    {"fit", cli_detail::fit_json(result.fit)}};
  doc["outputs"] = {"parity.csv"};
  write_json(out / "parity.json", doc);
  return 0;
}

inline int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Trapped-ion spin-chain simulator: gradient-induced J "
               "coupling and microwave pulse experiments"};
  app.require_subcommand(1);

  CliOptions opt;
  app.add_option("--config", opt.config_path, "configuration file path");
  app.add_option("--seed", opt.seed, "override the master seed");
  app.add_option("--out", opt.out_dir, "override the output directory");
  app.add_flag("--ideal", opt.ideal, "disable noise, detection errors, crosstalk");
  app.add_flag("--no-timestamp", opt.no_timestamp,
               "omit the timestamp field from JSON outputs");

  int (*handler)(const CliOptions&) = nullptr;
  app.add_subcommand("crystal", "equilibrium positions and axial modes")
      ->callback([&] { handler = cmd_crystal; });
  app.add_subcommand("jmatrix", "per-ion gradients, kappa and J matrices")
      ->callback([&] { handler = cmd_jmatrix; });
  app.add_subcommand("scan-j", "J versus axial trap frequency")
      ->callback([&] { handler = cmd_scan_j; });
  app.add_subcommand("spectrum", "microwave addressing spectrum")
      ->callback([&] { handler = cmd_spectrum; });
  app.add_subcommand("measure-j", "Ramsey J measurement for the configured pair")
      ->callback([&] { handler = cmd_measure_j; });
  app.add_subcommand("cnot", "CNOT fringes and truth table")
      ->callback([&] { handler = cmd_cnot; });
  app.add_subcommand("parity", "parity scan and Bell fidelity")
      ->callback([&] { handler = cmd_parity; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    return handler(opt);
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}

inline int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace magicsim

#endif  // MAGICSIM_CLI_HPP_
