#include <CLI11.hpp>

#include <iostream>

#include "fracobs/cli_io.hpp"

using namespace fracobs;

int main(int argc, char** argv) {
  CLI::App app{"Parabolic fractional obstacle solver and verification lab"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  auto* solve = app.add_subcommand("solve", "run a configured problem, write slices and report");
  solve->add_option("--config", config_path, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
  solve->add_option("--out", out_dir, "output directory");
  solve->add_option("--seed", seed, "override the configured seed");

  SelftestOptions st;
  std::string st_out;
  auto* selftest = app.add_subcommand("selftest", "run the verification suites at selftest sizes");
  selftest->add_option("--skip", st.skip, "suite to skip (repeatable)");
  selftest->add_option("--seed", st.seed, "seed for the random lemma batch");
  selftest->add_option("--out", st_out, "write selftest.json here");
  selftest->add_option("--quadrature-scale", st.quadrature_scale)->group("");

  auto* oracle = app.add_subcommand("oracle", "evaluate a closed-form oracle");
  oracle->require_subcommand(1);
  WaveOracleOptions wave;
  auto* wave_cmd = oracle->add_subcommand("wave", "stationary or travelling wave trace");
  wave_cmd->add_option("--beta", wave.beta, "front angle parameter in [1/2, 1)");
  wave_cmd->add_option("--x-min", wave.x_min);
  wave_cmd->add_option("--x-max", wave.x_max);
  wave_cmd->add_option("--nodes", wave.nodes);
  wave_cmd->add_flag("--evolve", wave.evolve, "also evolve the box problem and fit the speed");
  wave_cmd->add_option("--out", out_dir, "output directory");
  KernelOracleOptions kernel;
  auto* kernel_cmd = oracle->add_subcommand("kernel", "fractional heat kernel");
  kernel_cmd->add_option("--s", kernel.s);
  kernel_cmd->add_option("--t", kernel.t);
  kernel_cmd->add_option("--x-min", kernel.x_min);
  kernel_cmd->add_option("--x-max", kernel.x_max);
  kernel_cmd->add_option("--nodes", kernel.nodes);
  kernel_cmd->add_option("--out", out_dir, "output directory");

  ExtensionOptions ext;
  auto* ext_cmd = app.add_subcommand("extension", "compare the extension DtN map with the multiplier");
  ext_cmd->add_option("--s", ext.s);
  ext_cmd->add_option("--field", ext.field)->check(CLI::IsMember({"sin", "sin2", "gaussian"}));
  ext_cmd->add_option("--nodes", ext.nodes);
  ext_cmd->add_option("--layers", ext.layers);
  ext_cmd->add_option("--height", ext.height);
  ext_cmd->add_option("--out", out_dir, "output directory");

  ExponentsOptions ex;
  std::string slices, generator = "spectral", scheme = "projection";
  auto* ex_cmd = app.add_subcommand("exponents", "measure regularity exponents from a slice CSV");
  ex_cmd->add_option("slices", slices, "slice CSV written by solve")->required()->check(CLI::ExistingFile);
  ex_cmd->add_option("--s", ex.s, "fractional order of the run")->required();
  ex_cmd->add_option("--generator", generator)->check(CLI::IsMember({"spectral", "quadrature_symbol"}));
  ex_cmd->add_option("--scheme", scheme)->check(CLI::IsMember({"projection", "penalization"}));
  ex_cmd->add_option("--contact-tol", ex.contact_tol);
  ex_cmd->add_option("--feature-point", ex.feature_point);
  ex_cmd->add_option("--r-max", ex.r_max);
  ex_cmd->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }

  try {
    if (*solve) {
      RunConfig config = load_run_config(config_path);
      if (seed) config.seed = *seed;
      return cmd_solve(config, out_dir, std::cout);
    }
    if (*selftest) {
      if (!st_out.empty()) st.out_dir = st_out;
      return cmd_selftest(st, std::cout);
    }
    if (*wave_cmd) return cmd_oracle_wave(wave, out_dir, std::cout);
    if (*kernel_cmd) return cmd_oracle_kernel(kernel, out_dir, std::cout);
    if (*ext_cmd) return cmd_extension(ext, out_dir, std::cout);
    if (*ex_cmd) {
      ex.generator = generator_from_string(generator);
      ex.scheme = scheme_from_string(scheme);
      return cmd_exponents(slices, ex, out_dir, std::cout);
    }
  } catch (const Error& e) {
    std::cerr << "fracobs: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "fracobs: " << e.what() << '\n';
    return exit_numerical;
  }
  return exit_config;
}
