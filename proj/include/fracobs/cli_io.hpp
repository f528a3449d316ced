#pragma once

// Run configuration, slice CSV and JSON report I/O, and the command
// implementations behind the fracobs executable. Commands return the
// process exit code: 0 success, 2 configuration, 3 numerical.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracobs/checks.hpp"
#include "fracobs/errors.hpp"
#include "fracobs/regularity.hpp"
#include "fracobs/stepper.hpp"

namespace fracobs {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_numerical = 3;

int exit_code(ErrorKind kind);

struct ObstacleSpec {
  bool random = false;  // seeded random bumps instead of a payoff
  PayoffSpec payoff;
};

struct RunConfig {
  double s = 0.5;
  double x_min = -8.0;
  double x_max = 8.0;
  std::size_t nodes = 1024;
  double T = 1.0;
  ObstacleSpec psi;
  std::optional<PayoffSpec> u0;  // empty: u0 = psi
  SchemeConfig scheme;
  std::string slice_path = "slices.csv";
  std::string report_path = "report.json";
  std::uint64_t seed = 0;
  std::vector<std::string> checks{"monitors", "exponents"};
  std::optional<double> feature_point;  // empty: the obstacle's feature point
  double r_max = -1.0;
};

/// Strict: unknown keys, wrong types and bad enum names are configuration
/// errors.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

ProblemSpec build_problem(const RunConfig& config);

/// Columns t, x, u, psi, flap, contact; flap is the generator applied to u,
/// contact uses the solution's tolerance. Floats carry 17 significant digits.
void write_slices_csv(std::ostream& out, const ProblemSpec& problem, const Solution& solution,
                      const SpectralOp& op);

struct SliceSet {
  Grid1D grid;
  Field psi;
  std::vector<double> times;
  std::vector<Field> slices;
};

SliceSet read_slices_csv(std::istream& in);

nlohmann::json to_json(const CheckResult& check);
nlohmann::json to_json(const RegularityReport& report);

/// Throws a numerical error if any number in the document is not finite.
void require_finite(const nlohmann::json& doc);

/// The fixed part of every report: program name, version and library
/// versions. No timestamps, so identical runs give identical bytes.
nlohmann::json provenance();

int cmd_solve(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

struct SelftestOptions {
  std::vector<std::string> skip;
  std::uint64_t seed = 1;
  double quadrature_scale = 1.0;
  std::optional<std::filesystem::path> out_dir;
};

int cmd_selftest(const SelftestOptions& options, std::ostream& log);

struct ExponentsOptions {
  double s = 0.5;
  Generator generator = Generator::spectral;
  Scheme scheme = Scheme::projection;
  double contact_tol = -1.0;  // negative: 10 h^{1+s}
  std::optional<double> feature_point;
  double r_max = -1.0;
};

int cmd_exponents(const std::filesystem::path& slice_path, const ExponentsOptions& options,
                  const std::filesystem::path& out_dir, std::ostream& log);

struct WaveOracleOptions {
  double beta = 0.75;
  double x_min = -4.0;
  double x_max = 4.0;
  std::size_t nodes = 512;
  bool evolve = false;
};

int cmd_oracle_wave(const WaveOracleOptions& options, const std::filesystem::path& out_dir,
                    std::ostream& log);

struct KernelOracleOptions {
  double s = 0.5;
  double t = 1.0;
  double x_min = -1024.0;
  double x_max = 1024.0;
  std::size_t nodes = 65536;
};

int cmd_oracle_kernel(const KernelOracleOptions& options, const std::filesystem::path& out_dir,
                      std::ostream& log);

struct ExtensionOptions {
  double s = 0.5;
  std::string field = "sin";  // sin, sin2, gaussian
  std::size_t nodes = 256;
  std::size_t layers = 256;
  double height = 24.0;
};

int cmd_extension(const ExtensionOptions& options, const std::filesystem::path& out_dir,
                  std::ostream& log);

}  // namespace fracobs
