#pragma once

// Invariant and oracle check suites shared by the selftest command and the
// acceptance binary. Each check reports a measured deviation against its
// tolerance; "small" sizes keep the whole matrix under a minute.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fracobs/stepper.hpp"

namespace fracobs {

struct CheckResult {
  std::string suite;
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  bool hard = true;
  bool skipped = false;
  std::string note;
};

/// measured <= tolerance, with NaN counted as a failure.
CheckResult bound_check(std::string suite, std::string name, double measured, double tolerance,
                        bool hard = true);

struct CheckOptions {
  bool full = false;              // acceptance sizes instead of selftest sizes
  double quadrature_scale = 1.0;  // fault injection: scales the quadrature normalization
  std::uint64_t seed = 1;
};

struct LemmaBatch {
  double s = 0.5;
  Generator generator = Generator::quadrature_symbol;
  std::size_t problems = 20;
  std::size_t nodes = 512;
  double T = 0.2;
  double dt = 2e-3;
  double epsilon = 1e-2;
  std::uint64_t seed = 1;
};

/// Discrete lemma invariants of one solved problem, read off its monitors
/// and recorded slices. Checks that need u0 = psi (or the projection
/// scheme) are marked skipped otherwise.
std::vector<CheckResult> solution_checks(const ProblemSpec& problem, const Solution& solution,
                                         const SpectralOp& op);

/// Runs every discrete lemma invariant over a seeded batch of random
/// problems; one result per invariant holding the worst violation.
std::vector<CheckResult> lemma_batch(const LemmaBatch& batch);

std::vector<CheckResult> operator_checks(const CheckOptions& options);
std::vector<CheckResult> extension_checks(const CheckOptions& options);
std::vector<CheckResult> kernel_checks(const CheckOptions& options);
std::vector<CheckResult> wave_checks(const CheckOptions& options);
std::vector<CheckResult> lemma_checks(const CheckOptions& options);
std::vector<CheckResult> exponent_checks(const CheckOptions& options);
std::vector<CheckResult> scheme_checks(const CheckOptions& options);
std::vector<CheckResult> algebra_checks(const CheckOptions& options);

struct Suite {
  std::string name;
  std::function<std::vector<CheckResult>(const CheckOptions&)> run;
};

/// operator, extension, kernel, waves, lemmas, exponents, schemes, algebra.
const std::vector<Suite>& check_suites();

/// The reference put problem: smoothed put K = 1, sigma = 0.05 on [-8, 8].
ProblemSpec reference_put(double s, std::size_t nodes, double T);

}  // namespace fracobs
