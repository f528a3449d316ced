// Refinement study behind the exponent tolerances and the stored
// normalization constants. Run once; the output is committed under fixtures/.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "fracobs/checks.hpp"
#include "fracobs/cli_io.hpp"
#include "fracobs/regularity.hpp"

using namespace fracobs;
using nlohmann::json;

int main(int argc, char** argv) {
  const std::string out = argc > 1 ? argv[1] : "refinement_study.json";

  json runs = json::array();
  for (double s : {0.5, 0.75}) {
    for (std::size_t n : {1024u, 2048u, 4096u, 8192u}) {
      for (double dt : {1e-3, 5e-4}) {
        const ProblemSpec p = reference_put(s, n, 1.0);
        SchemeConfig c;
        c.dt = dt;
        c.record_every = static_cast<std::size_t>(std::lround(0.01 / dt));
        const SpectralOp op = build_spectral(p.grid, s);
        const Solution sol = solve(p, c, op);
        const RegularityReport r = build_report(p, sol, op);
        runs.push_back({{"s", s},
                        {"nodes", n},
                        {"dt", dt},
                        {"free_boundary_x", r.free_boundary_x},
                        {"detach", r.detach.fit.exponent},
                        {"flap", r.flap.fit.exponent},
                        {"time", r.time.fit.exponent}});
        std::fprintf(stderr, "s=%.2f N=%zu dt=%g  detach %.4f flap %.4f time %.4f\n", s, n, dt,
                     r.detach.fit.exponent, r.flap.fit.exponent, r.time.fit.exponent);
      }
    }
  }

  json constants = json::array();
  for (double s : {0.25, 0.5, 0.75}) {
    json row{{"s", s}, {"closed_form", normalization_constant(s)}};
    for (std::size_t n : {2048u, 4096u}) {
      const Grid1D g(-20.0, 20.0, n);
      std::vector<Field> family;
      for (double w : {0.75, 1.0, 1.5, 2.0}) {
        family.push_back(Field::sample(g, [w](double x) { return std::exp(-x * x / (w * w)); }));
      }
      row["fitted_" + std::to_string(n)] = fit_normalization_constant(g, s, family);
    }
    constants.push_back(row);
  }

  json doc{{"problem", "smoothed put K=1 sigma=0.05 on [-8,8], T=1, u0=psi, spectral generator"},
           {"targets", {{"detach", 1.5}, {"flap_s0.5", 0.5}, {"flap_s0.75", 0.25},
                        {"time_s0.5", 0.5}, {"time_s0.75", 1.0 / 6.0}}},
           {"tolerances", {{"detach", 0.1}, {"flap", 0.15}, {"time", 0.2}}},
           {"runs", runs},
           {"normalization", constants},
           {"provenance", provenance()}};
  std::ofstream(out) << doc.dump(2) << '\n';
  return 0;
}
