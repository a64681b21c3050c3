// Zero-point energy Ξ(z) of an oblate spheroid above sapphire, with the
// local power-law exponent and the apex-curvature PFA estimate.

#include <cstdio>

#include "casimir/energy.hpp"
#include "casimir/parallel.hpp"
#include "casimir/pfa.hpp"

int main() {
  using namespace casimir;
  SweepSpec spec;
  spec.family = Family::oblate;
  spec.r_minor = 1.0;
  spec.aspects = {1.4};
  spec.substrates = {ConstantMedium{3.12}};
  for (double z = 0.25; z < 12.0; z *= 1.5) spec.z_over_rmin.push_back(z);
  spec.threads = resolve_threads(0);

  const SweepResult r = energy_sweep(spec).front();
  const Spheroid s = Spheroid::oblate(1.4, 1.0);
  std::printf("%s  f_c %.4f\n", r.fingerprint.c_str(), r.fc);
  std::printf("%9s %14s %8s %6s %14s\n", "z/r_min", "xi", "beta", "L", "xi_pfa");
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    const EnergySample& e = r.samples[i];
    const double pfa = pfa_energy(s.apex_radius(), e.z, r.fc);
    if (r.beta[i]) std::printf("%9.4f %14.6e %8.3f %6d %14.6e\n", e.z_over_rmin, e.xi, *r.beta[i], e.l_max_used, pfa);
    else std::printf("%9.4f %14.6e %8s %6d %14.6e\n", e.z_over_rmin, e.xi, "-", e.l_max_used, pfa);
  }
  return 0;
}
