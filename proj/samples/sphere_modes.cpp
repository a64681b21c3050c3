// Coupled surface-plasmon modes of a sphere above a perfect conductor.
//
//   ./sphere_modes [gap] [l_max]

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "casimir/spectral.hpp"

int main(int argc, char** argv) {
  using namespace casimir;
  const double gap = argc > 1 ? std::atof(argv[1]) : 0.5;
  const int l_max = argc > 2 ? std::atoi(argv[2]) : 12;

  SystemConfig config{PlacedParticle(Spheroid::sphere(1.0), gap)};
  config.l_max = l_max;
  const ModeSpectrum spectrum = mode_spectrum(config);

  std::printf("sphere a=1, gap %.3g, f_c %.3g, l_max %d\n", gap, config.fc(), l_max);
  std::printf("%3s %3s %12s %12s %10s\n", "m", "s", "n", "n_isolated", "omega/wp");
  for (std::size_t k = 0; k < 3 && k < spectrum.blocks.size(); ++k) {
    const SpectralBlock& b = spectrum.blocks[k];
    for (int s = 0; s < std::min(4, b.dimension()); ++s) {
      const double n = b.eigenvalues[s];
      std::printf("%3d %3d %12.8f %12.8f %10.6f\n", b.m, s, n, spectrum.isolated_blocks[k].eigenvalues[s], std::sqrt(n));
    }
  }

  // the dipole polarizability picks up the image-shifted poles
  std::printf("\nalpha_11(u) near the lowest m=1 mode\n");
  const double n0 = spectrum.blocks[1].eigenvalues[0];
  for (double du : {-0.02, -0.005, 0.005, 0.02}) {
    const auto a = effective_polarizability(config, std::complex<double>(n0 + du, 0.0), 1, 1);
    std::printf("  u = %.6f  alpha = %+.6e\n", n0 + du, a.real());
  }
  return 0;
}
