#pragma once

#include <string>
#include <vector>

#include "nmr/gates.hpp"
#include "nmr/spin_system.hpp"

namespace nmr {

// Phase convention: a spin along -y gives a positive absorptive line; an
// x 90 readout pulse maps |0> populations onto -y.
struct Spectrum {
  std::vector<double> freq_hz;
  std::vector<cd> values;
  int spin = 1;
};

// Analytic time-domain signal of one spin: the single-quantum coherences of
// `spin` oscillating at their level splittings, damped by exp(-t/T2*).
// t2_star_s <= 0 disables the envelope. Throws when a line frequency aliases.
std::vector<cd> fid(const SpinSystem& sys, const CMat& rho, int spin, double duration_s,
                    double dt_s, double t2_star_s);

// Discrete Fourier transform of a uniformly sampled FID; axis in Hz ascending.
Spectrum spectrum_of(const std::vector<cd>& series, double dt_s, int spin);

// Half-width at half height of an exponentially damped line.
double linewidth_hz(double t2_star_s);

struct LineLabel {
  double freq_hz = 0.0;
  std::string spectator_bits;  // other spins ascending, '0'/'1'
  bool merged = false;         // another label lands within the given resolution
};

std::vector<LineLabel> assign_multiplet(const SpinSystem& sys, int spin,
                                        double resolution_hz = 0.0);

// O_i = 2 Tr(rho Iz_i): +1 for |0>, -1 for |1>. Input must be normalized.
std::vector<double> observables(const CMat& rho, int n);

// Complex amplitude of each multiplet line of `spin` (ordering matches
// assign_multiplet): the analytic line integrals of the spectrum.
std::vector<cd> sqc_line_amplitudes(const SpinSystem& sys, const CMat& rho, int spin);

// One tomography readout: rotations applied before acquisition, and the
// resulting per-spin line amplitudes.
struct TomographyReading {
  Circuit readout;
  std::vector<std::vector<cd>> lines;  // [spin-1][line]
};

// The {identity, x90, y90}^n readout set (3^n experiments).
std::vector<Circuit> tomography_readout_set(int n);

TomographyReading simulate_tomography_reading(const SpinSystem& sys, const CMat& rho,
                                              const Circuit& readout);

// Least-squares reconstruction from line amplitudes; the result is Hermitian
// with the measured trace. Throws if the readout set is rank-deficient.
CMat tomography(const SpinSystem& sys, const std::vector<TomographyReading>& readings);

std::string spectrum_to_csv(const Spectrum& s);

}  // namespace nmr
