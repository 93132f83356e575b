#include "vendor/doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "nmr/cmat.hpp"
#include "nmr/gates.hpp"
#include "nmr/prep.hpp"
#include "nmr/readout.hpp"
#include "nmr/spin_system.hpp"

using nmr::cd;
using nmr::CMat;
using nmr::Circuit;
using nmr::Gate;
using nmr::SpinSystem;

namespace {

constexpr double kPi = std::numbers::pi;

SpinSystem one_spin(double offset_hz) {
  return SpinSystem::homonuclear(1, {offset_hz}, {{0.0}});
}

SpinSystem two_spin(double j_hz, double f1 = 0.0, double f2 = 0.0) {
  return SpinSystem::homonuclear(2, {f1, f2}, {{0, j_hz}, {j_hz, 0}});
}

CMat minus_y_state() {
  CMat rho(2, 2);
  rho(0, 0) = 0.5;
  rho(1, 1) = 0.5;
  rho(0, 1) = cd(0, 0.5);
  rho(1, 0) = cd(0, -0.5);
  return rho;
}

// Count strict local maxima of the real part that rise above `floor`.
int count_peaks(const nmr::Spectrum& s, double floor) {
  int peaks = 0;
  for (std::size_t k = 1; k + 1 < s.values.size(); ++k) {
    const double v = s.values[k].real();
    if (v > floor && v > s.values[k - 1].real() && v > s.values[k + 1].real()) ++peaks;
  }
  return peaks;
}

double peak_freq(const nmr::Spectrum& s) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < s.values.size(); ++k)
    if (s.values[k].real() > s.values[best].real()) best = k;
  return s.freq_hz[best];
}

// Full width of the real part at half its maximum, by linear interpolation.
double full_width(const nmr::Spectrum& s) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < s.values.size(); ++k)
    if (s.values[k].real() > s.values[best].real()) best = k;
  const double half = 0.5 * s.values[best].real();
  auto cross = [&](std::size_t from, int step) {
    std::size_t k = from;
    while (s.values[k].real() > half) k = std::size_t(long(k) + step);
    const double v0 = s.values[std::size_t(long(k) - step)].real();
    const double v1 = s.values[k].real();
    const double f0 = s.freq_hz[std::size_t(long(k) - step)];
    const double f1 = s.freq_hz[k];
    return f0 + (half - v0) * (f1 - f0) / (v1 - v0);
  };
  return cross(best, +1) - cross(best, -1);
}

CMat random_mixed_state(int n, unsigned seed) {
  // Deterministic positive matrix A A^dag normalized to unit trace.
  const std::size_t d = std::size_t(1) << n;
  CMat a(d, d);
  unsigned s = seed;
  auto next = [&s]() {
    s = s * 1664525u + 1013904223u;
    return double(s >> 8) / double(1u << 24) - 0.5;
  };
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) a(r, c) = cd(next(), next());
  CMat rho = a * a.dagger();
  return rho * (1.0 / rho.trace().real());
}

}  // namespace

TEST_CASE("fid oscillates at the level splittings of the observed spin") {
  const SpinSystem sys = one_spin(100.0);
  const double dt = 1.0 / 1024.0;
  const auto v = nmr::fid(sys, minus_y_state(), 1, 0.25, dt, 0.0);
  REQUIRE(v.size() == 256);
  // A spin along -y precesses as a unit phasor at its own offset.
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double t = double(k) * dt;
    CHECK(std::abs(v[k] - std::exp(cd(0, 2.0 * kPi * 100.0 * t))) < 1e-12);
  }
  CHECK(v[0].real() == doctest::Approx(1.0).epsilon(1e-12));

  // Diagonal states carry no transverse magnetization.
  CMat diag(2, 2);
  diag(0, 0) = 0.8;
  diag(1, 1) = 0.2;
  for (const cd& s : nmr::fid(sys, diag, 1, 0.25, dt, 0.0)) CHECK(std::abs(s) < 1e-15);

  // The envelope multiplies in as exp(-t/T2*).
  const auto damped = nmr::fid(sys, minus_y_state(), 1, 0.25, dt, 0.3);
  CHECK(std::abs(damped[128] - v[128] * std::exp(-128.0 * dt / 0.3)) < 1e-12);

  CHECK_THROWS_AS(nmr::fid(one_spin(600.0), minus_y_state(), 1, 0.25, 1e-3, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(nmr::fid(sys, minus_y_state(), 2, 0.25, dt, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(nmr::fid(sys, minus_y_state(), 1, 0.0, dt, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(nmr::fid(sys, minus_y_state(), 1, 0.25, 0.0, 0.0), std::invalid_argument);

  // Couplings count toward the aliasing bound even at zero offset.
  const SpinSystem tight = two_spin(215.0);
  CMat rho = CMat::identity(4) * cd(0.25);
  CHECK_THROWS_AS(nmr::fid(tight, rho, 1, 0.25, 1.0 / 200.0, 0.0), std::invalid_argument);
}

TEST_CASE("spectrum resolves lorentzian lines of the damped fid") {
  const SpinSystem sys = one_spin(50.0);
  const double dt = 1.0 / 256.0;
  const auto v = nmr::fid(sys, minus_y_state(), 1, 16.0, dt, 0.3);
  const nmr::Spectrum s = nmr::spectrum_of(v, dt, 1);

  REQUIRE(s.freq_hz.size() == s.values.size());
  REQUIRE(s.values.size() == 4096);
  CHECK(s.spin == 1);
  for (std::size_t k = 1; k < s.freq_hz.size(); ++k) CHECK(s.freq_hz[k] > s.freq_hz[k - 1]);

  // Line lands on the offset; its height approaches T2* and its full width at
  // half height approaches 1/(pi T2*) = 2x the half-width constant.
  CHECK(std::abs(peak_freq(s) - 50.0) < 0.5 / (4096.0 * dt) + 1e-9);
  std::size_t best = 0;
  for (std::size_t k = 0; k < s.values.size(); ++k)
    if (s.values[k].real() > s.values[best].real()) best = k;
  CHECK(s.values[best].real() == doctest::Approx(0.3).epsilon(0.02));
  CHECK(nmr::linewidth_hz(0.3) == doctest::Approx(1.0 / (2.0 * kPi * 0.3)).epsilon(1e-12));
  CHECK(full_width(s) == doctest::Approx(2.0 * nmr::linewidth_hz(0.3)).epsilon(0.05));

  // Parseval: spectral power density matches time-domain power.
  double pt = 0.0, pf = 0.0;
  for (const cd& x : v) pt += std::norm(x) * dt;
  for (const cd& x : s.values) pf += std::norm(x) / (4096.0 * dt);
  CHECK(pf == doctest::Approx(pt).epsilon(1e-8));

  CHECK_THROWS_AS(nmr::spectrum_of({}, dt, 1), std::invalid_argument);
  CHECK_THROWS_AS(nmr::linewidth_hz(0.0), std::invalid_argument);
}

TEST_CASE("coupling beats split the line into a doublet") {
  const SpinSystem sys = two_spin(215.0);
  CMat rho = nmr::thermal_state(sys, nmr::ThermalMode::boltzmann, 1e-3);
  nmr::apply_circuit_density(rho, {Gate::rx(1, 90.0)}, 2, &sys);

  const double dt = 1.0 / 1024.0;
  const auto v = nmr::fid(sys, rho, 1, 8.0, dt, 0.5);
  const nmr::Spectrum s = nmr::spectrum_of(v, dt, 1);

  double top = 0.0;
  for (const cd& x : s.values) top = std::max(top, x.real());
  CHECK(count_peaks(s, 0.5 * top) == 2);

  // The doublet straddles the offset at +-J/2.
  std::vector<double> freqs;
  for (std::size_t k = 1; k + 1 < s.values.size(); ++k)
    if (s.values[k].real() > 0.5 * top && s.values[k].real() > s.values[k - 1].real() &&
        s.values[k].real() > s.values[k + 1].real())
      freqs.push_back(s.freq_hz[k]);
  REQUIRE(freqs.size() == 2);
  const double res = 1.0 / (8.0 * 1024.0 * dt) + 0.2;
  CHECK(std::abs(freqs[0] + 107.5) < res);
  CHECK(std::abs(freqs[1] - 107.5) < res);
}

TEST_CASE("multiplet labels carry the spectator states") {
  const auto pair = nmr::assign_multiplet(two_spin(215.0), 1);
  REQUIRE(pair.size() == 2);
  CHECK(pair[0].spectator_bits == "0");
  CHECK(pair[0].freq_hz == doctest::Approx(-107.5).epsilon(1e-12));
  CHECK(pair[1].spectator_bits == "1");
  CHECK(pair[1].freq_hz == doctest::Approx(107.5).epsilon(1e-12));
  CHECK_FALSE(pair[0].merged);

  const auto single = nmr::assign_multiplet(one_spin(75.0), 1);
  REQUIRE(single.size() == 1);
  CHECK(single[0].spectator_bits.empty());
  CHECK(single[0].freq_hz == doctest::Approx(75.0).epsilon(1e-12));

  // Five-spin multiplet of spin 1: sixteen lines, all resolved when the
  // couplings are distinct.
  std::vector<std::vector<double>> j(5, std::vector<double>(5, 0.0));
  const double j1[5] = {0, -70, 25, 5, 12};
  for (int k = 1; k < 5; ++k) j[0][std::size_t(k)] = j[std::size_t(k)][0] = j1[k];
  j[1][2] = j[2][1] = 3.1;
  j[1][3] = j[3][1] = 1.7;
  j[1][4] = j[4][1] = 8.3;
  j[2][3] = j[3][2] = 2.2;
  j[2][4] = j[4][2] = 6.4;
  j[3][4] = j[4][3] = 4.9;
  const SpinSystem five = SpinSystem::homonuclear(5, {0, 200, -150, 320, -260}, j);

  const auto lines = nmr::assign_multiplet(five, 1);
  REQUIRE(lines.size() == 16);
  for (const auto& l : lines) CHECK_FALSE(l.merged);
  CHECK(lines[0].spectator_bits == "0000");
  CHECK(lines[0].freq_hz == doctest::Approx(0.5 * (70 - 25 - 5 - 12)).epsilon(1e-12));
  CHECK(lines[15].spectator_bits == "1111");
  CHECK(lines[15].freq_hz == doctest::Approx(0.5 * (-70 + 25 + 5 + 12)).epsilon(1e-12));
  // Spectator order: spin 2 is the leading character.
  CHECK(lines[8].spectator_bits == "1000");
  CHECK(lines[8].freq_hz == doctest::Approx(0.5 * (-70 - 25 - 5 - 12)).epsilon(1e-12));

  // The thermal spectrum of spin 1 resolves all sixteen lines.
  CMat rho = nmr::thermal_state(five, nmr::ThermalMode::boltzmann, 1e-3);
  nmr::apply_circuit_density(rho, {Gate::rx(1, 90.0)}, 5, &five);
  const double dt = 1.0 / 512.0;
  const auto v = nmr::fid(five, rho, 1, 32.0, dt, 2.0);
  const nmr::Spectrum s = nmr::spectrum_of(v, dt, 1);
  double top = 0.0;
  for (const cd& x : s.values) top = std::max(top, x.real());
  CHECK(count_peaks(s, 0.35 * top) == 16);

  // Duplicated couplings merge labels.
  std::vector<std::vector<double>> jj(3, std::vector<double>(3, 0.0));
  jj[0][1] = jj[1][0] = 30.0;
  jj[0][2] = jj[2][0] = 30.0;
  const auto merged = nmr::assign_multiplet(
      SpinSystem::homonuclear(3, {0, 100, -100}, jj), 1);
  REQUIRE(merged.size() == 4);
  CHECK(merged[0].merged == false);   // -30 Hz, unique
  CHECK(merged[1].merged == true);    // 0 Hz, collides
  CHECK(merged[2].merged == true);
  CHECK(merged[3].merged == false);
}

TEST_CASE("observables report z projections per spin") {
  CMat zero(2, 2);
  zero(0, 0) = 1.0;
  CHECK(nmr::observables(zero, 1)[0] == doctest::Approx(1.0).epsilon(1e-14));
  CMat one(2, 2);
  one(1, 1) = 1.0;
  CHECK(nmr::observables(one, 1)[0] == doctest::Approx(-1.0).epsilon(1e-14));

  const CMat mixed = CMat::identity(8) * cd(1.0 / 8.0);
  for (double o : nmr::observables(mixed, 3)) CHECK(std::abs(o) < 1e-14);

  CMat d = CMat::zeros(4, 4);
  d(0, 0) = 0.4;
  d(1, 1) = 0.3;
  d(2, 2) = 0.2;
  d(3, 3) = 0.1;
  const auto o = nmr::observables(d, 2);
  CHECK(o[0] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(o[1] == doctest::Approx(0.2).epsilon(1e-14));

  for (double v : nmr::observables(random_mixed_state(2, 7u), 2)) {
    CHECK(v <= 1.0 + 1e-12);
    CHECK(v >= -1.0 - 1e-12);
  }
}

TEST_CASE("line amplitudes pick single-quantum elements only") {
  // Spin-1 lines read rows/columns differing in the leading bit; spin-2
  // lines the trailing bit. A lone (0,2) coherence lights exactly one line.
  const SpinSystem sys = two_spin(50.0);
  CMat rho = CMat::identity(4) * cd(0.25);
  rho(0, 2) = cd(0.1, 0.05);
  rho(2, 0) = cd(0.1, -0.05);

  const auto s1 = nmr::sqc_line_amplitudes(sys, rho, 1);
  REQUIRE(s1.size() == 2);
  CHECK(std::abs(s1[0] - cd(0, -2) * cd(0.1, 0.05)) < 1e-14);
  CHECK(std::abs(s1[1]) < 1e-14);
  for (const cd& a : nmr::sqc_line_amplitudes(sys, rho, 2)) CHECK(std::abs(a) < 1e-14);

  // Zero-quantum and double-quantum elements stay invisible.
  CMat zq = CMat::identity(4) * cd(0.25);
  zq(1, 2) = cd(0.2, 0.0);
  zq(2, 1) = cd(0.2, 0.0);
  zq(0, 3) = cd(0.0, 0.1);
  zq(3, 0) = cd(0.0, -0.1);
  for (int spin : {1, 2})
    for (const cd& a : nmr::sqc_line_amplitudes(sys, zq, spin)) CHECK(std::abs(a) < 1e-14);
}

TEST_CASE("summed line amplitudes agree with the observables") {
  const SpinSystem sys = two_spin(215.0);
  CMat rho = CMat::zeros(4, 4);
  rho(0, 0) = 0.42;
  rho(1, 1) = 0.27;
  rho(2, 2) = 0.19;
  rho(3, 3) = 0.12;
  const auto o = nmr::observables(rho, 2);

  for (int spin : {1, 2}) {
    CMat read = rho;
    nmr::apply_circuit_density(read, {Gate::rx(spin, 90.0)}, 2, &sys);
    cd total = 0.0;
    for (const cd& a : nmr::sqc_line_amplitudes(sys, read, spin)) total += a;
    CHECK(std::abs(total - cd(o[std::size_t(spin) - 1])) < 1e-12);
  }

  // A spin prepared in |0> reads out as one unit-amplitude positive line.
  CMat ground(2, 2);
  ground(0, 0) = 1.0;
  nmr::apply_circuit_density(ground, {Gate::rx(1, 90.0)}, 1, nullptr);
  const auto amp = nmr::sqc_line_amplitudes(one_spin(0.0), ground, 1);
  REQUIRE(amp.size() == 1);
  CHECK(std::abs(amp[0] - cd(1.0)) < 1e-14);
}

TEST_CASE("tomography reconstructs the density matrix") {
  CHECK(nmr::tomography_readout_set(2).size() == 9);
  CHECK(nmr::tomography_readout_set(3).size() == 27);

  const SpinSystem sys = two_spin(215.0, 130.0, -470.0);
  auto run = [&](const CMat& rho, int n, const SpinSystem& s) {
    std::vector<nmr::TomographyReading> readings;
    for (const Circuit& c : nmr::tomography_readout_set(n))
      readings.push_back(nmr::simulate_tomography_reading(s, rho, c));
    return nmr::tomography(s, readings);
  };

  // Pure ground state round trip.
  CMat ground = CMat::zeros(4, 4);
  ground(0, 0) = 1.0;
  const CMat rec = run(ground, 2, sys);
  CHECK(nmr::max_abs_diff(rec, ground) < 1e-8);
  CHECK(std::abs(rec.trace() - cd(1.0)) < 1e-10);
  CHECK(nmr::max_abs_diff(rec, rec.dagger()) < 1e-12);

  // Random mixed states are fixed points of simulate-then-reconstruct.
  const CMat mixed = random_mixed_state(2, 41u);
  CHECK(nmr::max_abs_diff(run(mixed, 2, sys), mixed) < 1e-8);

  // Three-spin entangled state through the 27-experiment set.
  std::vector<std::vector<double>> j(3, std::vector<double>(3, 0.0));
  j[0][1] = j[1][0] = 215.0;
  j[0][2] = j[2][0] = 19.0;
  j[1][2] = j[2][1] = 40.0;
  const SpinSystem three = SpinSystem::homonuclear(3, {500.0, -310.0, 120.0}, j);
  CMat cat = CMat::zeros(8, 8);
  cat(0, 0) = 1.0;
  nmr::apply_circuit_density(cat, {Gate::hadamard(1), Gate::cnot(1, 2), Gate::cnot(2, 3)}, 3,
                             &three);
  CHECK(nmr::max_abs_diff(run(cat, 3, three), cat) < 1e-8);

  // An identity-only readout set cannot span the state space.
  std::vector<nmr::TomographyReading> flat;
  for (int k = 0; k < 9; ++k)
    flat.push_back(nmr::simulate_tomography_reading(sys, mixed, Circuit{}));
  CHECK_THROWS_AS(nmr::tomography(sys, flat), std::invalid_argument);
  CHECK_THROWS_AS(nmr::tomography(sys, {}), std::invalid_argument);
}

TEST_CASE("spectrum serializes to csv") {
  const SpinSystem sys = one_spin(40.0);
  const double dt = 1.0 / 256.0;
  const auto v = nmr::fid(sys, minus_y_state(), 1, 1.0, dt, 0.3);
  const nmr::Spectrum s = nmr::spectrum_of(v, dt, 1);
  const std::string csv = nmr::spectrum_to_csv(s);

  std::istringstream is(csv);
  std::string line;
  REQUIRE(std::getline(is, line));
  CHECK(line == "freq_hz,real,imag");
  std::size_t rows = 0;
  double first_freq = 0.0;
  while (std::getline(is, line)) {
    if (rows == 0) first_freq = std::stod(line.substr(0, line.find(',')));
    ++rows;
  }
  CHECK(rows == s.values.size());
  CHECK(first_freq == doctest::Approx(s.freq_hz[0]).epsilon(1e-9));
}
