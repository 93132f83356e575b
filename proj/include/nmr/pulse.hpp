#pragma once

#include <array>
#include <string>
#include <vector>

#include "nmr/spin_system.hpp"

namespace nmr {

// Discretized RF envelope. Amplitudes are relative (peak 1); per-slice phase
// offsets encode ramps. Calibration happens at event level: the peak omega1
// is chosen so the on-resonance flip equals nominal_angle_deg.
struct PulseSlice {
  double amplitude = 0.0;
  double phase_deg = 0.0;
};

struct PulseShape {
  std::string name;
  std::vector<PulseSlice> slices;
  double nominal_angle_deg = 90.0;

  double mean_amplitude() const;
  void validate() const;

  static PulseShape rectangular(double nominal_angle_deg);
  static PulseShape gaussian(double nominal_angle_deg, int n_slices = 64);
  static PulseShape hermite90(int n_slices = 64);
  static PulseShape hermite180(int n_slices = 64);
  // Library lookup: rectangular | gaussian90 | gaussian180 | hermite90 |
  // hermite180 | av90 (alias of hermite90).
  static PulseShape named(const std::string& name);
};

std::string shape_to_text(const PulseShape& s);
PulseShape parse_shape(const std::string& text);

// One RF channel of an event. The field acts on every spin (same coil);
// `spin` records the intended target for calibration and bookkeeping.
// slice_phase_deg, when non-empty, adds a per-slice phase on this channel
// (used for carrier-tracking corrections); length must match the shape.
struct PulseChannel {
  int spin = 1;
  double carrier_offset_hz = 0.0;
  double phase_deg = 0.0;
  double peak_omega1_hz = 0.0;
  std::vector<double> slice_phase_deg;
};

struct PulseEvent {
  PulseShape shape;
  double duration_s = 0.0;
  std::vector<PulseChannel> channels;
  void validate() const;
};

// Peak RF amplitude (Hz) so that integral(omega1 dt) equals the nominal angle.
double calibrated_peak_omega1_hz(const PulseShape& shape, double duration_s);

// Single-channel event on `spin` at the spin's own frequency, calibrated.
PulseEvent make_pulse_event(const SpinSystem& sys, int spin, const PulseShape& shape,
                            double duration_s, double phase_deg = 0.0);

// Whether RF fields act on all spins (physical) or only on each channel's
// listed target (the idealized setting used for coupled-evolution studies).
enum class RfScope { all_spins, targets_only };

Operator ideal_rotation(char axis, double angle_deg, int spin, int n);
Operator ideal_rotation(const std::array<double, 3>& axis, double angle_deg, int spin, int n);

// Product of slice propagators (last slice leftmost). Integration runs in
// the frame of the first channel's carrier (channels off that carrier
// oscillate and get sub-steps); the result is returned in each spin's own
// rotating frame, so it composes directly with coupling-only free evolution.
// include_coupling adds the J terms; detunings relative to the carrier are
// always part of the slice Hamiltonians.
Operator shaped_propagator(const SpinSystem& sys, const PulseEvent& ev, bool include_coupling,
                           RfScope scope = RfScope::all_spins);

struct ProfilePoint {
  double offset_hz = 0.0;
  double z = 0.0;
  double xy = 0.0;
};

// Single-spin response. Grid entries are separations f_rf - f_spin (the same
// convention the Bloch-Siegert helpers use): for each one, a lone spin at
// that separation from the first channel's carrier is evolved from the
// initial Bloch vector and its final z and |xy| are reported.
std::vector<ProfilePoint> excitation_profile(const PulseEvent& ev,
                                             const std::vector<double>& freq_grid_hz,
                                             const std::array<double, 3>& initial_bloch = {0, 0,
                                                                                           1});

// Apparent frequency shift (Hz) of a spin during irradiation at separation
// = f_rf - f_spin. Sign pushes the spin away from the RF frequency.
double bloch_siegert_shift_hz(double omega1_hz, double separation_hz);

// Per-spin integrated Bloch-Siegert phase (degrees) accumulated by the
// spectators of the event over its duration. Targets get 0.
std::vector<double> accumulate_bs_phase(const SpinSystem& sys, const PulseEvent& ev);

// Slice k phase incremented by 360*delta*k*dt: moves the effective carrier
// by +delta. Throws when the per-slice step exceeds ~10 degrees.
PulseShape phase_ramp(const PulseShape& shape, double delta_hz, double slice_dt_s);

// Per-slice complex mean of two equal-length shapes (vector sum halved so
// amplitudes stay in [0,1]); drive at twice the single-shape peak to realize
// both components at full angle.
PulseShape combine(const PulseShape& a, const PulseShape& b);

// Adds per-channel slice phase ramps so every channel's effective carrier
// tracks the instantaneous Bloch-Siegert-shifted resonance of its target.
PulseEvent simultaneous_with_tracking(const SpinSystem& sys, const PulseEvent& ev);

enum class UnwindPlacement { symmetric, before, after };

// Tau (fraction of the pulse width) minimizing the 2-norm distance between
// the J-unwound real propagator and the ideal rotation; scanned over [0,1.5].
double unwind_tau(const SpinSystem& sys, const PulseEvent& ev, UnwindPlacement placement);

}  // namespace nmr
