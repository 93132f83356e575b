#include "nmr/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

#include "nmr/gates.hpp"
#include "nmr/linalg.hpp"

namespace nmr {

namespace {

constexpr double kDegToRad = M_PI / 180.0;
constexpr double kTwoPi = 2.0 * M_PI;

// Envelopes are sampled at slice midpoints over a +-2.5 sigma window.
// Hermite coefficients follow the standard parameterization whose 180
// variant self-refocuses; the 90 variant pairs with it.
constexpr double kWindowSigma = 2.5;
constexpr double kHermiteA90 = 0.667;
constexpr double kHermiteA180 = 0.956;

std::vector<PulseSlice> sample_envelope(int n_slices, double (*env)(double)) {
  if (n_slices < 1) throw std::invalid_argument("shape needs at least one slice");
  std::vector<PulseSlice> s(static_cast<std::size_t>(n_slices));
  double peak = 0.0;
  std::vector<double> raw(static_cast<std::size_t>(n_slices));
  for (int k = 0; k < n_slices; ++k) {
    const double x = -kWindowSigma + 2.0 * kWindowSigma * (k + 0.5) / n_slices;
    raw[static_cast<std::size_t>(k)] = env(x);
    peak = std::max(peak, std::abs(raw[static_cast<std::size_t>(k)]));
  }
  for (int k = 0; k < n_slices; ++k) {
    const double v = raw[static_cast<std::size_t>(k)] / peak;
    s[static_cast<std::size_t>(k)].amplitude = std::abs(v);
    s[static_cast<std::size_t>(k)].phase_deg = v < 0.0 ? 180.0 : 0.0;
  }
  return s;
}

}  // namespace

double PulseShape::mean_amplitude() const {
  // Signed on-axis projection: a 180-degree slice phase counts negative,
  // which is what the flip-angle integral sees on resonance.
  double sum = 0.0;
  for (const PulseSlice& s : slices) sum += s.amplitude * std::cos(s.phase_deg * kDegToRad);
  return sum / static_cast<double>(slices.size());
}

void PulseShape::validate() const {
  if (slices.empty()) throw std::invalid_argument("pulse shape has no slices");
  for (const PulseSlice& s : slices)
    if (!(s.amplitude >= 0.0 && s.amplitude <= 1.0 + 1e-12))
      throw std::invalid_argument("slice amplitude outside [0,1]");
  if (!(nominal_angle_deg > 0.0))
    throw std::invalid_argument("nominal angle must be positive");
}

PulseShape PulseShape::rectangular(double nominal) {
  PulseShape p;
  p.name = "rectangular";
  p.nominal_angle_deg = nominal;
  p.slices = {{1.0, 0.0}};
  return p;
}

PulseShape PulseShape::gaussian(double nominal, int n_slices) {
  PulseShape p;
  p.name = nominal == 90.0 ? "gaussian90" : (nominal == 180.0 ? "gaussian180" : "gaussian");
  p.nominal_angle_deg = nominal;
  p.slices = sample_envelope(n_slices, [](double x) { return std::exp(-0.5 * x * x); });
  return p;
}

PulseShape PulseShape::hermite90(int n_slices) {
  PulseShape p;
  p.name = "hermite90";
  p.nominal_angle_deg = 90.0;
  p.slices = sample_envelope(
      n_slices, [](double x) { return (1.0 - kHermiteA90 * x * x) * std::exp(-x * x); });
  return p;
}

PulseShape PulseShape::hermite180(int n_slices) {
  PulseShape p;
  p.name = "hermite180";
  p.nominal_angle_deg = 180.0;
  p.slices = sample_envelope(
      n_slices, [](double x) { return (1.0 - kHermiteA180 * x * x) * std::exp(-x * x); });
  return p;
}

PulseShape PulseShape::named(const std::string& name) {
  if (name == "rectangular") return rectangular(90.0);
  if (name == "gaussian90") return gaussian(90.0);
  if (name == "gaussian180") return gaussian(180.0);
  if (name == "hermite90") return hermite90();
  if (name == "hermite180") return hermite180();
  if (name == "av90") {  // stand-in: the published coefficients are not available
    PulseShape p = hermite90();
    p.name = "av90";
    return p;
  }
  throw std::invalid_argument("unknown pulse shape: " + name);
}

std::string shape_to_text(const PulseShape& s) {
  std::ostringstream os;
  os.precision(12);
  os << "name " << s.name << "\n";
  os << "angle " << s.nominal_angle_deg << "\n";
  os << "# amplitude phase_deg\n";
  for (const PulseSlice& sl : s.slices) os << sl.amplitude << " " << sl.phase_deg << "\n";
  return os.str();
}

PulseShape parse_shape(const std::string& text) {
  PulseShape p;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  bool have_name = false, have_angle = false;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "name") {
      if (!(ls >> p.name))
        throw std::invalid_argument("shape line " + std::to_string(lineno) + ": missing name");
      have_name = true;
    } else if (first == "angle") {
      if (!(ls >> p.nominal_angle_deg))
        throw std::invalid_argument("shape line " + std::to_string(lineno) + ": missing angle");
      have_angle = true;
    } else {
      PulseSlice s;
      try {
        s.amplitude = std::stod(first);
      } catch (const std::exception&) {
        throw std::invalid_argument("shape line " + std::to_string(lineno) + ": bad amplitude");
      }
      if (!(ls >> s.phase_deg))
        throw std::invalid_argument("shape line " + std::to_string(lineno) + ": missing phase");
      p.slices.push_back(s);
    }
  }
  if (!have_name || !have_angle)
    throw std::invalid_argument("shape file needs name and angle lines");
  p.validate();
  return p;
}

void PulseEvent::validate() const {
  shape.validate();
  if (!(duration_s > 0.0)) throw std::invalid_argument("pulse duration must be positive");
  if (channels.empty()) throw std::invalid_argument("pulse event has no channels");
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const PulseChannel& c = channels[i];
    if (c.spin < 1) throw std::invalid_argument("channel spin index out of range");
    if (c.peak_omega1_hz < 0.0) throw std::invalid_argument("channel peak omega1 negative");
    if (!c.slice_phase_deg.empty() && c.slice_phase_deg.size() != shape.slices.size())
      throw std::invalid_argument("channel slice phases must match the shape's slice count");
    for (std::size_t j = i + 1; j < channels.size(); ++j)
      if (channels[j].spin == c.spin)
        throw std::invalid_argument("channels must target distinct spins");
  }
}

double calibrated_peak_omega1_hz(const PulseShape& shape, double duration_s) {
  shape.validate();
  if (!(duration_s > 0.0)) throw std::invalid_argument("pulse duration must be positive");
  const double mean = shape.mean_amplitude();
  if (mean <= 0.0) throw std::invalid_argument("shape has no net on-axis rotation to calibrate");
  return (shape.nominal_angle_deg / 360.0) / (duration_s * mean);
}

PulseEvent make_pulse_event(const SpinSystem& sys, int spin, const PulseShape& shape,
                            double duration_s, double phase_deg) {
  sys.validate();
  if (spin < 1 || spin > sys.n) throw std::invalid_argument("pulse spin index out of range");
  PulseEvent ev;
  ev.shape = shape;
  ev.duration_s = duration_s;
  PulseChannel ch;
  ch.spin = spin;
  ch.carrier_offset_hz = sys.offset_hz[static_cast<std::size_t>(spin - 1)];
  ch.phase_deg = phase_deg;
  ch.peak_omega1_hz = calibrated_peak_omega1_hz(shape, duration_s);
  ev.channels.push_back(ch);
  ev.validate();
  return ev;
}

Operator ideal_rotation(char axis, double angle_deg, int spin, int n) {
  CMat u2;
  switch (axis) {
    case 'x': u2 = rot_x(angle_deg); break;
    case 'y': u2 = rot_y(angle_deg); break;
    case 'z': u2 = rot_z(angle_deg); break;
    default: throw std::invalid_argument("rotation axis must be x, y, or z");
  }
  return Operator{Operator::Kind::unitary, embed(u2, {spin}, n)};
}

Operator ideal_rotation(const std::array<double, 3>& axis, double angle_deg, int spin, int n) {
  const double len = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  if (len == 0.0) throw std::invalid_argument("rotation axis must be nonzero");
  const double h = 0.5 * angle_deg * kDegToRad;
  const cd c = std::cos(h), s = cd(0.0, -std::sin(h));
  CMat u2(2, 2);
  const double nx = axis[0] / len, ny = axis[1] / len, nz = axis[2] / len;
  u2(0, 0) = c + s * nz;
  u2(0, 1) = s * cd(nx, -ny);
  u2(1, 0) = s * cd(nx, ny);
  u2(1, 1) = c - s * nz;
  return Operator{Operator::Kind::unitary, embed(u2, {spin}, n)};
}

Operator shaped_propagator(const SpinSystem& sys, const PulseEvent& ev, bool include_coupling,
                           RfScope scope) {
  sys.validate();
  ev.validate();
  const int n = sys.n;
  const std::size_t dim = sys.dim();
  for (const PulseChannel& c : ev.channels)
    if (c.spin > n) throw std::invalid_argument("channel spin outside the system");

  std::vector<char> in_scope(static_cast<std::size_t>(n) + 1, scope == RfScope::all_spins);
  if (scope == RfScope::targets_only)
    for (const PulseChannel& c : ev.channels) in_scope[static_cast<std::size_t>(c.spin)] = 1;

  const double f_ref = ev.channels[0].carrier_offset_hz;

  // Static diagonal (rad/s): couplings plus detunings relative to the
  // integration frame for every spin in scope.
  std::vector<double> hdiag(dim, 0.0);
  if (include_coupling) hdiag = hamiltonian_diag(sys, /*with_offsets=*/false);
  for (int s = 1; s <= n; ++s) {
    if (!in_scope[static_cast<std::size_t>(s)]) continue;
    const double delta = sys.offset_hz[static_cast<std::size_t>(s - 1)] - f_ref;
    if (delta == 0.0) continue;
    const std::size_t bit = std::size_t(1) << spin_bit(n, s);
    for (std::size_t b = 0; b < dim; ++b) {
      const double mz = (b & bit) ? -0.5 : 0.5;
      hdiag[b] += -kTwoPi * delta * mz;
    }
  }

  const std::size_t n_slices = ev.shape.slices.size();
  const double dt_slice = ev.duration_s / static_cast<double>(n_slices);

  // Off-carrier channels rotate their axis phase within a slice; sub-step so
  // the midpoint-sampled phase drifts at most ~5 degrees per step.
  double drift_hz = 0.0;
  for (const PulseChannel& c : ev.channels)
    drift_hz = std::max(drift_hz, std::abs(c.carrier_offset_hz - f_ref));
  const int substeps = std::max(1, static_cast<int>(std::ceil(360.0 * drift_hz * dt_slice / 5.0)));
  const double dt = dt_slice / substeps;

  CMat u = CMat::identity(dim);
  CMat h(dim, dim);
  for (std::size_t k = 0; k < n_slices; ++k) {
    const PulseSlice& sl = ev.shape.slices[k];
    for (int q = 0; q < substeps; ++q) {
      const double t_mid = (static_cast<double>(k) + (q + 0.5) / substeps) * dt_slice;
      for (std::size_t i = 0; i < dim * dim; ++i) h.data()[i] = 0.0;
      for (std::size_t b = 0; b < dim; ++b) h(b, b) = hdiag[b];
      for (const PulseChannel& c : ev.channels) {
        const double w1 = kTwoPi * c.peak_omega1_hz * sl.amplitude;
        if (w1 == 0.0) continue;
        double p = c.phase_deg + sl.phase_deg - 360.0 * (c.carrier_offset_hz - f_ref) * t_mid;
        if (!c.slice_phase_deg.empty()) p += c.slice_phase_deg[k];
        const cd lower = 0.5 * w1 * std::polar(1.0, -p * kDegToRad);
        for (int s = 1; s <= n; ++s) {
          if (scope == RfScope::targets_only && s != c.spin) continue;
          const std::size_t bit = std::size_t(1) << spin_bit(n, s);
          for (std::size_t b = 0; b < dim; ++b) {
            if (b & bit) continue;
            h(b, b | bit) += lower;
            h(b | bit, b) += std::conj(lower);
          }
        }
      }
      CMat gen = cd(0.0, -dt) * h;
      u = expm(gen) * u;
    }
  }

  // Return in each spin's own frame: strip the detuning phases accumulated
  // over the full duration.
  for (int s = 1; s <= n; ++s) {
    if (!in_scope[static_cast<std::size_t>(s)]) continue;
    const double delta = sys.offset_hz[static_cast<std::size_t>(s - 1)] - f_ref;
    if (delta == 0.0) continue;
    const std::size_t bit = std::size_t(1) << spin_bit(n, s);
    for (std::size_t b = 0; b < dim; ++b) {
      const double mz = (b & bit) ? -0.5 : 0.5;
      const cd ph = std::polar(1.0, -kTwoPi * delta * ev.duration_s * mz);
      for (std::size_t col = 0; col < dim; ++col) u(b, col) *= ph;
    }
  }
  return Operator{Operator::Kind::unitary, u};
}

std::vector<ProfilePoint> excitation_profile(const PulseEvent& ev,
                                             const std::vector<double>& freq_grid_hz,
                                             const std::array<double, 3>& initial_bloch) {
  ev.validate();
  if (freq_grid_hz.empty()) throw std::invalid_argument("profile frequency grid is empty");
  const double f_ref = ev.channels[0].carrier_offset_hz;

  // All channels drive the one probe spin: a lone spin sees every field.
  std::vector<ProfilePoint> out;
  out.reserve(freq_grid_hz.size());
  for (double sep : freq_grid_hz) {
    SpinSystem one = SpinSystem::homonuclear(1, {f_ref - sep}, {{0.0}});
    PulseEvent probe = ev;
    // Distinct-spin validation forbids several channels on spin 1 of a
    // one-spin system, so renumber and widen the probe system instead.
    const int m = static_cast<int>(probe.channels.size());
    if (m > 1) {
      std::vector<double> offsets(static_cast<std::size_t>(m), f_ref - sep);
      std::vector<std::vector<double>> j(static_cast<std::size_t>(m),
                                         std::vector<double>(static_cast<std::size_t>(m), 0.0));
      one = SpinSystem::homonuclear(m, offsets, j);
    }
    for (int i = 0; i < m; ++i) probe.channels[static_cast<std::size_t>(i)].spin = i + 1;
    const CMat u = shaped_propagator(one, probe, /*include_coupling=*/false).m;

    // The widened copies are uncoupled, so spin 1 stands in for the probe.
    const double norm = 1.0 / static_cast<double>(one.dim());
    CMat sx = 0.5 * embed(pauli('X'), {1}, one.n);
    CMat sy = 0.5 * embed(pauli('Y'), {1}, one.n);
    CMat sz = 0.5 * embed(pauli('Z'), {1}, one.n);
    CMat rho = cd(norm, 0.0) * CMat::identity(one.dim()) +
               cd(2.0 * norm * initial_bloch[0], 0.0) * sx +
               cd(2.0 * norm * initial_bloch[1], 0.0) * sy +
               cd(2.0 * norm * initial_bloch[2], 0.0) * sz;
    CMat evolved = u * rho * u.dagger();
    // Bloch components read back as <sigma> = 2 Tr(rho S).
    const double x = 2.0 * (evolved * sx).trace().real();
    const double y = 2.0 * (evolved * sy).trace().real();
    const double z = 2.0 * (evolved * sz).trace().real();
    out.push_back({sep, z, std::hypot(x, y)});
  }
  return out;
}

double bloch_siegert_shift_hz(double omega1_hz, double separation_hz) {
  if (separation_hz == 0.0)
    throw std::invalid_argument("Bloch-Siegert shift undefined at zero separation");
  return -(omega1_hz * omega1_hz) / (2.0 * separation_hz);
}

std::vector<double> accumulate_bs_phase(const SpinSystem& sys, const PulseEvent& ev) {
  sys.validate();
  ev.validate();
  std::vector<char> is_target(static_cast<std::size_t>(sys.n) + 1, 0);
  for (const PulseChannel& c : ev.channels) {
    if (c.spin > sys.n) throw std::invalid_argument("channel spin outside the system");
    is_target[static_cast<std::size_t>(c.spin)] = 1;
  }
  const double dt = ev.duration_s / static_cast<double>(ev.shape.slices.size());
  std::vector<double> phase_deg(static_cast<std::size_t>(sys.n), 0.0);
  for (int s = 1; s <= sys.n; ++s) {
    if (is_target[static_cast<std::size_t>(s)]) continue;
    const double f_spin = sys.offset_hz[static_cast<std::size_t>(s - 1)];
    double total = 0.0;
    for (const PulseSlice& sl : ev.shape.slices) {
      for (const PulseChannel& c : ev.channels) {
        const double sep = c.carrier_offset_hz - f_spin;
        if (sep == 0.0)
          throw std::invalid_argument("spectator spin is resonant with a pulse carrier");
        total += bloch_siegert_shift_hz(c.peak_omega1_hz * sl.amplitude, sep) * dt;
      }
    }
    phase_deg[static_cast<std::size_t>(s - 1)] = 360.0 * total;
  }
  return phase_deg;
}

PulseShape phase_ramp(const PulseShape& shape, double delta_hz, double slice_dt_s) {
  shape.validate();
  if (!(slice_dt_s > 0.0)) throw std::invalid_argument("slice duration must be positive");
  const double step = 360.0 * std::abs(delta_hz) * slice_dt_s;
  if (step > 10.0 + 1e-9)
    throw std::invalid_argument("phase ramp step exceeds 10 degrees per slice; use more slices");
  PulseShape out = shape;
  for (std::size_t k = 0; k < out.slices.size(); ++k)
    out.slices[k].phase_deg += 360.0 * delta_hz * static_cast<double>(k) * slice_dt_s;
  return out;
}

PulseShape combine(const PulseShape& a, const PulseShape& b) {
  a.validate();
  b.validate();
  if (a.slices.size() != b.slices.size())
    throw std::invalid_argument("combined shapes must have the same slice count");
  PulseShape out;
  out.name = "combined";
  out.nominal_angle_deg = a.nominal_angle_deg;
  out.slices.resize(a.slices.size());
  for (std::size_t k = 0; k < a.slices.size(); ++k) {
    const cd va = std::polar(a.slices[k].amplitude, a.slices[k].phase_deg * kDegToRad);
    const cd vb = std::polar(b.slices[k].amplitude, b.slices[k].phase_deg * kDegToRad);
    const cd v = 0.5 * (va + vb);
    out.slices[k].amplitude = std::abs(v);
    out.slices[k].phase_deg = std::abs(v) == 0.0 ? 0.0 : std::arg(v) / kDegToRad;
  }
  return out;
}

PulseEvent simultaneous_with_tracking(const SpinSystem& sys, const PulseEvent& ev) {
  sys.validate();
  ev.validate();
  for (std::size_t i = 0; i < ev.channels.size(); ++i)
    for (std::size_t j = i + 1; j < ev.channels.size(); ++j)
      if (ev.channels[i].carrier_offset_hz == ev.channels[j].carrier_offset_hz)
        throw std::invalid_argument("tracking needs distinct channel carriers");

  const std::size_t n_slices = ev.shape.slices.size();
  const double dt = ev.duration_s / static_cast<double>(n_slices);
  PulseEvent out = ev;
  for (std::size_t i = 0; i < ev.channels.size(); ++i) {
    const PulseChannel& me = ev.channels[i];
    const double f_me = sys.offset_hz[static_cast<std::size_t>(me.spin - 1)];
    // Instantaneous shift of this channel's target caused by every other
    // channel's field; the carrier must follow it, which as a phase
    // modulation is minus the integrated excursion.
    std::vector<double> shift(n_slices, 0.0);
    for (std::size_t k = 0; k < n_slices; ++k) {
      for (std::size_t j = 0; j < ev.channels.size(); ++j) {
        if (j == i) continue;
        const PulseChannel& other = ev.channels[j];
        const double sep = other.carrier_offset_hz - f_me;
        if (sep == 0.0)
          throw std::invalid_argument("tracking target resonant with another carrier");
        shift[k] +=
            bloch_siegert_shift_hz(other.peak_omega1_hz * ev.shape.slices[k].amplitude, sep);
      }
    }
    std::vector<double>& ramp = out.channels[i].slice_phase_deg;
    ramp.assign(n_slices, 0.0);
    double integral = 0.0;  // midpoint cumulative sum of the excursion
    for (std::size_t k = 0; k < n_slices; ++k) {
      const double at_mid = integral + 0.5 * shift[k] * dt;
      ramp[k] = (me.slice_phase_deg.empty() ? 0.0 : me.slice_phase_deg[k]) - 360.0 * at_mid;
      integral += shift[k] * dt;
    }
  }
  return out;
}

double unwind_tau(const SpinSystem& sys, const PulseEvent& ev, UnwindPlacement placement) {
  sys.validate();
  ev.validate();
  if (sys.max_abs_coupling() == 0.0) return 0.0;

  const CMat u_real = shaped_propagator(sys, ev, /*include_coupling=*/true,
                                        RfScope::targets_only).m;
  CMat u_ideal = CMat::identity(sys.dim());
  for (const PulseChannel& c : ev.channels)
    u_ideal = embed(rot_phase(ev.shape.nominal_angle_deg, c.phase_deg), {c.spin}, sys.n) * u_ideal;

  const double pw = ev.duration_s;
  auto distance = [&](double tau) {
    const CMat w = free_evolution(sys, -pw * tau, /*with_offsets=*/false);  // e^{+i H_J pw tau}
    CMat trial;
    switch (placement) {
      case UnwindPlacement::symmetric: trial = w * u_real * w; break;
      case UnwindPlacement::before: trial = u_real * w; break;
      case UnwindPlacement::after: trial = w * u_real; break;
    }
    return two_norm(trial - u_ideal);
  };

  // Coarse scan, then golden-section refinement around the best cell.
  const int n_scan = 31;
  double best_tau = 0.0, best_d = distance(0.0);
  for (int i = 1; i < n_scan; ++i) {
    const double tau = 1.5 * static_cast<double>(i) / (n_scan - 1);
    const double d = distance(tau);
    if (d < best_d) {
      best_d = d;
      best_tau = tau;
    }
  }
  const double cell = 1.5 / (n_scan - 1);
  const double lo = std::max(0.0, best_tau - cell);
  const double hi = std::min(1.5, best_tau + cell);
  return golden_min(distance, lo, hi, 1e-3);
}

}  // namespace nmr
