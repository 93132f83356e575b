#include "nmr/sequence.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "nmr/linalg.hpp"

namespace nmr {

namespace {

constexpr double kPi = std::numbers::pi;

double norm_deg(double x) {
  double r = std::fmod(x, 360.0);
  if (r < 0.0) r += 360.0;
  return r;
}

// Left-multiplies u by a single-spin operator without forming the embedding.
void left_apply_single(CMat& u, int n, int spin, const CMat& m2) {
  const std::size_t dim = u.rows();
  const std::size_t mask = std::size_t(1) << spin_bit(n, spin);
  const cd a = m2(0, 0), b = m2(0, 1), c = m2(1, 0), d = m2(1, 1);
  for (std::size_t r0 = 0; r0 < dim; ++r0) {
    if (r0 & mask) continue;
    const std::size_t r1 = r0 | mask;
    for (std::size_t col = 0; col < dim; ++col) {
      const cd x = u(r0, col), y = u(r1, col);
      u(r0, col) = a * x + b * y;
      u(r1, col) = c * x + d * y;
    }
  }
}

void left_apply_coupling(CMat& u, const SpinSystem& sys, double t) {
  const std::vector<double> h = hamiltonian_diag(sys, false);
  for (std::size_t r = 0; r < u.rows(); ++r) {
    const cd ph = std::polar(1.0, -h[r] * t);
    for (std::size_t col = 0; col < u.cols(); ++col) u(r, col) *= ph;
  }
}

// Sequency-ordered Walsh sign: row k has exactly k sign changes over the
// m-column grid (m a power of two).
int walsh_sign(int row, int col, int m) {
  const int gray = row ^ (row >> 1);
  int log2m = 0;
  while ((1 << log2m) < m) ++log2m;
  int rev = 0;
  for (int i = 0; i < log2m; ++i)
    if (gray & (1 << i)) rev |= 1 << (log2m - 1 - i);
  return (std::popcount(unsigned(rev & col)) & 1) ? -1 : 1;
}

PulseShape shape_for(const std::string& name, double angle_deg) {
  if (name == "rectangular") return PulseShape::rectangular(angle_deg);
  if (name == "gaussian") return PulseShape::gaussian(angle_deg);
  PulseShape s = PulseShape::named(name);
  if (std::abs(s.nominal_angle_deg - angle_deg) > 1e-9)
    throw std::invalid_argument("shape '" + name + "' is fixed at " +
                                std::to_string(s.nominal_angle_deg) + " degrees, pulse wants " +
                                std::to_string(angle_deg));
  return s;
}

}  // namespace

CompiledSequence::CompiledSequence(int n) : n_(n), frame_phase_deg_(std::size_t(n), 0.0) {
  if (n < 1) throw std::invalid_argument("CompiledSequence needs at least one spin");
}

double CompiledSequence::frame_phase_deg(int spin) const {
  if (spin < 1 || spin > n_) throw std::invalid_argument("frame_phase_deg: spin out of range");
  return norm_deg(frame_phase_deg_[std::size_t(spin - 1)]);
}

void CompiledSequence::pulse_logical(int spin, double angle_deg, double logical_phase_deg,
                                     const std::string& shape, double duration_s) {
  if (spin < 1 || spin > n_) throw std::invalid_argument("pulse_logical: spin out of range");
  SeqPulse p;
  p.spin = spin;
  p.angle_deg = angle_deg;
  p.phase_deg = logical_phase_deg - norm_deg(frame_phase_deg_[std::size_t(spin - 1)]);
  p.shape = shape;
  p.duration_s = duration_s;
  push(p);
}

void CompiledSequence::push(const SequenceElement& el) {
  if (const auto* p = std::get_if<SeqPulse>(&el)) {
    if (p->spin < 1 || p->spin > n_) throw std::invalid_argument("pulse spin out of range");
    if (p->duration_s < 0.0) throw std::invalid_argument("pulse duration must be >= 0");
    time_cursor_s_ += p->duration_s;
  } else if (const auto* d = std::get_if<SeqDelay>(&el)) {
    if (d->seconds < 0.0)
      throw std::invalid_argument("emitted delays must be >= 0; negative evolution is realized "
                                  "through refocusing rebalancing");
    time_cursor_s_ += d->seconds;
  } else {
    const auto& f = std::get<SeqFrameShift>(el);
    if (f.spin < 1 || f.spin > n_) throw std::invalid_argument("frame shift spin out of range");
    frame_phase_deg_[std::size_t(f.spin - 1)] += f.degrees;
  }
  elements_.push_back(el);
}

void CompiledSequence::append(const CompiledSequence& other) {
  if (other.n_ != n_) throw std::invalid_argument("append: spin counts differ");
  for (const auto& el : other.elements_) push(el);
}

void CompiledSequence::clear_elements() {
  elements_.clear();
  std::fill(frame_phase_deg_.begin(), frame_phase_deg_.end(), 0.0);
  time_cursor_s_ = 0.0;
}

double RefocusScheme::pair_balance_s(int i, int j) const {
  const std::size_t a = std::size_t(i - 1), b = std::size_t(j - 1);
  if (a >= sign_grid.size() || b >= sign_grid.size())
    throw std::invalid_argument("pair_balance_s: spin out of range");
  // Segments are equal by construction; summing sign products as integers
  // keeps the balance binary-exact (m * (T/m) == T).
  bool equal = true;
  for (double s : segment_s) equal = equal && s == segment_s.front();
  if (equal && !segment_s.empty()) {
    long isum = 0;
    for (std::size_t k = 0; k < segment_s.size(); ++k)
      isum += sign_grid[a][k] * sign_grid[b][k];
    return double(isum) * segment_s.front();
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < segment_s.size(); ++k)
    sum += double(sign_grid[a][k] * sign_grid[b][k]) * segment_s[k];
  return sum;
}

RefocusScheme synthesize_refocus(const SpinSystem& sys, std::optional<ActivePair> active,
                                 double total_time_s, const std::set<int>& known_z_spins) {
  if (total_time_s < 0.0) throw std::invalid_argument("refocus time must be >= 0");
  if (active) {
    if (active->a < 1 || active->a > sys.n || active->b < 1 || active->b > sys.n ||
        active->a == active->b)
      throw std::invalid_argument("active pair spins out of range");
    if (known_z_spins.count(active->a) || known_z_spins.count(active->b))
      throw std::invalid_argument("active pair spins cannot be promised along z");
  }
  for (int s : known_z_spins)
    if (s < 1 || s > sys.n) throw std::invalid_argument("known-z spin out of range");

  // Row assignment: the active pair shares the quiet row, known-z spins share
  // one row (their mutual couplings may stay active), every other coupled
  // spin gets its own row. Rows are handed out to higher spin indices first
  // so the canonical two-spin echo pulses spin 1.
  std::vector<int> row(std::size_t(sys.n), 0);
  int next_row = 0;
  if (active) {
    row[std::size_t(active->a - 1)] = 0;
    row[std::size_t(active->b - 1)] = 0;
    next_row = 1;
  }
  if (!known_z_spins.empty()) {
    const int zrow = active ? next_row++ : 0;
    for (int s : known_z_spins) row[std::size_t(s - 1)] = zrow;
    if (!active) next_row = 1;
  }
  for (int s = sys.n; s >= 1; --s) {
    if (active && (s == active->a || s == active->b)) continue;
    if (known_z_spins.count(s)) continue;
    bool coupled = false;
    for (int o = 1; o <= sys.n; ++o)
      if (o != s && sys.coupling_hz(s, o) != 0.0) coupled = true;
    row[std::size_t(s - 1)] = coupled ? next_row++ : 0;
  }

  int rows_needed = 1;
  for (int r : row) rows_needed = std::max(rows_needed, r + 1);
  int m = 1;
  while (m < rows_needed) m <<= 1;

  RefocusScheme scheme;
  scheme.segment_s.assign(std::size_t(m), total_time_s / m);
  scheme.sign_grid.assign(std::size_t(sys.n), std::vector<int>(std::size_t(m), 1));
  for (int s = 1; s <= sys.n; ++s)
    for (int k = 0; k < m; ++k)
      scheme.sign_grid[std::size_t(s - 1)][std::size_t(k)] = walsh_sign(row[std::size_t(s - 1)], k, m);
  scheme.pulse_grid.assign(std::size_t(m), {});
  for (int k = 0; k < m; ++k) {
    for (int s = 1; s <= sys.n; ++s) {
      const int now = scheme.sign_grid[std::size_t(s - 1)][std::size_t(k)];
      const int after = (k + 1 < m) ? scheme.sign_grid[std::size_t(s - 1)][std::size_t(k + 1)] : 1;
      if (now != after) scheme.pulse_grid[std::size_t(k)].push_back(s);
    }
  }
  return scheme;
}

namespace {

void emit_rot(CompiledSequence& cs, int spin, double angle_deg, double logical_phase_deg,
              const CompileOptions& opts) {
  if (angle_deg == 0.0) return;
  double a = angle_deg, p = logical_phase_deg;
  if (a < 0.0) {
    a = -a;
    p += 180.0;
  }
  a = std::fmod(a, 360.0);
  if (a == 0.0) return;  // full turns only change the global phase
  const std::string& shape = (a == 180.0) ? opts.shape180 : opts.shape90;
  cs.pulse_logical(spin, a, norm_deg(p), shape, opts.pw90_s * a / 90.0);
}

// Refocused interval netting exactly U_J(ab) for `seconds` wall-clock time;
// all other couplings cancel (known-z pairs may stay active).
void emit_coupling(CompiledSequence& cs, const SpinSystem& sys, int a, int b, double seconds,
                   const CompileOptions& opts) {
  if (seconds <= 0.0) return;
  std::set<int> zs = opts.known_z_spins;
  zs.erase(a);
  zs.erase(b);
  RefocusScheme scheme = synthesize_refocus(sys, ActivePair{a, b}, seconds, zs);
  for (std::size_t k = 0; k < scheme.segment_s.size(); ++k) {
    cs.push(SeqDelay{scheme.segment_s[k]});
    for (int s : scheme.pulse_grid[k])
      cs.pulse_logical(s, 180.0, 0.0, opts.shape180, opts.pw90_s * 2.0);
  }
}

void compile_into(CompiledSequence& cs, const Gate& g, const SpinSystem& sys,
                  const CompileOptions& opts);

// CNOT with the control-target coupling active; sign of J picks the mirrored
// decomposition (the standard one assumes J > 0).
void emit_cnot_direct(CompiledSequence& cs, const SpinSystem& sys, int c, int t,
                      const CompileOptions& opts) {
  const double j = sys.coupling_hz(c, t);
  emit_rot(cs, t, 90.0, 90.0, opts);
  emit_coupling(cs, sys, c, t, 1.0 / (2.0 * std::abs(j)), opts);
  emit_rot(cs, t, 90.0, j > 0.0 ? 0.0 : 180.0, opts);
  if (opts.phase_exact) {
    cs.push(SeqFrameShift{t, j > 0.0 ? -90.0 : 90.0});
    cs.push(SeqFrameShift{c, j > 0.0 ? 90.0 : -90.0});
  }
}

void emit_cnot(CompiledSequence& cs, const SpinSystem& sys, int c, int t,
               const CompileOptions& opts) {
  if (sys.coupling_hz(c, t) != 0.0) {
    emit_cnot_direct(cs, sys, c, t, opts);
    return;
  }
  // Route through a coupled neighbor of the target on a shortest path from
  // the control: CNOT(c,t) = C(c,k) C(k,t) C(c,k) C(k,t) in time order.
  std::vector<int> prev(std::size_t(sys.n) + 1, 0);
  std::deque<int> queue{c};
  prev[std::size_t(c)] = c;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    if (u == t) break;
    for (int v = 1; v <= sys.n; ++v)
      if (v != u && prev[std::size_t(v)] == 0 && sys.coupling_hz(u, v) != 0.0) {
        prev[std::size_t(v)] = u;
        queue.push_back(v);
      }
  }
  if (prev[std::size_t(t)] == 0)
    throw std::invalid_argument("cnot " + std::to_string(c) + "->" + std::to_string(t) +
                                ": no coupling path between control and target");
  const int k = prev[std::size_t(t)];
  emit_cnot(cs, sys, c, k, opts);
  emit_cnot_direct(cs, sys, k, t, opts);
  emit_cnot(cs, sys, c, k, opts);
  emit_cnot_direct(cs, sys, k, t, opts);
}

// Shared tail of cz/cphase: exp(+i theta Iz Iz) realized as coupling
// evolution. Negative evolution times wrap forward by whole J periods; each
// wrap is undone by 180 degree frame shifts on both spins (up to a global
// factor), so delays stay positive.
void emit_zz(CompiledSequence& cs, const SpinSystem& sys, int a, int b, double theta_deg,
             double& extra_frame_a, double& extra_frame_b, const CompileOptions& opts) {
  const double j = sys.coupling_hz(a, b);
  const double theta = theta_deg * kPi / 180.0;
  if (theta == 0.0) return;
  double t_evo = -theta / (2.0 * kPi * j);
  while (t_evo < 0.0) {
    t_evo += 1.0 / std::abs(j);
    extra_frame_a += 180.0;
    extra_frame_b += 180.0;
  }
  emit_coupling(cs, sys, a, b, t_evo, opts);
}

void emit_controlled_phase(CompiledSequence& cs, const SpinSystem& sys, const Gate& g,
                           const CompileOptions& opts) {
  const int c = g.spins[0], t = g.spins[1];
  // The target-spin phase enters as theta/2, so cz repeats with period 720.
  const double theta = g.kind == Gate::Kind::cz ? std::fmod(g.angle_deg, 720.0)
                                                : norm_deg(g.angle_deg);
  if (theta == 0.0) return;
  const bool on_both = g.kind == Gate::Kind::cphase;  // cz shifts only the target
  double fc = 0.0, ft = 0.0;
  if (sys.coupling_hz(c, t) != 0.0) {
    emit_zz(cs, sys, c, t, theta, fc, ft, opts);
  } else {
    // No direct coupling: conjugate a target z rotation by routed CNOTs,
    // exp(i theta IzIz) = CNOT Rz_t(-theta/2) CNOT.
    emit_cnot(cs, sys, c, t, opts);
    cs.push(SeqFrameShift{t, -theta / 2.0});
    emit_cnot(cs, sys, c, t, opts);
  }
  if (opts.phase_exact) {
    ft += theta / 2.0;
    if (on_both) fc += theta / 2.0;
  }
  if (norm_deg(ft) != 0.0) cs.push(SeqFrameShift{t, ft});
  if (norm_deg(fc) != 0.0) cs.push(SeqFrameShift{c, fc});
}

void compile_into(CompiledSequence& cs, const Gate& g, const SpinSystem& sys,
                  const CompileOptions& opts) {
  using K = Gate::Kind;
  switch (g.kind) {
    case K::rx:
      emit_rot(cs, g.spins[0], g.angle_deg, 0.0, opts);
      return;
    case K::ry:
      emit_rot(cs, g.spins[0], g.angle_deg, 90.0, opts);
      return;
    case K::rz:
      if (norm_deg(g.angle_deg) != 0.0) cs.push(SeqFrameShift{g.spins[0], g.angle_deg});
      return;
    case K::hadamard:
      emit_rot(cs, g.spins[0], 90.0, -90.0, opts);
      cs.push(SeqFrameShift{g.spins[0], 180.0});
      return;
    case K::not_:
      emit_rot(cs, g.spins[0], 180.0, 0.0, opts);
      return;
    case K::cnot:
      emit_cnot(cs, sys, g.spins[0], g.spins[1], opts);
      return;
    case K::cz:
    case K::cphase:
      emit_controlled_phase(cs, sys, g, opts);
      return;
    case K::toffoli: {
      const int c1 = g.spins[0], c2 = g.spins[1], t = g.spins[2];
      compile_into(cs, Gate::hadamard(t), sys, opts);
      compile_into(cs, Gate::cphase(c2, t, 90.0), sys, opts);
      compile_into(cs, Gate::cnot(c1, c2), sys, opts);
      compile_into(cs, Gate::cphase(c2, t, -90.0), sys, opts);
      compile_into(cs, Gate::cnot(c1, c2), sys, opts);
      compile_into(cs, Gate::cphase(c1, t, 90.0), sys, opts);
      compile_into(cs, Gate::hadamard(t), sys, opts);
      return;
    }
    case K::fredkin: {
      const int c = g.spins[0], a = g.spins[1], b = g.spins[2];
      compile_into(cs, Gate::cnot(b, a), sys, opts);
      compile_into(cs, Gate::toffoli(c, a, b), sys, opts);
      compile_into(cs, Gate::cnot(b, a), sys, opts);
      return;
    }
    case K::delay:
      if (g.seconds != 0.0) cs.push(SeqDelay{g.seconds});
      return;
    case K::gphase:
      return;  // unobservable; nothing to emit
    case K::oracle:
      throw std::invalid_argument("cannot compile opaque oracle '" + g.name +
                                  "'; expand it to elementary gates first");
  }
  throw std::invalid_argument("unknown gate kind");
}

}  // namespace

CompiledSequence compile_gate(const Gate& g, const SpinSystem& sys, const CompileOptions& opts) {
  g.validate(sys.n);
  CompiledSequence cs(sys.n);
  compile_into(cs, g, sys, opts);
  return cs;
}

CompiledSequence compile_circuit(const Circuit& c, const SpinSystem& sys,
                                 const CompileOptions& opts) {
  CompiledSequence cs(sys.n);
  for (const auto& g : c) {
    g.validate(sys.n);
    compile_into(cs, g, sys, opts);
  }
  return cs;
}

CompiledSequence absorb_z(const CompiledSequence& seq, bool diagonal_input) {
  CompiledSequence out(seq.n());
  std::vector<double> zshift(std::size_t(seq.n()), 0.0);
  for (const auto& el : seq.elements()) {
    if (const auto* p = std::get_if<SeqPulse>(&el)) {
      if (p->shape == "z") {
        zshift[std::size_t(p->spin - 1)] += p->angle_deg;
      } else {
        SeqPulse q = *p;
        q.phase_deg = q.phase_deg - zshift[std::size_t(p->spin - 1)];
        out.push(q);
      }
    } else {
      out.push(el);
    }
  }
  for (int s = 1; s <= seq.n(); ++s)
    if (zshift[std::size_t(s - 1)] != 0.0) out.push(SeqFrameShift{s, zshift[std::size_t(s - 1)]});
  if (!diagonal_input) return out;

  // Diagonal input: every frame shift commutes to the front of the sequence
  // (gaining its angle on each pulse it passes) where it acts on a state
  // diagonal in that spin and can be dropped.
  CompiledSequence flat(seq.n());
  for (const auto& el : out.elements()) {
    if (const auto* p = std::get_if<SeqPulse>(&el)) {
      SeqPulse q = *p;
      q.phase_deg += out.frame_phase_deg(p->spin);
      flat.push(q);
    } else if (std::holds_alternative<SeqDelay>(el)) {
      flat.push(el);
    }
  }
  return flat;
}

CompiledSequence simplify(const CompiledSequence& seq) {
  std::vector<SequenceElement> els = seq.elements();
  bool changed = true;
  auto commutes_past = [](const SequenceElement& el, int spin) {
    if (const auto* p = std::get_if<SeqPulse>(&el)) return p->spin != spin;
    if (const auto* f = std::get_if<SeqFrameShift>(&el)) return f->spin != spin;
    return false;  // delays couple everything
  };
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < els.size() && !changed; ++i) {
      if (auto* p = std::get_if<SeqPulse>(&els[i])) {
        if (p->shape != "z" && norm_deg(p->angle_deg) == 0.0) {
          els.erase(els.begin() + long(i));
          changed = true;
          break;
        }
        if (p->shape == "z") continue;  // absorb_z handles explicit z pulses
        for (std::size_t j = i + 1; j < els.size(); ++j) {
          if (commutes_past(els[j], p->spin)) continue;
          const auto* q = std::get_if<SeqPulse>(&els[j]);
          if (!q || q->spin != p->spin || q->shape != p->shape || q->shape == "z") break;
          const double dphase = norm_deg(q->phase_deg - p->phase_deg);
          const bool aligned = dphase == 0.0, opposed = dphase == 180.0;
          if (!aligned && !opposed) break;
          const double total = p->angle_deg + (aligned ? q->angle_deg : -q->angle_deg);
          if (norm_deg(total) == 0.0) {
            els.erase(els.begin() + long(j));
            els.erase(els.begin() + long(i));
            changed = true;
          } else if (p->duration_s == 0.0 && q->duration_s == 0.0) {
            p->angle_deg = total;
            els.erase(els.begin() + long(j));
            changed = true;
          }
          break;
        }
      } else if (auto* d = std::get_if<SeqDelay>(&els[i])) {
        if (d->seconds == 0.0) {
          els.erase(els.begin() + long(i));
          changed = true;
          break;
        }
        for (std::size_t j = i + 1; j < els.size(); ++j) {
          if (std::holds_alternative<SeqFrameShift>(els[j])) continue;  // diagonal, commutes
          const auto* e = std::get_if<SeqDelay>(&els[j]);
          if (!e) break;
          d->seconds += e->seconds;
          els.erase(els.begin() + long(j));
          changed = true;
          break;
        }
      } else {
        auto* f = std::get_if<SeqFrameShift>(&els[i]);
        if (norm_deg(f->degrees) == 0.0) {
          els.erase(els.begin() + long(i));
          changed = true;
          break;
        }
        for (std::size_t j = i + 1; j < els.size(); ++j) {
          if (commutes_past(els[j], f->spin) || std::holds_alternative<SeqDelay>(els[j])) continue;
          const auto* g = std::get_if<SeqFrameShift>(&els[j]);
          if (!g || g->spin != f->spin) break;
          f->degrees = norm_deg(f->degrees + g->degrees);
          els.erase(els.begin() + long(j));
          changed = true;
          break;
        }
      }
    }
  }
  CompiledSequence out(seq.n());
  for (const auto& el : els) out.push(el);
  return out;
}

CompiledSequence insert_bs_corrections(const CompiledSequence& seq, const SpinSystem& sys) {
  if (seq.n() != sys.n) throw std::invalid_argument("insert_bs_corrections: spin counts differ");
  CompiledSequence out(seq.n());
  std::vector<double> adj(std::size_t(seq.n()), 0.0);
  for (const auto& el : seq.elements()) {
    const auto* p = std::get_if<SeqPulse>(&el);
    if (!p) {
      out.push(el);
      continue;
    }
    SeqPulse q = *p;
    q.phase_deg -= adj[std::size_t(p->spin - 1)];
    out.push(q);
    if (p->duration_s <= 0.0 || p->shape == "z") continue;
    const PulseEvent ev =
        make_pulse_event(sys, p->spin, shape_for(p->shape, p->angle_deg), p->duration_s,
                         q.phase_deg);
    const std::vector<double> acc = accumulate_bs_phase(sys, ev);
    for (int s = 1; s <= sys.n; ++s) {
      const double a = acc[std::size_t(s - 1)];
      if (a == 0.0) continue;
      out.push(SeqFrameShift{s, a});
      adj[std::size_t(s - 1)] += a;
    }
  }
  return out;
}

namespace {

CMat run_sequence(const CompiledSequence& seq, const SpinSystem& sys, bool apply_final_frames,
                  bool shaped) {
  if (seq.n() != sys.n) throw std::invalid_argument("sequence/system spin counts differ");
  CMat u = CMat::identity(sys.dim());
  // Trailing rotations use the raw accumulated shift, not the mod-360 frame,
  // so the executed unitary is the literal product of the pushed elements.
  std::vector<double> trail(std::size_t(sys.n), 0.0);
  for (const auto& el : seq.elements()) {
    if (const auto* p = std::get_if<SeqPulse>(&el)) {
      if (p->shape == "z") {
        left_apply_single(u, sys.n, p->spin, rot_z(p->angle_deg));
      } else if (shaped && p->duration_s > 0.0) {
        const PulseEvent ev = make_pulse_event(sys, p->spin, shape_for(p->shape, p->angle_deg),
                                               p->duration_s, p->phase_deg);
        u = shaped_propagator(sys, ev, true).m * u;
      } else {
        left_apply_single(u, sys.n, p->spin, rot_phase(p->angle_deg, p->phase_deg));
      }
    } else if (const auto* d = std::get_if<SeqDelay>(&el)) {
      left_apply_coupling(u, sys, d->seconds);
    } else {
      const auto& f = std::get<SeqFrameShift>(el);
      trail[std::size_t(f.spin - 1)] += f.degrees;
    }
  }
  if (apply_final_frames)
    for (int s = 1; s <= sys.n; ++s)
      if (trail[std::size_t(s - 1)] != 0.0)
        left_apply_single(u, sys.n, s, rot_z(trail[std::size_t(s - 1)]));
  return u;
}

}  // namespace

CMat sequence_unitary(const CompiledSequence& seq, const SpinSystem& sys,
                      bool apply_final_frames) {
  return run_sequence(seq, sys, apply_final_frames, false);
}

CMat pulse_mode_unitary(const CompiledSequence& seq, const SpinSystem& sys,
                        bool apply_final_frames) {
  return run_sequence(seq, sys, apply_final_frames, true);
}

double unitary_distance(const CMat& u, const CMat& target, VerifyMode mode) {
  if (u.rows() != target.rows() || u.cols() != target.cols())
    throw std::invalid_argument("unitary_distance: shape mismatch");
  CMat ref = target;
  if (mode == VerifyMode::global_phase) {
    cd tr = 0.0;
    for (std::size_t r = 0; r < u.rows(); ++r)
      for (std::size_t c = 0; c < u.cols(); ++c) tr += std::conj(target(r, c)) * u(r, c);
    const cd ph = std::abs(tr) > 0.0 ? tr / std::abs(tr) : cd(1.0);
    for (std::size_t r = 0; r < ref.rows(); ++r)
      for (std::size_t c = 0; c < ref.cols(); ++c) ref(r, c) *= ph;
  } else if (mode == VerifyMode::diagonal_phase) {
    for (std::size_t r = 0; r < ref.rows(); ++r) {
      cd ip = 0.0;
      for (std::size_t c = 0; c < ref.cols(); ++c) ip += std::conj(target(r, c)) * u(r, c);
      const cd ph = std::abs(ip) > 0.0 ? ip / std::abs(ip) : cd(1.0);
      for (std::size_t c = 0; c < ref.cols(); ++c) ref(r, c) *= ph;
    }
  }
  return two_norm(u - ref);
}

double verify(const CompiledSequence& seq, const CMat& target, const SpinSystem& sys,
              VerifyMode mode) {
  return unitary_distance(sequence_unitary(seq, sys, true), target, mode);
}

std::string sequence_listing(const CompiledSequence& seq) {
  std::ostringstream os;
  os << "#   idx     t_start_s  element\n";
  char buf[160];
  double t = 0.0;
  std::size_t idx = 0;
  for (const auto& el : seq.elements()) {
    if (const auto* p = std::get_if<SeqPulse>(&el)) {
      std::snprintf(buf, sizeof buf,
                    "%6zu  %12.9f  pulse  spin %d  %8.3f deg  phase %8.3f  shape %s  pw %.9f\n",
                    idx, t, p->spin, p->angle_deg, p->phase_deg, p->shape.c_str(), p->duration_s);
      t += p->duration_s;
    } else if (const auto* d = std::get_if<SeqDelay>(&el)) {
      std::snprintf(buf, sizeof buf, "%6zu  %12.9f  delay  %.9f s\n", idx, t, d->seconds);
      t += d->seconds;
    } else {
      const auto& f = std::get<SeqFrameShift>(el);
      std::snprintf(buf, sizeof buf, "%6zu  %12.9f  frame  spin %d  %8.3f deg\n", idx, t, f.spin,
                    f.degrees);
    }
    os << buf;
    ++idx;
  }
  os << "final frames [deg]:";
  for (int s = 1; s <= seq.n(); ++s) {
    std::snprintf(buf, sizeof buf, "  %d: %.3f", s, seq.frame_phase_deg(s));
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "\ntotal time: %.9f s\n", seq.time_cursor_s());
  os << buf;
  return os.str();
}

}  // namespace nmr
