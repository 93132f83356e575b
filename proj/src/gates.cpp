#include "nmr/gates.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nmr {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

Gate make(Gate::Kind k, std::vector<int> spins, double deg = 0.0) {
  Gate g;
  g.kind = k;
  g.spins = std::move(spins);
  g.angle_deg = deg;
  return g;
}

}  // namespace

Gate Gate::rx(int s, double deg) { return make(Kind::rx, {s}, deg); }
Gate Gate::ry(int s, double deg) { return make(Kind::ry, {s}, deg); }
Gate Gate::rz(int s, double deg) { return make(Kind::rz, {s}, deg); }
Gate Gate::hadamard(int s) { return make(Kind::hadamard, {s}); }
Gate Gate::not_(int s) { return make(Kind::not_, {s}); }
Gate Gate::cnot(int c, int t) { return make(Kind::cnot, {c, t}); }
Gate Gate::cz(int c, int t, double deg) { return make(Kind::cz, {c, t}, deg); }
Gate Gate::cphase(int c, int t, double deg) { return make(Kind::cphase, {c, t}, deg); }
Gate Gate::toffoli(int c1, int c2, int t) { return make(Kind::toffoli, {c1, c2, t}); }
Gate Gate::fredkin(int c, int a, int b) { return make(Kind::fredkin, {c, a, b}); }

Gate Gate::oracle(std::string name, std::vector<int> spins, CMat matrix) {
  Gate g = make(Kind::oracle, std::move(spins));
  g.name = std::move(name);
  g.matrix = std::move(matrix);
  return g;
}

Gate Gate::delay(double seconds) {
  Gate g = make(Kind::delay, {});
  g.seconds = seconds;
  return g;
}

Gate Gate::gphase(double deg) { return make(Kind::gphase, {}, deg); }

void Gate::validate(int n) const {
  static const std::size_t arity[] = {1, 1, 1, 1, 1, 2, 2, 2, 3, 3, 0, 0, 0};
  const std::size_t idx = static_cast<std::size_t>(kind);
  if (kind != Kind::oracle && spins.size() != arity[idx])
    throw std::invalid_argument("gate has wrong number of spins");
  if (kind == Kind::oracle) {
    if (spins.empty()) throw std::invalid_argument("oracle gate needs target spins");
    const std::size_t d = std::size_t(1) << spins.size();
    if (matrix.rows() != d || matrix.cols() != d)
      throw std::invalid_argument("oracle matrix size does not match its spin list");
  }
  for (std::size_t i = 0; i < spins.size(); ++i) {
    if (spins[i] < 1 || spins[i] > n) throw std::invalid_argument("gate spin index out of range");
    for (std::size_t j = i + 1; j < spins.size(); ++j)
      if (spins[i] == spins[j]) throw std::invalid_argument("gate spin indices must be distinct");
  }
  if (kind == Kind::delay && seconds < 0.0)
    throw std::invalid_argument("delay must be non-negative");
}

CMat rot_x(double deg) {
  const double h = 0.5 * deg * kDegToRad;
  CMat m(2, 2);
  m(0, 0) = std::cos(h);
  m(0, 1) = cd(0.0, -std::sin(h));
  m(1, 0) = cd(0.0, -std::sin(h));
  m(1, 1) = std::cos(h);
  return m;
}

CMat rot_y(double deg) {
  const double h = 0.5 * deg * kDegToRad;
  CMat m(2, 2);
  m(0, 0) = std::cos(h);
  m(0, 1) = -std::sin(h);
  m(1, 0) = std::sin(h);
  m(1, 1) = std::cos(h);
  return m;
}

CMat rot_z(double deg) {
  const double h = 0.5 * deg * kDegToRad;
  CMat m(2, 2);
  m(0, 0) = std::polar(1.0, -h);
  m(1, 1) = std::polar(1.0, h);
  return m;
}

CMat rot_phase(double angle_deg, double phase_deg) {
  // R_phi(theta) = Rz(phi) Rx(theta) Rz(-phi): axis (cos phi, sin phi, 0).
  const double h = 0.5 * angle_deg * kDegToRad;
  const double phi = phase_deg * kDegToRad;
  CMat m(2, 2);
  m(0, 0) = std::cos(h);
  m(0, 1) = cd(0.0, -1.0) * std::sin(h) * std::polar(1.0, -phi);
  m(1, 0) = cd(0.0, -1.0) * std::sin(h) * std::polar(1.0, phi);
  m(1, 1) = std::cos(h);
  return m;
}

namespace {

CMat hadamard2() {
  const double r = 1.0 / std::sqrt(2.0);
  CMat m(2, 2);
  m(0, 0) = r;
  m(0, 1) = r;
  m(1, 0) = r;
  m(1, 1) = -r;
  return m;
}

// Small unitary on the gate's own spins (controls first). Oracle returns its
// stored matrix; delay and gphase have no small form.
CMat gate_matrix_small(const Gate& g) {
  switch (g.kind) {
    case Gate::Kind::rx: return rot_x(g.angle_deg);
    case Gate::Kind::ry: return rot_y(g.angle_deg);
    case Gate::Kind::rz: return rot_z(g.angle_deg);
    case Gate::Kind::hadamard: return hadamard2();
    case Gate::Kind::not_: return pauli('X');
    case Gate::Kind::cnot: {
      CMat m(4, 4);
      m(0, 0) = 1.0;
      m(1, 1) = 1.0;
      m(2, 3) = 1.0;
      m(3, 2) = 1.0;
      return m;
    }
    case Gate::Kind::cz: {
      CMat m = CMat::identity(4);
      const double h = 0.5 * g.angle_deg * kDegToRad;
      m(2, 2) = std::polar(1.0, -h);
      m(3, 3) = std::polar(1.0, h);
      return m;
    }
    case Gate::Kind::cphase: {
      CMat m = CMat::identity(4);
      m(3, 3) = std::polar(1.0, g.angle_deg * kDegToRad);
      return m;
    }
    case Gate::Kind::toffoli: {
      CMat m = CMat::identity(8);
      m(6, 6) = 0.0;
      m(7, 7) = 0.0;
      m(6, 7) = 1.0;
      m(7, 6) = 1.0;
      return m;
    }
    case Gate::Kind::fredkin: {
      CMat m = CMat::identity(8);
      m(5, 5) = 0.0;
      m(6, 6) = 0.0;
      m(5, 6) = 1.0;
      m(6, 5) = 1.0;
      return m;
    }
    case Gate::Kind::oracle: return g.matrix;
    default: throw std::logic_error("gate has no small matrix form");
  }
}

}  // namespace

CMat gate_unitary(const Gate& g, int n, const SpinSystem* sys) {
  g.validate(n);
  const std::size_t dim = std::size_t(1) << n;
  if (g.kind == Gate::Kind::gphase) {
    CMat m = CMat::identity(dim);
    m *= std::polar(1.0, g.angle_deg * kDegToRad);
    return m;
  }
  if (g.kind == Gate::Kind::delay) {
    if (sys == nullptr) throw std::invalid_argument("delay gate requires a spin system");
    return free_evolution(*sys, g.seconds, /*with_offsets=*/false);
  }
  return embed(gate_matrix_small(g), g.spins, n);
}

CMat circuit_unitary(const Circuit& c, int n, const SpinSystem* sys) {
  CMat u = CMat::identity(std::size_t(1) << n);
  for (const Gate& g : c) u = gate_unitary(g, n, sys) * u;
  return u;
}

namespace {

// Applies g (or its complex conjugate) to a strided vector in place.
void apply_gate_strided(cd* base, std::size_t stride, int n, const Gate& g, const SpinSystem* sys,
                        bool conj) {
  const std::size_t dim = std::size_t(1) << n;
  auto at = [&](std::size_t i) -> cd& { return base[i * stride]; };
  const double sgn = conj ? -1.0 : 1.0;

  switch (g.kind) {
    case Gate::Kind::rx:
    case Gate::Kind::ry:
    case Gate::Kind::rz:
    case Gate::Kind::hadamard:
    case Gate::Kind::not_: {
      CMat u = gate_matrix_small(g);
      if (conj) u = u.conjugate();
      const std::size_t bit = std::size_t(1) << spin_bit(n, g.spins[0]);
      for (std::size_t i = 0; i < dim; ++i) {
        if (i & bit) continue;
        const cd a = at(i), b = at(i | bit);
        at(i) = u(0, 0) * a + u(0, 1) * b;
        at(i | bit) = u(1, 0) * a + u(1, 1) * b;
      }
      break;
    }
    case Gate::Kind::cnot: {
      const std::size_t cb = std::size_t(1) << spin_bit(n, g.spins[0]);
      const std::size_t tb = std::size_t(1) << spin_bit(n, g.spins[1]);
      for (std::size_t i = 0; i < dim; ++i)
        if ((i & cb) && !(i & tb)) std::swap(at(i), at(i | tb));
      break;
    }
    case Gate::Kind::cz: {
      const std::size_t cb = std::size_t(1) << spin_bit(n, g.spins[0]);
      const std::size_t tb = std::size_t(1) << spin_bit(n, g.spins[1]);
      const double h = 0.5 * g.angle_deg * kDegToRad * sgn;
      for (std::size_t i = 0; i < dim; ++i)
        if (i & cb) at(i) *= std::polar(1.0, (i & tb) ? h : -h);
      break;
    }
    case Gate::Kind::cphase: {
      const std::size_t cb = std::size_t(1) << spin_bit(n, g.spins[0]);
      const std::size_t tb = std::size_t(1) << spin_bit(n, g.spins[1]);
      const cd ph = std::polar(1.0, g.angle_deg * kDegToRad * sgn);
      for (std::size_t i = 0; i < dim; ++i)
        if ((i & cb) && (i & tb)) at(i) *= ph;
      break;
    }
    case Gate::Kind::toffoli: {
      const std::size_t c1 = std::size_t(1) << spin_bit(n, g.spins[0]);
      const std::size_t c2 = std::size_t(1) << spin_bit(n, g.spins[1]);
      const std::size_t tb = std::size_t(1) << spin_bit(n, g.spins[2]);
      for (std::size_t i = 0; i < dim; ++i)
        if ((i & c1) && (i & c2) && !(i & tb)) std::swap(at(i), at(i | tb));
      break;
    }
    case Gate::Kind::fredkin: {
      const std::size_t cb = std::size_t(1) << spin_bit(n, g.spins[0]);
      const std::size_t ab = std::size_t(1) << spin_bit(n, g.spins[1]);
      const std::size_t bb = std::size_t(1) << spin_bit(n, g.spins[2]);
      for (std::size_t i = 0; i < dim; ++i)
        if ((i & cb) && (i & ab) && !(i & bb)) std::swap(at(i), at((i & ~ab) | bb));
      break;
    }
    case Gate::Kind::delay: {
      if (sys == nullptr) throw std::invalid_argument("delay gate requires a spin system");
      const std::vector<double> h = hamiltonian_diag(*sys, /*with_offsets=*/false);
      for (std::size_t i = 0; i < dim; ++i) at(i) *= std::polar(1.0, -h[i] * g.seconds * sgn);
      break;
    }
    case Gate::Kind::gphase: {
      const cd ph = std::polar(1.0, g.angle_deg * kDegToRad * sgn);
      for (std::size_t i = 0; i < dim; ++i) at(i) *= ph;
      break;
    }
    case Gate::Kind::oracle: {
      const int k = static_cast<int>(g.spins.size());
      const std::size_t dk = std::size_t(1) << k;
      CMat u = g.matrix;
      if (conj) u = u.conjugate();
      std::vector<std::size_t> bits(k);
      for (int i = 0; i < k; ++i) bits[i] = std::size_t(1) << spin_bit(n, g.spins[i]);
      std::size_t targets_mask = 0;
      for (std::size_t b : bits) targets_mask |= b;
      std::vector<cd> sub(dk), out(dk);
      for (std::size_t blk = 0; blk < dim; ++blk) {
        if (blk & targets_mask) continue;
        for (std::size_t s = 0; s < dk; ++s) {
          std::size_t idx = blk;
          for (int i = 0; i < k; ++i)
            if ((s >> (k - 1 - i)) & 1u) idx |= bits[i];
          sub[s] = at(idx);
        }
        for (std::size_t r = 0; r < dk; ++r) {
          cd acc = 0.0;
          for (std::size_t s = 0; s < dk; ++s) acc += u(r, s) * sub[s];
          out[r] = acc;
        }
        for (std::size_t s = 0; s < dk; ++s) {
          std::size_t idx = blk;
          for (int i = 0; i < k; ++i)
            if ((s >> (k - 1 - i)) & 1u) idx |= bits[i];
          at(idx) = out[s];
        }
      }
      break;
    }
  }
}

}  // namespace

void apply_gate(std::vector<cd>& state, const Gate& g, int n, const SpinSystem* sys) {
  g.validate(n);
  if (state.size() != (std::size_t(1) << n)) throw std::invalid_argument("state size mismatch");
  apply_gate_strided(state.data(), 1, n, g, sys, false);
}

void apply_circuit(std::vector<cd>& state, const Circuit& c, int n, const SpinSystem* sys) {
  for (const Gate& g : c) apply_gate(state, g, n, sys);
}

void apply_gate_density(CMat& rho, const Gate& g, int n, const SpinSystem* sys) {
  g.validate(n);
  const std::size_t dim = std::size_t(1) << n;
  if (rho.rows() != dim || rho.cols() != dim) throw std::invalid_argument("density size mismatch");
  for (std::size_t c = 0; c < dim; ++c) apply_gate_strided(rho.data() + c, dim, n, g, sys, false);
  for (std::size_t r = 0; r < dim; ++r) apply_gate_strided(rho.data() + r * dim, 1, n, g, sys, true);
}

void apply_circuit_density(CMat& rho, const Circuit& c, int n, const SpinSystem* sys) {
  for (const Gate& g : c) apply_gate_density(rho, g, n, sys);
}

std::string circuit_to_text(const Circuit& c) {
  std::ostringstream os;
  os.precision(12);
  for (const Gate& g : c) {
    switch (g.kind) {
      case Gate::Kind::rx: os << "RX " << g.spins[0] << " " << g.angle_deg; break;
      case Gate::Kind::ry: os << "RY " << g.spins[0] << " " << g.angle_deg; break;
      case Gate::Kind::rz: os << "RZ " << g.spins[0] << " " << g.angle_deg; break;
      case Gate::Kind::hadamard: os << "H " << g.spins[0]; break;
      case Gate::Kind::not_: os << "NOT " << g.spins[0]; break;
      case Gate::Kind::cnot: os << "CNOT " << g.spins[0] << " " << g.spins[1]; break;
      case Gate::Kind::cz:
        os << "CZ " << g.spins[0] << " " << g.spins[1] << " " << g.angle_deg;
        break;
      case Gate::Kind::cphase:
        os << "CPHASE " << g.spins[0] << " " << g.spins[1] << " " << g.angle_deg;
        break;
      case Gate::Kind::toffoli:
        os << "TOFFOLI " << g.spins[0] << " " << g.spins[1] << " " << g.spins[2];
        break;
      case Gate::Kind::fredkin:
        os << "FREDKIN " << g.spins[0] << " " << g.spins[1] << " " << g.spins[2];
        break;
      case Gate::Kind::delay: os << "DELAY " << g.seconds; break;
      case Gate::Kind::gphase: os << "GPHASE " << g.angle_deg; break;
      case Gate::Kind::oracle:
        throw std::invalid_argument("oracle gates are not representable in circuit text");
    }
    os << "\n";
  }
  return os.str();
}

Circuit parse_circuit(const std::string& text) {
  Circuit c;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string op;
    if (!(ls >> op)) continue;
    auto want_int = [&](const char* what) {
      int v;
      if (!(ls >> v))
        throw std::invalid_argument("circuit line " + std::to_string(lineno) + ": expected " + what);
      return v;
    };
    auto want_double = [&](const char* what) {
      double v;
      if (!(ls >> v))
        throw std::invalid_argument("circuit line " + std::to_string(lineno) + ": expected " + what);
      return v;
    };
    if (op == "RX") { int s = want_int("spin"); c.push_back(Gate::rx(s, want_double("angle"))); }
    else if (op == "RY") { int s = want_int("spin"); c.push_back(Gate::ry(s, want_double("angle"))); }
    else if (op == "RZ") { int s = want_int("spin"); c.push_back(Gate::rz(s, want_double("angle"))); }
    else if (op == "H") { c.push_back(Gate::hadamard(want_int("spin"))); }
    else if (op == "NOT") { c.push_back(Gate::not_(want_int("spin"))); }
    else if (op == "CNOT") { int a = want_int("control"); c.push_back(Gate::cnot(a, want_int("target"))); }
    else if (op == "CZ") {
      int a = want_int("control"), t = want_int("target");
      double deg = 90.0;
      ls >> deg;
      c.push_back(Gate::cz(a, t, deg));
    } else if (op == "CPHASE") {
      int a = want_int("control"), t = want_int("target");
      c.push_back(Gate::cphase(a, t, want_double("angle")));
    } else if (op == "TOFFOLI") {
      int a = want_int("control"), b = want_int("control"), t = want_int("target");
      c.push_back(Gate::toffoli(a, b, t));
    } else if (op == "FREDKIN") {
      int a = want_int("control"), x = want_int("target"), y = want_int("target");
      c.push_back(Gate::fredkin(a, x, y));
    } else if (op == "DELAY") {
      c.push_back(Gate::delay(want_double("seconds")));
    } else if (op == "GPHASE") {
      c.push_back(Gate::gphase(want_double("angle")));
    } else {
      throw std::invalid_argument("circuit line " + std::to_string(lineno) + ": unknown op " + op);
    }
  }
  return c;
}

}  // namespace nmr
