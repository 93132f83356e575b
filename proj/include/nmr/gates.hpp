#pragma once

#include <string>
#include <vector>

#include "nmr/spin_system.hpp"

namespace nmr {

// Gate-level IR. Rotations follow R(theta) = exp(-i * theta * n.sigma / 2);
// not_/cnot/toffoli/fredkin are the exact permutation matrices; cz is a
// z rotation of the target conditioned on the control being |1>; cphase puts
// e^{i theta} on |11>. delay evolves under couplings only (each spin sits in
// its own rotating frame); gphase is a global phase used to keep circuit
// unitaries exactly equal to their textbook forms.
struct Gate {
  enum class Kind {
    rx, ry, rz, hadamard, not_, cnot, cz, cphase, toffoli, fredkin, oracle, delay, gphase
  };

  Kind kind = Kind::rx;
  std::vector<int> spins;  // 1-based; order: controls first, then targets
  double angle_deg = 0.0;
  double seconds = 0.0;    // delay only
  std::string name;        // oracle label
  CMat matrix;             // oracle unitary over `spins` in listed order

  static Gate rx(int s, double deg);
  static Gate ry(int s, double deg);
  static Gate rz(int s, double deg);
  static Gate hadamard(int s);
  static Gate not_(int s);
  static Gate cnot(int c, int t);
  static Gate cz(int c, int t, double deg = 90.0);
  static Gate cphase(int c, int t, double deg);
  static Gate toffoli(int c1, int c2, int t);
  static Gate fredkin(int c, int a, int b);
  static Gate oracle(std::string name, std::vector<int> spins, CMat matrix);
  static Gate delay(double seconds);
  static Gate gphase(double deg);

  void validate(int n) const;  // throws std::invalid_argument
};

using Circuit = std::vector<Gate>;

// 2x2 rotation helpers shared with the pulse engine.
CMat rot_x(double deg);
CMat rot_y(double deg);
CMat rot_z(double deg);
// Rotation about an axis in the xy plane at `phase_deg` from +x.
CMat rot_phase(double angle_deg, double phase_deg);

// Unitary of one gate embedded into the full space. `sys` is required only
// for delay gates (coupling evolution); pass nullptr otherwise.
CMat gate_unitary(const Gate& g, int n, const SpinSystem* sys = nullptr);

// Product over the circuit, applied left to right in time.
CMat circuit_unitary(const Circuit& c, int n, const SpinSystem* sys = nullptr);

// Fast in-place application to a state vector / density matrix.
void apply_gate(std::vector<cd>& state, const Gate& g, int n, const SpinSystem* sys = nullptr);
void apply_circuit(std::vector<cd>& state, const Circuit& c, int n, const SpinSystem* sys = nullptr);
void apply_gate_density(CMat& rho, const Gate& g, int n, const SpinSystem* sys = nullptr);
void apply_circuit_density(CMat& rho, const Circuit& c, int n, const SpinSystem* sys = nullptr);

// Plain-text circuit listing, one gate per line (e.g. "CNOT 1 2", "RX 3 90",
// "DELAY 0.0023"). Parsing accepts '#' comments and blank lines.
std::string circuit_to_text(const Circuit& c);
Circuit parse_circuit(const std::string& text);

}  // namespace nmr
