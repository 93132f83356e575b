#pragma once

#include <string>
#include <vector>

#include "nmr/cmat.hpp"

namespace nmr {

// Spin-1/2 system in the rotating frame. Spin indices are 1-based throughout
// the public API; spin 1 occupies the most significant bit of basis indices.
struct SpinSystem {
  enum class Medium { isotropic, liquid_crystal };

  int n = 0;
  std::vector<double> offset_hz;               // per-spin resonance offset
  std::vector<std::vector<double>> j_hz;       // symmetric, zero diagonal
  std::vector<std::vector<double>> dipolar_hz; // optional; liquid_crystal only
  std::vector<double> t1_s, t2_s;              // optional, both or neither
  std::vector<double> t2_sys_s;                // inhomogeneous broadening; <=0 entry = none
  std::vector<double> polarization;            // equilibrium polarization per spin
  Medium medium = Medium::isotropic;
  std::string name;

  static SpinSystem homonuclear(int n, std::vector<double> offsets,
                                std::vector<std::vector<double>> j);

  std::size_t dim() const { return std::size_t(1) << n; }
  // Effective secular coupling; liquid crystal media add 2D to J.
  double coupling_hz(int i, int j) const;
  double max_abs_coupling() const;
  void validate() const;  // throws std::invalid_argument
};

// Basis-index helpers for the spin-1-is-MSB convention.
inline int spin_bit(int n, int spin) { return n - spin; }
inline int spin_value(std::size_t index, int n, int spin) {
  return static_cast<int>((index >> spin_bit(n, spin)) & 1u);
}

// 2x2 Pauli matrix for letter in {I, X, Y, Z}.
CMat pauli(char letter);

// Weighted tensor product of Pauli matrices, letters[0] acting on spin 1.
struct ProductOperatorTerm {
  std::string letters;
  double weight = 1.0;
  CMat matrix() const;
};

// Expands product-operator terms over n spins; throws on bad letters/length.
CMat product_operator(const std::vector<ProductOperatorTerm>& terms, int n);

struct DensityMatrix {
  CMat m;
  bool normalized = true;  // false: traceless deviation part, relative scale
  // Hermiticity within herm_tol always; unit trace and eigenvalue floor
  // apply to normalized states only. Throws std::invalid_argument.
  void check(double herm_tol = 1e-12, double trace_tol = 1e-12, double eig_floor = -1e-10) const;
};

struct Operator {
  enum class Kind { unitary, hermitian, general };
  Kind kind = Kind::general;
  CMat m;
  void check(double unitary_tol = 1e-10, double herm_tol = 1e-12) const;
};

// Internal Hamiltonian in angular units (rad/s), diagonal in the Zeeman basis:
// H = -sum_i w_i Iz_i + sum_{i<j} 2 pi J'_ij Iz_i Iz_j with w_i = 2 pi f_i.
// with_offsets=false drops the Zeeman part (multi-channel per-spin frames).
std::vector<double> hamiltonian_diag(const SpinSystem& sys, bool with_offsets = true);
CMat build_hamiltonian(const SpinSystem& sys, bool with_offsets = true);

// U(t) = exp(-i H t); t may be negative. Diagonal, computed in closed form.
CMat free_evolution(const SpinSystem& sys, double t, bool with_offsets = true);

// Embeds an operator acting on the listed spins (in that order) into the
// full 2^n space; remaining spins are untouched.
CMat embed(const CMat& op, const std::vector<int>& spins, int n);

// U rho U^dag.
DensityMatrix apply_unitary(const CMat& u, const DensityMatrix& rho);

// In-place fast paths used by channels and sequence simulation.
void apply_single_qubit(CMat& rho, int spin, const CMat& u2, int n);
void apply_single_qubit_kraus(CMat& rho, int spin, const std::vector<CMat>& kraus, int n);
void apply_diagonal_phases(CMat& rho, const std::vector<double>& phase_rad);

}  // namespace nmr
