#pragma once

#include <array>
#include <string>
#include <vector>

#include "nmr/gates.hpp"
#include "nmr/spin_system.hpp"

namespace nmr {

// ---- Deutsch-Jozsa (2 qubits: input spin 1, work spin 2) ----

struct DeutschJozsaCase {
  int f_index = 1;          // 1..4
  Circuit circuit;          // full algorithm including the oracle
  Circuit oracle;           // the oracle alone
  bool constant = false;    // expected classification
  int expected_o1 = +1;     // +1 constant, -1 balanced
};

DeutschJozsaCase deutsch_jozsa_circuit(int f_index);

// ---- Grover ----

// n qubits, marked element x0, k iterations. n <= 3 uses explicit standard
// gates; n == 4 tags the phase flips as oracle composites.
Circuit grover_circuit(int n, int x0, int iterations);
double grover_amplitude(int n, int k);  // sin^2((2k+1) asin(1/sqrt(2^n)))

// ---- QFT ----

// Hadamard + controlled-phase ladder; output in bit-reversed order
// (spin 1 carries the least significant output bit).
Circuit qft_circuit(int n);
// The transform the circuit realizes after undoing bit reversal:
// F[x][y] = exp(-2 pi i x y / N) / sqrt(N).
CMat dft_matrix(int n);
CMat bit_reversal_matrix(int n);

// ---- Order finding (M = 4: three register spins 1-3, targets 4-5) ----

struct Permutation {
  std::vector<int> map;  // size M, bijective
  int size() const { return static_cast<int>(map.size()); }
  int order_at(int y) const;
  Permutation power(int k) const;
  void validate() const;
};

// The four permutations the order-finding runs use, giving r = 1, 2, 3, 4 at
// the stated starting element.
struct OrderFindingSetup {
  Permutation pi;
  int y = 0;
  int r = 1;
};
OrderFindingSetup order_finding_case(int r);

struct OrderFindingCircuit {
  Circuit circuit;
  std::array<double, 5> expected_obs{};  // O_1..O_5 on the ideal run
  int r = 1;
};

OrderFindingCircuit order_finding_circuit(const Permutation& pi, int y);

// ---- Shor-15 (seven spins: register 1-3, target 4-7) ----

enum class ShorVariant { easy, difficult };

struct Shor15Circuit {
  int a = 7;
  ShorVariant variant = ShorVariant::difficult;
  Circuit circuit;                 // simplified circuit actually run
  Circuit reference_circuit;       // unsimplified modular-exponentiation reference
  std::vector<int> register_support;  // ideal register values with nonzero weight
  int r = 1;
  std::pair<int, int> factors{1, 15};
};

Shor15Circuit shor15_circuit(int a);
int modexp_order(int a, int modulus);  // least r > 0 with a^r = 1 mod modulus

// Register value encoded by spins 1-3 after the final QFT (spin 3 is the
// most significant bit). Returns the probability of each value 0..7.
std::vector<double> shor_register_distribution(const CMat& rho);

// ---- Two-qubit phase-error detection code ----

struct TwoBitCodeResult {
  double accept_probability = 1.0;
  double undetected_probability = 0.0;  // exactly p^2
  CMat accepted_state;                  // conditional data-qubit state (2x2)
  double conditional_fidelity = 1.0;    // vs the ideal input
  std::array<double, 3> accepted_bloch{};
};

Circuit two_bit_code_encode();
Circuit two_bit_code_decode();

// Prepares cos(t/2)|0> + sin(t/2)|1>, encodes, applies independent phase
// flips of probability p on both qubits, decodes, postselects ancilla |0>.
TwoBitCodeResult two_bit_code_run(double theta_deg, double p);

// Same storage without coding: one qubit under the same phase-flip channel.
TwoBitCodeResult two_bit_code_unprotected(double theta_deg, double p);

// Phase-flip probability after storing for t in a T2 environment.
double phase_flip_probability(double t_s, double t2_s);

}  // namespace nmr
