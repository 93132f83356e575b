#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nmr/gates.hpp"
#include "nmr/spin_system.hpp"

namespace nmr {

struct PrepExperiment {
  Circuit circuit;
  double weight = 1.0;
};

struct PrepPlan {
  std::vector<PrepExperiment> experiments;
  // Deviation diagonal the summed plan must produce, up to one common scale.
  std::vector<double> expected_signature;
};

enum class ThermalMode { deviation, boltzmann };

// deviation: sum of per-spin Z terms weighted by polarization ratio (traceless).
// boltzmann: normalized product state diag(p_i, 1-p_i) with p_i = 1/2 + eps*ratio_i/2.
CMat thermal_state(const SpinSystem& sys, ThermalMode mode, double epsilon = 1e-3);

// Runs every experiment of the plan on the given initial state and returns
// the weighted sum of the resulting deviation matrices.
CMat run_prep_plan(const PrepPlan& plan, const SpinSystem& sys, const CMat& rho0);

// 2^n - 1 experiments applying powers of one population cycle (a linear map
// of maximal order on the nonzero index vectors).
PrepPlan temporal_cyclic(int n);

// CNOT/NOT circuits whose transformed Z terms sum to the effective-pure
// signature with equal weight; near-minimal experiment count. Heteronuclear
// systems need per-spin polarization ratios (aligned with spin index); the
// summed signature then reports the residual non-uniformity instead of the
// equal-weight ideal.
PrepPlan temporal_product_operator(int n, bool homonuclear = true,
                                   const std::vector<double>& ratios = {});

// The nine-experiment five-spin plan used by the order-finding runs.
PrepPlan temporal_product_operator_order5();

// One dressing pass over the nine five-spin experiments when they run inside
// the seven-spin register: `prefix` is prepended to every circuit and the
// masks select, per experiment (bit e = experiment e), a 180-degree flip of
// spin 6 or spin 7 after the circuit.
struct CarbonDressing {
  Circuit prefix;
  std::uint32_t not6_mask = 0;
  std::uint32_t not7_mask = 0;
};

// Dressing passes that spread the two dilute spins' Z terms into the product
// cover and cancel their bare terms pass-against-pass.
std::vector<CarbonDressing> default_carbon_dressing();

// Seven-spin two-stage plan: every pass replays the nine five-spin
// experiments under its dressing. Tracing out spins 6 and 7 from the summed
// result leaves the five-spin effective-pure signature.
PrepPlan temporal_average_7(const std::vector<CarbonDressing>& passes = default_carbon_dressing());

struct LogicalSubspace {
  int label_spin = 1;
  int label_value = 0;  // the subspace conditions on this label state
};

// Simultaneous CNOTs from spins 2 and 3 onto spin 1; the spin-1 |0> block of
// the permuted thermal state carries the effective-pure signature.
std::pair<Circuit, LogicalSubspace> logical_label_3();

// log2(1 + C(n, n/2)) usable qubits for logical labeling on n spins (n even).
double logical_label_subspace_qubits(int n);

// Per-computation-spin frame offsets (Hz) cancelling the label spin's
// couplings inside the label-|0> block; no pulses required.
std::vector<double> uncoupling_frame(const SpinSystem& sys, int label_spin,
                                     const std::vector<int>& computation_spins);

// Zeroes off-diagonal entries; optionally keeps zero-quantum coherences
// (entries connecting states of equal bit weight).
CMat gradient_crush(const CMat& rho, bool preserve_zero_quantum = false);

// One boosting round on three equally polarized spins: returns the circuit
// and the predicted deviation diagonal (up to scale).
std::pair<Circuit, std::vector<double>> schulman_vazirani_boost();

enum class PrepMethod { loglab, cyclic, prodop };

struct SnrInfo {
  double relative_snr = 0.0;
  int experiments = 1;
};

SnrInfo snr_scaling(PrepMethod method, int n);

// Plan serialization: circuits in the sequence-compiler text format plus a
// weight line per experiment.
std::string plan_to_text(const PrepPlan& plan);
PrepPlan parse_plan(const std::string& text);

}  // namespace nmr
