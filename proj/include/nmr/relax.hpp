#pragma once

#include <vector>

#include "nmr/spin_system.hpp"

namespace nmr {

struct RelaxationParams {
  std::vector<double> t1_s;
  std::vector<double> t2_s;
  std::vector<double> p_eq;      // equilibrium ground-state probability per spin
  std::vector<double> t2_sys_s;  // inhomogeneous contribution; <=0 means none

  // p_i = 1/2 + epsilon*ratio_i/2, the high-temperature equilibrium.
  static RelaxationParams from_system(const SpinSystem& sys, double epsilon = 1e-3);
  void validate(int n) const;
  // 1/T2* = 1/T2 + 1/T2_sys (readout linewidth only, never a channel).
  double t2_star_s(int spin) const;
};

// Generalized amplitude damping on one spin for duration t toward diag(p, 1-p).
CMat gad_channel(const CMat& rho, int spin, double t_s, double t1_s, double p);

// Phase damping on one spin: off-diagonals scaled by exp(-t/T2).
CMat pd_channel(const CMat& rho, int spin, double t_s, double t2_s);

// GAD on every spin in index order, then PD on every spin.
CMat decohere_interval(const CMat& rho, const SpinSystem& sys, const RelaxationParams& params,
                       double t_s);

enum class RelaxationKind { inversion_recovery, cpmg };

struct RelaxationPoint {
  double t_s = 0.0;
  double signal = 0.0;
};

// Simulated single-spin peak-height curves using the channels above:
// inversion recovery S = S0(1 - 2 exp(-t/T1)); CPMG echo train amplitude.
std::vector<RelaxationPoint> relaxation_experiment(RelaxationKind kind,
                                                   const RelaxationParams& params, int spin,
                                                   const std::vector<double>& times_s);

}  // namespace nmr
