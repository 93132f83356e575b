#include "nmr/relax.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "nmr/gates.hpp"

namespace nmr {
namespace {

int spin_count_for(const CMat& rho) {
  if (!rho.square()) throw std::invalid_argument("state matrix must be square");
  int n = 0;
  while ((std::size_t(1) << n) < rho.rows()) ++n;
  if ((std::size_t(1) << n) != rho.rows())
    throw std::invalid_argument("state dimension must be a power of two");
  return n;
}

std::vector<CMat> gad_kraus(double gamma, double p) {
  const double s = std::sqrt(1.0 - gamma), g = std::sqrt(gamma);
  const double sp = std::sqrt(p), sq = std::sqrt(1.0 - p);
  CMat e0(2, 2), e1(2, 2), e2(2, 2), e3(2, 2);
  e0(0, 0) = sp;
  e0(1, 1) = sp * s;
  e1(0, 1) = sp * g;
  e2(0, 0) = sq * s;
  e2(1, 1) = sq;
  e3(1, 0) = sq * g;
  return {e0, e1, e2, e3};
}

// Phase damping applied elementwise: the two-operator form reduces to
// scaling exactly the elements whose target-spin bit differs across row and
// column, which keeps populations bitwise untouched.
void pd_apply(CMat& rho, int spin, double lambda, int n) {
  const double decay = std::exp(-lambda);
  const std::size_t bit = std::size_t(1) << spin_bit(n, spin);
  for (std::size_t r = 0; r < rho.rows(); ++r)
    for (std::size_t c = 0; c < rho.cols(); ++c)
      if (((r ^ c) & bit) != 0) rho(r, c) *= decay;
}

void check_duration(double t_s) {
  if (t_s < 0) throw std::invalid_argument("duration must be non-negative");
}

}  // namespace

RelaxationParams RelaxationParams::from_system(const SpinSystem& sys, double epsilon) {
  sys.validate();
  if (sys.t1_s.empty() || sys.t2_s.empty())
    throw std::invalid_argument("spin system carries no relaxation constants");
  RelaxationParams params;
  params.t1_s = sys.t1_s;
  params.t2_s = sys.t2_s;
  params.t2_sys_s = sys.t2_sys_s;
  for (int i = 0; i < sys.n; ++i)
    params.p_eq.push_back(0.5 + 0.5 * epsilon * sys.polarization[std::size_t(i)]);
  params.validate(sys.n);
  return params;
}

void RelaxationParams::validate(int n) const {
  if (int(t1_s.size()) != n || int(t2_s.size()) != n || int(p_eq.size()) != n)
    throw std::invalid_argument("relaxation parameter lists must cover every spin");
  if (!t2_sys_s.empty() && int(t2_sys_s.size()) != n)
    throw std::invalid_argument("T2_sys list must cover every spin when present");
  for (int i = 0; i < n; ++i) {
    if (!(t1_s[std::size_t(i)] > 0) || !(t2_s[std::size_t(i)] > 0))
      throw std::invalid_argument("relaxation constants must be positive");
    if (p_eq[std::size_t(i)] < 0 || p_eq[std::size_t(i)] > 1)
      throw std::invalid_argument("equilibrium probability must lie in [0, 1]");
  }
}

double RelaxationParams::t2_star_s(int spin) const {
  if (spin < 1 || spin > int(t2_s.size()))
    throw std::invalid_argument("spin index out of range");
  const double t2 = t2_s[std::size_t(spin) - 1];
  const double sys = t2_sys_s.empty() ? 0.0 : t2_sys_s[std::size_t(spin) - 1];
  if (sys <= 0) return t2;
  return 1.0 / (1.0 / t2 + 1.0 / sys);
}

CMat gad_channel(const CMat& rho, int spin, double t_s, double t1_s, double p) {
  check_duration(t_s);
  if (!(t1_s > 0)) throw std::invalid_argument("T1 must be positive");
  if (p < 0 || p > 1)
    throw std::invalid_argument("equilibrium probability must lie in [0, 1]");
  const int n = spin_count_for(rho);
  if (spin < 1 || spin > n) throw std::invalid_argument("spin index out of range");
  CMat out = rho;
  apply_single_qubit_kraus(out, spin, gad_kraus(1.0 - std::exp(-t_s / t1_s), p), n);
  return out;
}

CMat pd_channel(const CMat& rho, int spin, double t_s, double t2_s) {
  check_duration(t_s);
  if (!(t2_s > 0)) throw std::invalid_argument("T2 must be positive");
  const int n = spin_count_for(rho);
  if (spin < 1 || spin > n) throw std::invalid_argument("spin index out of range");
  CMat out = rho;
  pd_apply(out, spin, t_s / t2_s, n);
  return out;
}

CMat decohere_interval(const CMat& rho, const SpinSystem& sys,
                       const RelaxationParams& params, double t_s) {
  check_duration(t_s);
  params.validate(sys.n);
  if (!rho.square() || rho.rows() != sys.dim())
    throw std::invalid_argument("state dimension must match the spin system");
  CMat out = rho;
  for (int s = 1; s <= sys.n; ++s)
    apply_single_qubit_kraus(
        out, s,
        gad_kraus(1.0 - std::exp(-t_s / params.t1_s[std::size_t(s) - 1]),
                  params.p_eq[std::size_t(s) - 1]),
        sys.n);
  for (int s = 1; s <= sys.n; ++s)
    pd_apply(out, s, t_s / params.t2_s[std::size_t(s) - 1], sys.n);
  return out;
}

std::vector<RelaxationPoint> relaxation_experiment(RelaxationKind kind,
                                                   const RelaxationParams& params, int spin,
                                                   const std::vector<double>& times_s) {
  if (times_s.empty()) throw std::invalid_argument("at least one time point is required");
  if (spin < 1 || spin > int(params.t1_s.size()))
    throw std::invalid_argument("spin index out of range");
  params.validate(int(params.t1_s.size()));
  const double t1 = params.t1_s[std::size_t(spin) - 1];
  const double t2 = params.t2_s[std::size_t(spin) - 1];
  const double p = params.p_eq[std::size_t(spin) - 1];

  const CMat x90 = rot_x(90.0), x180 = rot_x(180.0), y90 = rot_y(90.0);
  auto damp = [&](CMat& rho, double dt) {
    apply_single_qubit_kraus(rho, 1, gad_kraus(1.0 - std::exp(-dt / t1), p), 1);
    pd_apply(rho, 1, dt / t2, 1);
  };

  std::vector<RelaxationPoint> curve;
  for (double t : times_s) {
    check_duration(t);
    CMat rho(2, 2);
    rho(0, 0) = p;
    rho(1, 1) = 1.0 - p;
    double signal = 0.0;
    if (kind == RelaxationKind::inversion_recovery) {
      // X^2 - t - X - acquisition; positive absorptive lines point along -y,
      // so the peak height reads back the pre-pulse z magnetization.
      apply_single_qubit(rho, 1, x180, 1);
      damp(rho, t);
      apply_single_qubit(rho, 1, x90, 1);
      signal = -2.0 * std::imag(rho(1, 0));
    } else {
      // Y - (tau/4 X^2 tau/2 X^2 tau/4) - acquisition along +x.
      apply_single_qubit(rho, 1, y90, 1);
      damp(rho, t / 4);
      apply_single_qubit(rho, 1, x180, 1);
      damp(rho, t / 2);
      apply_single_qubit(rho, 1, x180, 1);
      damp(rho, t / 4);
      signal = 2.0 * std::real(rho(1, 0));
    }
    curve.push_back({t, signal});
  }
  return curve;
}

}  // namespace nmr
