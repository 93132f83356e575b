#include "nmr/spin_system.hpp"

#include <cmath>
#include <stdexcept>

#include "nmr/linalg.hpp"

namespace nmr {

SpinSystem SpinSystem::homonuclear(int n, std::vector<double> offsets,
                                   std::vector<std::vector<double>> j) {
  SpinSystem s;
  s.n = n;
  s.offset_hz = std::move(offsets);
  s.j_hz = std::move(j);
  s.polarization.assign(n, 1.0);
  s.validate();
  return s;
}

double SpinSystem::coupling_hz(int i, int j) const {
  if (i == j) return 0.0;
  double c = j_hz[i - 1][j - 1];
  if (medium == Medium::liquid_crystal && !dipolar_hz.empty())
    c += 2.0 * dipolar_hz[i - 1][j - 1];
  return c;
}

double SpinSystem::max_abs_coupling() const {
  double m = 0.0;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) m = std::max(m, std::abs(coupling_hz(i, j)));
  return m;
}

void SpinSystem::validate() const {
  if (n < 1 || n > 7) throw std::invalid_argument("spin count must be in [1, 7]");
  if (static_cast<int>(offset_hz.size()) != n)
    throw std::invalid_argument("offset list length must equal spin count");
  auto check_table = [&](const std::vector<std::vector<double>>& t, const char* what) {
    if (static_cast<int>(t.size()) != n) throw std::invalid_argument(std::string(what) + " must be n x n");
    for (int r = 0; r < n; ++r) {
      if (static_cast<int>(t[r].size()) != n)
        throw std::invalid_argument(std::string(what) + " must be n x n");
      if (t[r][r] != 0.0) throw std::invalid_argument(std::string(what) + " diagonal must be zero");
      for (int c = 0; c < n; ++c)
        if (t[r][c] != t[c][r]) throw std::invalid_argument(std::string(what) + " must be symmetric");
    }
  };
  check_table(j_hz, "coupling table");
  if (!dipolar_hz.empty()) check_table(dipolar_hz, "dipolar table");
  if (medium == Medium::liquid_crystal && dipolar_hz.empty())
    throw std::invalid_argument("liquid crystal medium requires a dipolar table");
  if (t1_s.empty() != t2_s.empty())
    throw std::invalid_argument("relaxation times must be given for both T1 and T2 or neither");
  if (!t1_s.empty()) {
    if (static_cast<int>(t1_s.size()) != n || static_cast<int>(t2_s.size()) != n)
      throw std::invalid_argument("relaxation time lists must have one entry per spin");
    for (int i = 0; i < n; ++i) {
      if (!(t2_s[i] > 0.0)) throw std::invalid_argument("T2 must be positive");
      if (!(t1_s[i] >= t2_s[i])) throw std::invalid_argument("T1 must be >= T2");
    }
  }
  if (!t2_sys_s.empty() && static_cast<int>(t2_sys_s.size()) != n)
    throw std::invalid_argument("T2_sys list length must equal spin count");
  if (static_cast<int>(polarization.size()) != n)
    throw std::invalid_argument("polarization list length must equal spin count");
  for (double p : polarization)
    if (!(p > 0.0)) throw std::invalid_argument("polarization ratios must be positive");
}

CMat pauli(char letter) {
  CMat m(2, 2);
  switch (letter) {
    case 'I': m(0, 0) = 1.0; m(1, 1) = 1.0; break;
    case 'X': m(0, 1) = 1.0; m(1, 0) = 1.0; break;
    case 'Y': m(0, 1) = cd(0.0, -1.0); m(1, 0) = cd(0.0, 1.0); break;
    case 'Z': m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    default: throw std::invalid_argument("pauli letter must be one of I, X, Y, Z");
  }
  return m;
}

CMat ProductOperatorTerm::matrix() const {
  if (letters.empty()) throw std::invalid_argument("product operator needs at least one letter");
  CMat m = pauli(letters[0]);
  for (std::size_t i = 1; i < letters.size(); ++i) m = kron(m, pauli(letters[i]));
  m *= cd(weight);
  return m;
}

CMat product_operator(const std::vector<ProductOperatorTerm>& terms, int n) {
  CMat sum(std::size_t(1) << n, std::size_t(1) << n);
  for (const auto& t : terms) {
    if (static_cast<int>(t.letters.size()) != n)
      throw std::invalid_argument("product operator term length must equal spin count");
    sum += t.matrix();
  }
  return sum;
}

void DensityMatrix::check(double herm_tol, double trace_tol, double eig_floor) const {
  if (!m.square()) throw std::invalid_argument("density matrix must be square");
  if (max_abs_diff(m, m.dagger()) > herm_tol)
    throw std::invalid_argument("density matrix is not Hermitian");
  if (normalized) {
    if (std::abs(m.trace() - cd(1.0)) > trace_tol)
      throw std::invalid_argument("normalized density matrix must have unit trace");
    const EigResult e = eig_hermitian(m);
    if (!e.values.empty() && e.values.front() < eig_floor)
      throw std::invalid_argument("density matrix has a negative eigenvalue");
  }
}

void Operator::check(double unitary_tol, double herm_tol) const {
  if (!m.square()) throw std::invalid_argument("operator must be square");
  if (kind == Kind::unitary) {
    if (max_abs_diff(m * m.dagger(), CMat::identity(m.rows())) > unitary_tol)
      throw std::invalid_argument("operator is not unitary");
  } else if (kind == Kind::hermitian) {
    if (max_abs_diff(m, m.dagger()) > herm_tol)
      throw std::invalid_argument("operator is not Hermitian");
  }
}

std::vector<double> hamiltonian_diag(const SpinSystem& sys, bool with_offsets) {
  const std::size_t dim = sys.dim();
  std::vector<double> h(dim, 0.0);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    double e = 0.0;
    for (int s = 1; s <= sys.n; ++s) {
      const double mz = spin_value(idx, sys.n, s) ? -0.5 : 0.5;  // Iz eigenvalue
      if (with_offsets) e += -2.0 * M_PI * sys.offset_hz[s - 1] * mz;
      for (int t = s + 1; t <= sys.n; ++t) {
        const double mzt = spin_value(idx, sys.n, t) ? -0.5 : 0.5;
        e += 2.0 * M_PI * sys.coupling_hz(s, t) * mz * mzt;
      }
    }
    h[idx] = e;
  }
  return h;
}

CMat build_hamiltonian(const SpinSystem& sys, bool with_offsets) {
  const std::vector<double> h = hamiltonian_diag(sys, with_offsets);
  CMat m(h.size(), h.size());
  for (std::size_t i = 0; i < h.size(); ++i) m(i, i) = h[i];
  return m;
}

CMat free_evolution(const SpinSystem& sys, double t, bool with_offsets) {
  const std::vector<double> h = hamiltonian_diag(sys, with_offsets);
  CMat u(h.size(), h.size());
  for (std::size_t i = 0; i < h.size(); ++i) u(i, i) = std::polar(1.0, -h[i] * t);
  return u;
}

CMat embed(const CMat& op, const std::vector<int>& spins, int n) {
  const int k = static_cast<int>(spins.size());
  const std::size_t dk = std::size_t(1) << k;
  if (op.rows() != dk || op.cols() != dk)
    throw std::invalid_argument("embed: operator size does not match spin list");
  std::vector<bool> seen(n + 1, false);
  for (int s : spins) {
    if (s < 1 || s > n) throw std::invalid_argument("embed: spin index out of range");
    if (seen[s]) throw std::invalid_argument("embed: duplicate spin index");
    seen[s] = true;
  }
  const std::size_t dim = std::size_t(1) << n;
  CMat m(dim, dim);
  for (std::size_t r = 0; r < dim; ++r) {
    std::size_t tr = 0;
    for (int i = 0; i < k; ++i) tr = (tr << 1) | std::size_t(spin_value(r, n, spins[i]));
    for (std::size_t tc = 0; tc < dk; ++tc) {
      const cd v = op(tr, tc);
      if (v == cd(0.0)) continue;
      std::size_t c = r;
      for (int i = 0; i < k; ++i) {
        const std::size_t bit = std::size_t(1) << spin_bit(n, spins[i]);
        if ((tc >> (k - 1 - i)) & 1u)
          c |= bit;
        else
          c &= ~bit;
      }
      m(r, c) = v;
    }
  }
  return m;
}

DensityMatrix apply_unitary(const CMat& u, const DensityMatrix& rho) {
  DensityMatrix out;
  out.normalized = rho.normalized;
  out.m = u * rho.m * u.dagger();
  return out;
}

void apply_single_qubit(CMat& rho, int spin, const CMat& u2, int n) {
  const std::size_t dim = std::size_t(1) << n;
  const std::size_t bit = std::size_t(1) << spin_bit(n, spin);
  const cd u00 = u2(0, 0), u01 = u2(0, 1), u10 = u2(1, 0), u11 = u2(1, 1);
  for (std::size_t r = 0; r < dim; ++r) {  // rows: rho <- U rho
    if (r & bit) continue;
    const std::size_t r1 = r | bit;
    for (std::size_t c = 0; c < dim; ++c) {
      const cd a = rho(r, c), b = rho(r1, c);
      rho(r, c) = u00 * a + u01 * b;
      rho(r1, c) = u10 * a + u11 * b;
    }
  }
  const cd v00 = std::conj(u00), v01 = std::conj(u01), v10 = std::conj(u10), v11 = std::conj(u11);
  for (std::size_t c = 0; c < dim; ++c) {  // cols: rho <- rho U^dag
    if (c & bit) continue;
    const std::size_t c1 = c | bit;
    for (std::size_t r = 0; r < dim; ++r) {
      const cd a = rho(r, c), b = rho(r, c1);
      rho(r, c) = a * v00 + b * v01;
      rho(r, c1) = a * v10 + b * v11;
    }
  }
}

void apply_single_qubit_kraus(CMat& rho, int spin, const std::vector<CMat>& kraus, int n) {
  const std::size_t dim = std::size_t(1) << n;
  CMat acc(dim, dim);
  for (const CMat& e : kraus) {
    CMat term = rho;
    apply_single_qubit(term, spin, e, n);
    acc += term;
  }
  rho = std::move(acc);
}

void apply_diagonal_phases(CMat& rho, const std::vector<double>& phase_rad) {
  const std::size_t dim = rho.rows();
  if (phase_rad.size() != dim) throw std::invalid_argument("phase vector size mismatch");
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c)
      rho(r, c) *= std::polar(1.0, phase_rad[r] - phase_rad[c]);
}

}  // namespace nmr
