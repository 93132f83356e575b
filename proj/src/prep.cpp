#include "nmr/prep.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nmr {
namespace {

// Z products are spin-set masks: bit s-1 = spin s. A CNOT toggles the
// control's membership when the target is a member; a NOT flips the sign
// when its spin is a member. These are the only gates plans may contain.
using Mask = std::uint32_t;

void add_term_diag(std::vector<double>& diag, Mask mask, double w, int n) {
  std::uint32_t idx = 0;
  for (int s = 1; s <= n; ++s)
    if ((mask >> (s - 1)) & 1u) idx |= std::uint32_t(1) << (n - s);
  for (std::size_t k = 0; k < diag.size(); ++k)
    diag[k] += (std::popcount(std::uint32_t(k) & idx) & 1) ? -w : w;
}

std::vector<double> plan_signature(const std::vector<PrepExperiment>& exps,
                                   const std::vector<double>& ratios, int n) {
  std::vector<double> diag(std::size_t(1) << n, 0.0);
  for (const auto& e : exps)
    for (int s = 1; s <= n; ++s) {
      const double r = ratios.empty() ? 1.0 : ratios[std::size_t(s) - 1];
      if (r == 0.0) continue;
      Mask m = Mask(1) << (s - 1);
      int sign = 1;
      for (const Gate& g : e.circuit) {
        if (g.kind == Gate::Kind::cnot) {
          if ((m >> (g.spins[1] - 1)) & 1u) m ^= Mask(1) << (g.spins[0] - 1);
        } else if (g.kind == Gate::Kind::not_) {
          if ((m >> (g.spins[0] - 1)) & 1u) sign = -sign;
        } else {
          throw std::invalid_argument("plan circuits must contain only CNOT and NOT gates");
        }
      }
      add_term_diag(diag, m, e.weight * sign * r, n);
    }
  return diag;
}

struct XorBasis {
  Mask at[8] = {};
  bool independent(Mask m) const {
    for (int b = 7; b >= 0 && m; --b) {
      if (!((m >> b) & 1u)) continue;
      if (!at[b]) return true;
      m ^= at[b];
    }
    return false;
  }
  void add(Mask m) {
    for (int b = 7; b >= 0 && m; --b) {
      if (!((m >> b) & 1u)) continue;
      if (!at[b]) {
        at[b] = m;
        return;
      }
      m ^= at[b];
    }
  }
};

// Reduces an invertible GF(2) matrix (rows stored as column bitmasks) to the
// identity and returns the row additions (i += j) in application order.
std::vector<std::pair<int, int>> gauss_ops(std::vector<Mask> rows, int n) {
  std::vector<std::pair<int, int>> ops;
  for (int col = 0; col < n; ++col) {
    if (!((rows[std::size_t(col)] >> col) & 1u)) {
      int piv = -1;
      for (int r = col + 1; r < n; ++r)
        if ((rows[std::size_t(r)] >> col) & 1u) {
          piv = r;
          break;
        }
      if (piv < 0) throw std::logic_error("singular transfer matrix");
      rows[std::size_t(col)] ^= rows[std::size_t(piv)];
      ops.emplace_back(col, piv);
    }
    for (int r = 0; r < n; ++r)
      if (r != col && ((rows[std::size_t(r)] >> col) & 1u)) {
        rows[std::size_t(r)] ^= rows[std::size_t(col)];
        ops.emplace_back(r, col);
      }
  }
  return ops;
}

// Circuit whose action on basis states is |v> -> |Av>. A row addition
// v_i ^= v_j is CNOT(control j+1, target i+1); the decomposition
// A = E_1 ... E_q plays back with E_q first.
Circuit state_map_circuit(const std::vector<Mask>& rows, int n) {
  const auto ops = gauss_ops(rows, n);
  Circuit c;
  for (auto it = ops.rbegin(); it != ops.rend(); ++it)
    c.push_back(Gate::cnot(it->second + 1, it->first + 1));
  return c;
}

// Circuit whose action on Z-product masks is m -> Am, with column j of A the
// image of spin j+1's Z term. A row addition m_i ^= m_j is
// CNOT(control i+1, target j+1). Negative columns get a leading NOT.
Circuit mask_map_circuit(const std::vector<std::pair<Mask, int>>& cols, int n) {
  Circuit c;
  for (std::size_t i = 0; i < cols.size(); ++i)
    if (cols[i].second < 0) c.push_back(Gate::not_(int(i) + 1));
  std::vector<Mask> rows(std::size_t(n), 0);
  for (int r = 0; r < n; ++r)
    for (std::size_t j = 0; j < cols.size(); ++j)
      if ((cols[j].first >> r) & 1u) rows[std::size_t(r)] |= Mask(1) << j;
  const auto ops = gauss_ops(std::move(rows), n);
  for (auto it = ops.rbegin(); it != ops.rend(); ++it)
    c.push_back(Gate::cnot(it->first + 1, it->second + 1));
  return c;
}

Mask bmat_vec(const std::vector<Mask>& rows, Mask v) {
  Mask r = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    r |= Mask(std::popcount(rows[i] & v) & 1) << i;
  return r;
}

std::vector<Mask> bmat_mul(const std::vector<Mask>& a, const std::vector<Mask>& b) {
  std::vector<Mask> c(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      if ((a[i] >> k) & 1u) c[i] ^= b[k];
  return c;
}

// Companion matrix whose orbit of e0 runs through every nonzero vector: the
// population cycle of maximal length 2^n - 1.
std::vector<Mask> primitive_cycle(int n) {
  const Mask full = (Mask(1) << n) - 1;
  for (Mask coeffs = 1; coeffs <= full; coeffs += 2) {
    std::vector<Mask> rows(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      rows[std::size_t(i)] = (i > 0 ? Mask(1) << (i - 1) : 0u) |
                             (((coeffs >> i) & 1u) << (n - 1));
    Mask v = 1;
    int steps = 0;
    do {
      v = bmat_vec(rows, v);
      ++steps;
    } while (v != 1 && v != 0 && steps <= int(full));
    if (v == 1 && steps == int(full)) return rows;
  }
  throw std::logic_error("no maximal population cycle found");
}

}  // namespace

CMat thermal_state(const SpinSystem& sys, ThermalMode mode, double epsilon) {
  sys.validate();
  std::vector<double> ratio = sys.polarization;
  if (ratio.empty()) ratio.assign(std::size_t(sys.n), 1.0);
  if (int(ratio.size()) != sys.n)
    throw std::invalid_argument("polarization list length must equal spin count");
  if (mode == ThermalMode::deviation) {
    std::vector<ProductOperatorTerm> terms;
    for (int s = 1; s <= sys.n; ++s) {
      std::string letters(std::size_t(sys.n), 'I');
      letters[std::size_t(s) - 1] = 'Z';
      terms.push_back({std::move(letters), ratio[std::size_t(s) - 1]});
    }
    return product_operator(terms, sys.n);
  }
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be non-negative");
  CMat rho(1, 1);
  rho(0, 0) = 1.0;
  for (int s = 1; s <= sys.n; ++s) {
    const double p = 0.5 * (1.0 + epsilon * ratio[std::size_t(s) - 1]);
    if (p < 0.0 || p > 1.0)
      throw std::invalid_argument("epsilon times polarization must stay within [-1, 1]");
    CMat two(2, 2);
    two(0, 0) = p;
    two(1, 1) = 1.0 - p;
    rho = kron(rho, two);
  }
  return rho;
}

CMat run_prep_plan(const PrepPlan& plan, const SpinSystem& sys, const CMat& rho0) {
  if (plan.experiments.empty()) throw std::invalid_argument("plan has no experiments");
  if (!rho0.square() || rho0.rows() != sys.dim())
    throw std::invalid_argument("initial state dimension must match the spin system");
  CMat sum(rho0.rows(), rho0.cols());
  for (const auto& e : plan.experiments) {
    CMat rho = rho0;
    apply_circuit_density(rho, e.circuit, sys.n, &sys);
    sum += rho * cd(e.weight);
  }
  return sum;
}

PrepPlan temporal_cyclic(int n) {
  if (n < 1 || n > 7) throw std::invalid_argument("spin count must be in [1, 7]");
  PrepPlan plan;
  if (n == 1) {
    plan.experiments.push_back({{Gate::not_(1), Gate::not_(1)}, 1.0});
  } else if (n == 2) {
    plan.experiments.push_back({{}, 1.0});
    plan.experiments.push_back({{Gate::cnot(2, 1), Gate::cnot(1, 2)}, 1.0});
    plan.experiments.push_back({{Gate::cnot(1, 2), Gate::cnot(2, 1)}, 1.0});
  } else {
    const std::vector<Mask> cycle = primitive_cycle(n);
    std::vector<Mask> power(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) power[std::size_t(i)] = Mask(1) << i;
    const int reps = (1 << n) - 1;
    for (int k = 0; k < reps; ++k) {
      plan.experiments.push_back({state_map_circuit(power, n), 1.0});
      power = bmat_mul(cycle, power);
    }
  }
  plan.expected_signature = plan_signature(plan.experiments, {}, n);
  return plan;
}

PrepPlan temporal_product_operator(int n, bool homonuclear,
                                   const std::vector<double>& ratios) {
  if (n < 1 || n > 7) throw std::invalid_argument("spin count must be in [1, 7]");
  if (homonuclear && !ratios.empty())
    throw std::invalid_argument("homonuclear plans take no polarization ratios");
  if (!homonuclear && int(ratios.size()) != n)
    throw std::invalid_argument("heteronuclear plans need one polarization ratio per spin");

  // Each experiment transforms the n Z terms into n distinct, linearly
  // independent products, so per-product occurrence counts share the parity
  // of the final weight: odd counts reach weight one, even counts weight two.
  const int masks = (1 << n) - 1;
  const int per_mask = (n % 2 == 1) ? 1 : 2;
  const int covered = masks * per_mask;
  int l = (covered + n - 1) / n;
  while ((l * n - covered) % 2 != 0) ++l;

  std::mt19937 rng(0x5eedu);
  std::vector<std::vector<std::pair<Mask, int>>> packed;
  for (int attempt = 0;; ++attempt) {
    if (attempt > 0 && attempt % 64 == 0) {
      ++l;
      while ((l * n - covered) % 2 != 0) ++l;
      if (l * n > 4 * covered + 8 * n) throw std::logic_error("plan packing failed");
    }
    const int extras = (l * n - covered) / 2;
    std::vector<std::pair<Mask, int>> emissions;
    std::vector<int> count(std::size_t(masks) + 1, 0);
    for (Mask m = 1; m <= Mask(masks); ++m) {
      for (int k = 0; k < per_mask; ++k) emissions.push_back({m, 1});
      count[m] = per_mask;
    }
    for (int k = 0; k < extras; ++k) {
      const Mask m = Mask(k % masks) + 1;
      emissions.push_back({m, 1});
      emissions.push_back({m, -1});
      count[m] += 2;
    }
    bool feasible = true;
    for (Mask m = 1; m <= Mask(masks); ++m)
      if (count[m] > l) feasible = false;
    if (!feasible) continue;

    if (attempt % 64 == 0) {
      std::stable_sort(emissions.begin(), emissions.end(),
                       [&](const auto& a, const auto& b) {
                         if (count[a.first] != count[b.first])
                           return count[a.first] > count[b.first];
                         return a.first < b.first;
                       });
    } else {
      for (std::size_t i = emissions.size(); i > 1; --i)
        std::swap(emissions[i - 1], emissions[rng() % i]);
    }

    struct Slot {
      XorBasis basis;
      std::vector<std::pair<Mask, int>> cols;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(l));
    bool ok = true;
    for (const auto& em : emissions) {
      int best = -1;
      for (int e = 0; e < l; ++e) {
        Slot& slot = slots[std::size_t(e)];
        if (int(slot.cols.size()) >= n) continue;
        bool dup = false;
        for (const auto& c : slot.cols)
          if (c.first == em.first) {
            dup = true;
            break;
          }
        if (dup || !slot.basis.independent(em.first)) continue;
        if (best < 0 || slot.cols.size() < slots[std::size_t(best)].cols.size()) best = e;
      }
      if (best < 0) {
        ok = false;
        break;
      }
      slots[std::size_t(best)].cols.push_back(em);
      slots[std::size_t(best)].basis.add(em.first);
    }
    if (!ok) continue;
    packed.clear();
    for (Slot& s : slots) packed.push_back(std::move(s.cols));
    break;
  }

  PrepPlan plan;
  for (const auto& cols : packed)
    plan.experiments.push_back({mask_map_circuit(cols, n), 1.0});
  plan.expected_signature =
      plan_signature(plan.experiments, homonuclear ? std::vector<double>{} : ratios, n);
  return plan;
}

PrepPlan temporal_product_operator_order5() {
  using G = Gate;
  const std::vector<Circuit> rows{
      {G::cnot(2, 4), G::cnot(1, 2), G::cnot(3, 1), G::cnot(5, 1)},
      {G::cnot(3, 5), G::cnot(4, 3), G::cnot(1, 4), G::not_(2)},
      {G::cnot(4, 3), G::cnot(1, 4), G::cnot(2, 1), G::cnot(3, 1), G::not_(5)},
      {G::cnot(4, 2), G::cnot(1, 4), G::cnot(5, 1), G::cnot(2, 1), G::not_(1), G::not_(5)},
      {G::cnot(3, 5), G::cnot(4, 3), G::cnot(2, 4), G::cnot(3, 5)},
      {G::cnot(1, 3), G::cnot(1, 5), G::cnot(2, 1), G::cnot(1, 2)},
      {G::cnot(4, 2), G::cnot(3, 4), G::cnot(5, 3), G::cnot(3, 1)},
      {G::cnot(4, 2), G::cnot(3, 4), G::cnot(5, 3), G::cnot(4, 2), G::cnot(3, 4), G::not_(1)},
      {G::cnot(3, 5), G::cnot(3, 4), G::cnot(5, 1), G::not_(4), G::not_(2), G::not_(3)}};
  PrepPlan plan;
  for (const Circuit& c : rows) plan.experiments.push_back({c, 1.0});
  plan.expected_signature = plan_signature(plan.experiments, {}, 5);
  return plan;
}

std::vector<CarbonDressing> default_carbon_dressing() {
  // Passes 1 and 2 feed one dilute spin's Z term through the spin-1 images
  // while flipping the other pass's bare term away; pass 3 also creates the
  // two-dilute-spin product.
  std::vector<CarbonDressing> passes(4);
  passes[1].prefix = {Gate::cnot(1, 6)};
  passes[1].not7_mask = 0x1ffu;
  passes[2].prefix = {Gate::cnot(1, 7)};
  passes[2].not6_mask = 0x1ffu;
  passes[3].prefix = {Gate::cnot(1, 6), Gate::cnot(6, 7)};
  return passes;
}

PrepPlan temporal_average_7(const std::vector<CarbonDressing>& passes) {
  if (passes.empty()) throw std::invalid_argument("at least one dressing pass is required");
  const PrepPlan base = temporal_product_operator_order5();
  PrepPlan plan;
  for (const auto& pass : passes) {
    for (const Gate& g : pass.prefix) {
      if (g.kind != Gate::Kind::cnot && g.kind != Gate::Kind::not_)
        throw std::invalid_argument("dressing prefixes must contain only CNOT and NOT gates");
      g.validate(7);
    }
    for (std::size_t e = 0; e < base.experiments.size(); ++e) {
      PrepExperiment x;
      x.circuit = pass.prefix;
      const Circuit& row = base.experiments[e].circuit;
      x.circuit.insert(x.circuit.end(), row.begin(), row.end());
      if ((pass.not6_mask >> e) & 1u) x.circuit.push_back(Gate::not_(6));
      if ((pass.not7_mask >> e) & 1u) x.circuit.push_back(Gate::not_(7));
      plan.experiments.push_back(std::move(x));
    }
  }
  plan.expected_signature =
      plan_signature(plan.experiments, {1.0, 1.0, 1.0, 1.0, 1.0, 0.25, 0.25}, 7);
  return plan;
}

std::pair<Circuit, LogicalSubspace> logical_label_3() {
  return {{Gate::cnot(2, 1), Gate::cnot(3, 1)}, LogicalSubspace{1, 0}};
}

double logical_label_subspace_qubits(int n) {
  if (n < 2 || n % 2 != 0 || n > 62)
    throw std::invalid_argument("labeling needs an even spin count in [2, 62]");
  std::vector<std::uint64_t> row(std::size_t(n) + 1, 0);
  row[0] = 1;
  for (int i = 1; i <= n; ++i)
    for (int k = i; k >= 1; --k) row[std::size_t(k)] += row[std::size_t(k) - 1];
  return std::log2(1.0 + double(row[std::size_t(n) / 2]));
}

std::vector<double> uncoupling_frame(const SpinSystem& sys, int label_spin,
                                     const std::vector<int>& computation_spins) {
  sys.validate();
  if (label_spin < 1 || label_spin > sys.n)
    throw std::invalid_argument("label spin out of range");
  if (computation_spins.empty())
    throw std::invalid_argument("at least one computation spin is required");
  std::vector<char> seen(std::size_t(sys.n) + 1, 0);
  seen[std::size_t(label_spin)] = 1;
  std::vector<double> off;
  bool coupled = false;
  for (int s : computation_spins) {
    if (s < 1 || s > sys.n || seen[std::size_t(s)])
      throw std::invalid_argument("computation spins must be distinct and differ from the label");
    seen[std::size_t(s)] = 1;
    const double j = sys.coupling_hz(label_spin, s);
    coupled |= (j != 0.0);
    off.push_back(-j / 2.0);
  }
  if (!coupled)
    throw std::invalid_argument("label spin is not coupled to any computation spin");
  return off;
}

CMat gradient_crush(const CMat& rho, bool preserve_zero_quantum) {
  if (!rho.square()) throw std::invalid_argument("state matrix must be square");
  CMat out = rho;
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c) {
      if (r == c) continue;
      if (preserve_zero_quantum &&
          std::popcount(std::uint64_t(r)) == std::popcount(std::uint64_t(c)))
        continue;
      out(r, c) = 0.0;
    }
  return out;
}

std::pair<Circuit, std::vector<double>> schulman_vazirani_boost() {
  // Controlled swap written out as CNOT, Toffoli, CNOT.
  const Circuit c{Gate::cnot(2, 3), Gate::not_(3), Gate::cnot(2, 1),
                  Gate::toffoli(3, 1, 2), Gate::cnot(2, 1)};
  return {c, {1, 3, 1, 1, -1, -1, -1, -3}};
}

SnrInfo snr_scaling(PrepMethod method, int n) {
  if (n < 1 || n > 30) throw std::invalid_argument("spin count must be in [1, 30]");
  SnrInfo info;
  switch (method) {
    case PrepMethod::loglab:
      info.experiments = 1;
      break;
    case PrepMethod::cyclic:
      info.experiments = (1 << n) - 1;
      break;
    case PrepMethod::prodop:
      info.experiments = int(((1u << n) - 1u + unsigned(n) - 1u) / unsigned(n));
      break;
  }
  info.relative_snr = double(n) / double(std::uint64_t(1) << n) *
                      std::sqrt(double(info.experiments));
  return info;
}

std::string plan_to_text(const PrepPlan& plan) {
  if (plan.experiments.empty()) throw std::invalid_argument("plan has no experiments");
  std::ostringstream os;
  os.precision(12);
  if (!plan.expected_signature.empty()) {
    os << "signature";
    for (double v : plan.expected_signature) os << ' ' << v;
    os << '\n';
  }
  for (const auto& e : plan.experiments)
    os << "experiment weight " << e.weight << '\n' << circuit_to_text(e.circuit) << "end\n";
  return os.str();
}

PrepPlan parse_plan(const std::string& text) {
  PrepPlan plan;
  std::istringstream is(text);
  std::string line, circuit_text;
  double weight = 1.0;
  bool in_exp = false;
  int lineno = 0;
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument("plan line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line.substr(0, line.find('#')));
    std::string head;
    if (!(ls >> head)) continue;
    if (!in_exp && head == "signature") {
      std::vector<double> sig;
      double v;
      while (ls >> v) sig.push_back(v);
      if (sig.empty() || !ls.eof()) fail("bad signature line");
      plan.expected_signature = std::move(sig);
    } else if (head == "experiment") {
      if (in_exp) fail("experiment block not closed");
      std::string kw;
      if (!(ls >> kw >> weight) || kw != "weight") fail("expected 'experiment weight <w>'");
      in_exp = true;
      circuit_text.clear();
    } else if (head == "end") {
      if (!in_exp) fail("'end' outside an experiment");
      plan.experiments.push_back({parse_circuit(circuit_text), weight});
      in_exp = false;
    } else {
      if (!in_exp) fail("unexpected line outside an experiment");
      circuit_text += line;
      circuit_text += '\n';
    }
  }
  if (in_exp) throw std::invalid_argument("plan ended inside an experiment");
  if (plan.experiments.empty()) throw std::invalid_argument("plan has no experiments");
  return plan;
}

}  // namespace nmr
