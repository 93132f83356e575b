#include "nmr/readout.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nmr/linalg.hpp"

namespace nmr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct SqcLine {
  std::size_t row = 0;  // spin bit clear
  std::size_t col = 0;  // spin bit set
  double freq_hz = 0.0;
};

// One line per spectator configuration, enumerated with the lowest-numbered
// other spin as the leading bit. The level splitting is the observed spin's
// offset plus half of each coupling, signed by the spectator state.
std::vector<SqcLine> sqc_lines(const SpinSystem& sys, int spin) {
  if (spin < 1 || spin > sys.n) throw std::invalid_argument("readout spin out of range");
  const std::size_t sbit = std::size_t(1) << spin_bit(sys.n, spin);

  std::vector<int> others;
  for (int s = 1; s <= sys.n; ++s)
    if (s != spin) others.push_back(s);

  std::vector<SqcLine> lines;
  lines.reserve(std::size_t(1) << others.size());
  for (std::size_t cfg = 0; cfg < (std::size_t(1) << others.size()); ++cfg) {
    std::size_t base = 0;
    double freq = sys.offset_hz[std::size_t(spin) - 1];
    for (std::size_t k = 0; k < others.size(); ++k) {
      const bool up = ((cfg >> (others.size() - 1 - k)) & 1) != 0;
      if (up) base |= std::size_t(1) << spin_bit(sys.n, others[k]);
      freq += (up ? 0.5 : -0.5) * sys.coupling_hz(spin, others[k]);
    }
    lines.push_back({base, base | sbit, freq});
  }
  return lines;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void append_double(std::string& out, double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  out += os.str();
}

}  // namespace

std::vector<cd> fid(const SpinSystem& sys, const CMat& rho, int spin, double duration_s,
                    double dt_s, double t2_star_s) {
  sys.validate();
  if (duration_s <= 0.0 || dt_s <= 0.0) throw std::invalid_argument("fid needs positive times");
  const std::size_t dim = sys.dim();
  if (rho.rows() != dim || rho.cols() != dim)
    throw std::invalid_argument("fid state dimension mismatch");

  const std::vector<SqcLine> lines = sqc_lines(sys, spin);
  const double nyquist = 0.5 / dt_s;
  for (const SqcLine& l : lines)
    if (std::abs(l.freq_hz) >= nyquist)
      throw std::invalid_argument("fid sampling aliases a line frequency");

  // Each single-quantum element contributes amplitude -2i rho(row,col) as a
  // phasor at its level splitting; the summed series is the complex signal.
  std::vector<cd> amp(lines.size());
  for (std::size_t k = 0; k < lines.size(); ++k)
    amp[k] = cd(0, -2) * rho(lines[k].row, lines[k].col);

  const std::size_t samples = std::size_t(duration_s / dt_s + 0.5);
  std::vector<cd> v(samples, cd(0));
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = double(i) * dt_s;
    cd sum = 0.0;
    for (std::size_t k = 0; k < lines.size(); ++k)
      sum += amp[k] * std::exp(cd(0, kTwoPi * lines[k].freq_hz * t));
    if (t2_star_s > 0.0) sum *= std::exp(-t / t2_star_s);
    v[i] = sum;
  }
  return v;
}

Spectrum spectrum_of(const std::vector<cd>& series, double dt_s, int spin) {
  if (series.empty()) throw std::invalid_argument("spectrum of empty series");
  if (dt_s <= 0.0) throw std::invalid_argument("spectrum needs a positive sample time");

  std::vector<cd> x = series;
  x.resize(next_pow2(series.size()), cd(0));
  fft_inplace(x, false);

  // Shift so the axis runs from -Nyquist upward; scale by dt so heights
  // approximate the continuous transform.
  const std::size_t n = x.size();
  Spectrum s;
  s.spin = spin;
  s.freq_hz.resize(n);
  s.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    s.freq_hz[k] = (double(k) - double(n / 2)) / (double(n) * dt_s);
    s.values[k] = x[(k + n / 2) % n] * dt_s;
  }
  return s;
}

double linewidth_hz(double t2_star_s) {
  if (t2_star_s <= 0.0) throw std::invalid_argument("linewidth needs a positive decay time");
  return 1.0 / (kTwoPi * t2_star_s);
}

std::vector<LineLabel> assign_multiplet(const SpinSystem& sys, int spin,
                                        double resolution_hz) {
  sys.validate();
  const std::vector<SqcLine> lines = sqc_lines(sys, spin);

  std::vector<LineLabel> labels(lines.size());
  const std::size_t m = std::size_t(sys.n) - 1;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    labels[k].freq_hz = lines[k].freq_hz;
    labels[k].spectator_bits.assign(m, '0');
    for (std::size_t b = 0; b < m; ++b)
      if ((k >> (m - 1 - b)) & 1) labels[k].spectator_bits[b] = '1';
  }
  for (std::size_t a = 0; a < labels.size(); ++a)
    for (std::size_t b = a + 1; b < labels.size(); ++b)
      if (std::abs(labels[a].freq_hz - labels[b].freq_hz) <= resolution_hz) {
        labels[a].merged = true;
        labels[b].merged = true;
      }
  return labels;
}

std::vector<double> observables(const CMat& rho, int n) {
  if (n < 1) throw std::invalid_argument("observables need at least one spin");
  const std::size_t dim = std::size_t(1) << n;
  if (rho.rows() != dim || rho.cols() != dim)
    throw std::invalid_argument("observables state dimension mismatch");

  std::vector<double> o(std::size_t(n), 0.0);
  for (int s = 1; s <= n; ++s) {
    const std::size_t bit = std::size_t(1) << spin_bit(n, s);
    double sum = 0.0;
    for (std::size_t k = 0; k < dim; ++k)
      sum += ((k & bit) == 0 ? 1.0 : -1.0) * rho(k, k).real();
    o[std::size_t(s) - 1] = sum;
  }
  return o;
}

std::vector<cd> sqc_line_amplitudes(const SpinSystem& sys, const CMat& rho, int spin) {
  sys.validate();
  const std::size_t dim = sys.dim();
  if (rho.rows() != dim || rho.cols() != dim)
    throw std::invalid_argument("line amplitude state dimension mismatch");

  const std::vector<SqcLine> lines = sqc_lines(sys, spin);
  std::vector<cd> amp(lines.size());
  for (std::size_t k = 0; k < lines.size(); ++k)
    amp[k] = cd(0, -2) * rho(lines[k].row, lines[k].col);
  return amp;
}

std::vector<Circuit> tomography_readout_set(int n) {
  if (n < 1 || n > 7) throw std::invalid_argument("tomography readout set needs 1..7 spins");
  std::size_t total = 1;
  for (int k = 0; k < n; ++k) total *= 3;

  // Base-3 counter over {identity, x90, y90} with spin 1 most significant.
  std::vector<Circuit> set;
  set.reserve(total);
  for (std::size_t code = 0; code < total; ++code) {
    Circuit c;
    std::size_t rem = code;
    std::size_t place = total / 3;
    for (int s = 1; s <= n; ++s, place /= 3) {
      const std::size_t digit = (rem / place) % 3;
      rem %= place;
      if (digit == 1) c.push_back(Gate::rx(s, 90.0));
      if (digit == 2) c.push_back(Gate::ry(s, 90.0));
    }
    set.push_back(std::move(c));
  }
  return set;
}

TomographyReading simulate_tomography_reading(const SpinSystem& sys, const CMat& rho,
                                              const Circuit& readout) {
  sys.validate();
  CMat rotated = rho;
  apply_circuit_density(rotated, readout, sys.n, &sys);

  TomographyReading reading;
  reading.readout = readout;
  reading.lines.resize(std::size_t(sys.n));
  for (int s = 1; s <= sys.n; ++s)
    reading.lines[std::size_t(s) - 1] = sqc_line_amplitudes(sys, rotated, s);
  return reading;
}

CMat tomography(const SpinSystem& sys, const std::vector<TomographyReading>& readings) {
  sys.validate();
  if (readings.empty()) throw std::invalid_argument("tomography needs readings");
  const std::size_t dim = sys.dim();

  // Real unknowns: dim diagonal entries, then (Re, Im) per off-diagonal pair
  // (a < b) in row-major pair order.
  const std::size_t unknowns = dim * dim;
  std::vector<std::size_t> pair_index(dim * dim, 0);
  {
    std::size_t next = dim;
    for (std::size_t a = 0; a < dim; ++a)
      for (std::size_t b = a + 1; b < dim; ++b, next += 2) pair_index[a * dim + b] = next;
  }

  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  auto add_row = [&](std::vector<double>&& coeff, double y) {
    rows.push_back(std::move(coeff));
    rhs.push_back(y);
  };

  for (const TomographyReading& reading : readings) {
    if (reading.lines.size() != std::size_t(sys.n))
      throw std::invalid_argument("tomography reading has wrong spin count");
    const CMat u = circuit_unitary(reading.readout, sys.n, &sys);

    for (int s = 1; s <= sys.n; ++s) {
      const std::vector<SqcLine> lines = sqc_lines(sys, s);
      const std::vector<cd>& measured = reading.lines[std::size_t(s) - 1];
      if (measured.size() != lines.size())
        throw std::invalid_argument("tomography reading has wrong line count");

      for (std::size_t l = 0; l < lines.size(); ++l) {
        // amplitude = -2i (U rho U^dag)(row,col)
        //           = -2i sum_{a,b} U(row,a) conj(U(col,b)) rho(a,b)
        std::vector<double> re_row(unknowns, 0.0), im_row(unknowns, 0.0);
        for (std::size_t a = 0; a < dim; ++a) {
          const cd diag_c = cd(0, -2) * u(lines[l].row, a) * std::conj(u(lines[l].col, a));
          re_row[a] += diag_c.real();
          im_row[a] += diag_c.imag();
          for (std::size_t b = a + 1; b < dim; ++b) {
            const cd fwd = u(lines[l].row, a) * std::conj(u(lines[l].col, b));
            const cd bwd = u(lines[l].row, b) * std::conj(u(lines[l].col, a));
            const cd on_re = cd(0, -2) * (fwd + bwd);
            const cd on_im = cd(0, -2) * (cd(0, 1) * fwd - cd(0, 1) * bwd);
            const std::size_t p = pair_index[a * dim + b];
            re_row[p] += on_re.real();
            im_row[p] += on_re.imag();
            re_row[p + 1] += on_im.real();
            im_row[p + 1] += on_im.imag();
          }
        }
        add_row(std::move(re_row), measured[l].real());
        add_row(std::move(im_row), measured[l].imag());
      }
    }
  }

  // Unit trace pins the identity direction, which no rotated line amplitude
  // can see.
  {
    std::vector<double> trace_row(unknowns, 0.0);
    for (std::size_t a = 0; a < dim; ++a) trace_row[a] = 1.0;
    add_row(std::move(trace_row), 1.0);
  }

  // Normal equations G x = M^T y.
  CMat g = CMat::zeros(unknowns, unknowns);
  CMat mty = CMat::zeros(unknowns, 1);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t i = 0; i < unknowns; ++i) {
      if (rows[r][i] == 0.0) continue;
      mty(i, 0) += rows[r][i] * rhs[r];
      for (std::size_t j = 0; j < unknowns; ++j) g(i, j) += rows[r][i] * rows[r][j];
    }
  }

  const EigResult eig = eig_hermitian(g);
  const double max_eig = eig.values.back();
  if (max_eig <= 0.0 || eig.values.front() < 1e-10 * max_eig)
    throw std::invalid_argument("tomography readout set is rank-deficient");

  const CMat x = solve(g, mty);
  CMat rho = CMat::zeros(dim, dim);
  for (std::size_t a = 0; a < dim; ++a) rho(a, a) = x(a, 0).real();
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = a + 1; b < dim; ++b) {
      const std::size_t p = pair_index[a * dim + b];
      rho(a, b) = cd(x(p, 0).real(), x(p + 1, 0).real());
      rho(b, a) = std::conj(rho(a, b));
    }

  const double tr = rho.trace().real();
  if (std::abs(tr) < 1e-12) throw std::invalid_argument("tomography trace vanished");
  return rho * (1.0 / tr);
}

std::string spectrum_to_csv(const Spectrum& s) {
  std::string out = "freq_hz,real,imag\n";
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    append_double(out, s.freq_hz[k]);
    out += ',';
    append_double(out, s.values[k].real());
    out += ',';
    append_double(out, s.values[k].imag());
    out += '\n';
  }
  return out;
}

}  // namespace nmr
