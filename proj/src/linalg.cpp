#include "nmr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace nmr {

std::string to_string(const CMat& m, int precision) {
  std::ostringstream os;
  os.precision(precision);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const cd v = m(r, c);
      os << v.real() << (v.imag() < 0 ? "-" : "+") << std::abs(v.imag()) << "i";
      os << (c + 1 == m.cols() ? "" : "  ");
    }
    os << "\n";
  }
  return os.str();
}

namespace {

double offdiag_norm(const CMat& a) {
  double s = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c)
      if (r != c) s += std::norm(a(r, c));
  return std::sqrt(s);
}

}  // namespace

EigResult eig_hermitian(const CMat& a) {
  if (!a.square()) throw std::invalid_argument("eig_hermitian: non-square matrix");
  const std::size_t n = a.rows();
  CMat w = a;
  CMat v = CMat::identity(n);
  const double scale = std::max(w.frobenius_norm(), 1e-300);
  const double stop = 1e-14 * scale;

  for (int sweep = 0; sweep < 120 && offdiag_norm(w) > stop; ++sweep) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cd apq = w(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double app = w(p, p).real();
        const double aqq = w(q, q).real();
        // Unitary plane rotation R = [[c, -s e^{i phi}], [s e^{-i phi}, c]]
        // with phi = arg(apq) zeroes the (p, q) element of R^dag W R.
        const double phi = std::arg(apq);
        const double theta = 0.5 * std::atan2(2.0 * std::abs(apq), app - aqq);
        const double c = std::cos(theta), s = std::sin(theta);
        const cd e = std::polar(1.0, phi);
        const cd rpq = -s * e, rqp = s * std::conj(e);
        for (std::size_t i = 0; i < n; ++i) {  // W <- W R, V <- V R
          const cd wip = w(i, p), wiq = w(i, q);
          w(i, p) = wip * c + wiq * rqp;
          w(i, q) = wip * rpq + wiq * c;
          const cd vip = v(i, p), viq = v(i, q);
          v(i, p) = vip * c + viq * rqp;
          v(i, q) = vip * rpq + viq * c;
        }
        for (std::size_t i = 0; i < n; ++i) {  // W <- R^dag W
          const cd wpi = w(p, i), wqi = w(q, i);
          w(p, i) = c * wpi + std::conj(rqp) * wqi;
          w(q, i) = std::conj(rpq) * wpi + c * wqi;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return w(i, i).real() < w(j, j).real(); });

  EigResult r;
  r.values.resize(n);
  r.vectors = CMat(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    r.values[j] = w(order[j], order[j]).real();
    for (std::size_t i = 0; i < n; ++i) r.vectors(i, j) = v(i, order[j]);
  }
  return r;
}

double two_norm(const CMat& a) {
  CMat g = a.dagger() * a;
  const EigResult e = eig_hermitian(g);
  const double top = e.values.empty() ? 0.0 : e.values.back();
  return std::sqrt(std::max(top, 0.0));
}

CMat expm(const CMat& a) {
  if (!a.square()) throw std::invalid_argument("expm: non-square matrix");
  const std::size_t n = a.rows();
  double norm = 0.0;  // max row sum of |entries|
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < n; ++c) s += std::abs(a(r, c));
    norm = std::max(norm, s);
  }
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  CMat t = a;
  t *= std::pow(2.0, -squarings);

  CMat result = CMat::identity(n);
  CMat term = CMat::identity(n);
  for (int k = 1; k <= 40; ++k) {
    term = term * t;
    term *= cd(1.0 / k);
    result += term;
    if (term.max_abs() < 1e-18) break;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

CMat solve(const CMat& a, const CMat& b) {
  if (!a.square() || a.rows() != b.rows()) throw std::invalid_argument("solve: shape mismatch");
  const std::size_t n = a.rows(), m = b.cols();
  CMat lu = a;
  CMat x = b;
  const double scale = std::max(a.max_abs(), 1e-300);
  std::vector<std::size_t> piv(n);
  std::iota(piv.begin(), piv.end(), 0);

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t best = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(lu(r, col)) > std::abs(lu(best, col))) best = r;
    if (std::abs(lu(best, col)) < 1e-13 * scale)
      throw std::runtime_error("solve: matrix is singular to working precision");
    if (best != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(lu(col, c), lu(best, c));
      for (std::size_t c = 0; c < m; ++c) std::swap(x(col, c), x(best, c));
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const cd f = lu(r, col) / lu(col, col);
      lu(r, col) = f;
      for (std::size_t c = col + 1; c < n; ++c) lu(r, c) -= f * lu(col, c);
      for (std::size_t c = 0; c < m; ++c) x(r, c) -= f * x(col, c);
    }
  }
  for (std::size_t col = n; col-- > 0;) {
    for (std::size_t c = 0; c < m; ++c) {
      cd s = x(col, c);
      for (std::size_t j = col + 1; j < n; ++j) s -= lu(col, j) * x(j, c);
      x(col, c) = s / lu(col, col);
    }
  }
  return x;
}

void fft_inplace(std::vector<cd>& x, bool inverse) {
  const std::size_t n = x.size();
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft: size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {  // bit-reversal permutation
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
    const cd wl = std::polar(1.0, ang);
    for (std::size_t i = 0; i < n; i += len) {
      cd w = 1.0;
      for (std::size_t j = 0; j < len / 2; ++j) {
        const cd u = x[i + j];
        const cd v = x[i + j + len / 2] * w;
        x[i + j] = u + v;
        x[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse)
    for (cd& v : x) v /= static_cast<double>(n);
}

double golden_min(const std::function<double(double)>& f, double a, double b, double tol) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

RecoveryFit fit_recovery(const std::vector<double>& t, const std::vector<double>& s) {
  if (t.size() != s.size() || t.size() < 3)
    throw std::invalid_argument("fit_recovery: need at least 3 samples");
  RecoveryFit fit;
  fit.s0 = s.back();
  if (fit.s0 == 0.0) fit.s0 = 1e-12;
  fit.alpha = 1.0 - s.front() / fit.s0;
  fit.t1 = std::max(t.back() / 3.0, 1e-9);

  for (int it = 0; it < 200; ++it) {
    CMat jtj(3, 3), jtr(3, 1);
    double step_norm = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double e = std::exp(-t[i] / fit.t1);
      const double model = fit.s0 * (1.0 - fit.alpha * e);
      const double resid = s[i] - model;
      const double j0 = 1.0 - fit.alpha * e;
      const double j1 = -fit.s0 * e;
      const double j2 = -fit.s0 * fit.alpha * e * t[i] / (fit.t1 * fit.t1);
      const double jac[3] = {j0, j1, j2};
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) jtj(r, c) += jac[r] * jac[c];
        jtr(r, 0) += jac[r] * resid;
      }
    }
    for (int r = 0; r < 3; ++r) jtj(r, r) += 1e-12;
    const CMat step = solve(jtj, jtr);
    fit.s0 += step(0, 0).real();
    fit.alpha += step(1, 0).real();
    fit.t1 += step(2, 0).real();
    fit.t1 = std::max(fit.t1, 1e-9);
    for (int r = 0; r < 3; ++r) step_norm += std::norm(step(r, 0));
    fit.iterations = it + 1;
    if (std::sqrt(step_norm) < 1e-12 * (std::abs(fit.s0) + std::abs(fit.t1) + 1.0)) break;
  }
  return fit;
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& s) {
  if (t.size() != s.size() || t.size() < 2)
    throw std::invalid_argument("fit_decay: need at least 2 samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (s[i] <= 0.0) continue;  // log-linear fit ignores non-positive samples
    const double y = std::log(s[i]);
    sx += t[i];
    sy += y;
    sxx += t[i] * t[i];
    sxy += t[i] * y;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("fit_decay: not enough positive samples");
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) throw std::runtime_error("fit_decay: degenerate time grid");
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  DecayFit fit;
  fit.s0 = std::exp(intercept);
  fit.t2 = slope < 0 ? -1.0 / slope : std::numeric_limits<double>::infinity();
  return fit;
}

}  // namespace nmr
