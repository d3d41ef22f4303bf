#include "flt/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace flt {

namespace {

constexpr int kMaxIter = 1000;
constexpr double kLentzTiny = 1e-300;
constexpr double kEps = 3e-17;

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for I_x(a,b), valid for x < (a+1)/(a+b+2).
double ibeta_cf(double x, double a, double b) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kLentzTiny) d = kLentzTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kLentzTiny) d = kLentzTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kLentzTiny) c = kLentzTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kLentzTiny) d = kLentzTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kLentzTiny) c = kLentzTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

// Lower regularized gamma by series.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized gamma by continued fraction.
double gamma_q_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kLentzTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kLentzTiny) d = kLentzTiny;
    c = b + an / c;
    if (std::fabs(c) < kLentzTiny) c = kLentzTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// log F(k,m) density, for the Newton refinement of the quantile.
double fisher_log_pdf(double x, int k, int m) {
  const double a = 0.5 * k;
  const double b = 0.5 * m;
  return a * std::log(static_cast<double>(k) / m) + (a - 1.0) * std::log(x) -
         (a + b) * std::log1p(static_cast<double>(k) * x / m) - log_beta(a, b);
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0) || a <= 0.0 || b <= 0.0)
    throw std::domain_error("regularized_incomplete_beta: bad arguments");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front =
      std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * ibeta_cf(x, a, b) / a;
  return 1.0 - front * ibeta_cf(1.0 - x, b, a) / b;
}

double regularized_gamma_p(double a, double x) {
  if (a <= 0.0 || x < 0.0)
    throw std::domain_error("regularized_gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (a <= 0.0 || x < 0.0)
    throw std::domain_error("regularized_gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double fisher_upper_tail(double x, int k, int m) {
  if (x < 0.0) throw std::domain_error("fisher_upper_tail: x < 0");
  if (k < 1 || m < 1)
    throw std::domain_error("fisher_upper_tail: degrees of freedom < 1");
  if (x == 0.0) return 1.0;
  if (!std::isfinite(x)) return 0.0;
  // P(F >= x) = I_{m/(m+kx)}(m/2, k/2)
  const double t = m / (m + static_cast<double>(k) * x);
  return regularized_incomplete_beta(t, 0.5 * m, 0.5 * k);
}

double fisher_upper_quantile(double alpha, int k, int m) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("fisher_upper_quantile: alpha outside (0,1)");
  if (k < 1 || m < 1)
    throw std::domain_error("fisher_upper_quantile: degrees of freedom < 1");

  double lo = 0.0;
  double hi = 1.0;
  int guard = 0;
  while (fisher_upper_tail(hi, k, m) > alpha) {
    lo = hi;
    hi *= 8.0;
    if (++guard > 400)
      throw std::runtime_error("fisher_upper_quantile: bracketing failed");
  }

  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = fisher_upper_tail(x, k, m) - alpha;
    if (f > 0.0)
      lo = x;
    else
      hi = x;
    double next;
    if (x > 0.0 && std::isfinite(f)) {
      // tail' = -pdf; Newton step, kept inside the bracket
      const double pdf = std::exp(fisher_log_pdf(x, k, m));
      next = (pdf > 0.0) ? x + f / pdf : 0.5 * (lo + hi);
    } else {
      next = 0.5 * (lo + hi);
    }
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 1e-14 * std::max(1.0, std::fabs(x))) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

double chi2_upper_tail(double x, int k) {
  if (x < 0.0) throw std::domain_error("chi2_upper_tail: x < 0");
  if (k < 1) throw std::domain_error("chi2_upper_tail: k < 1");
  return regularized_gamma_q(0.5 * k, 0.5 * x);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("normal_quantile: p outside (0,1)");
  // Wichura (1988), algorithm AS 241, PPND16.
  const double q = p - 0.5;
  double r;
  if (std::fabs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double v;
  if (r <= 5.0) {
    r -= 1.6;
    v = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
            3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
          4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
          2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    v = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
          5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -v : v;
}

}  // namespace flt
