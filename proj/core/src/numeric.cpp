#include "cvhar/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <utility>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "cvhar/error.hpp"

namespace cvhar::numeric {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

// Double precision throughout; the default promotion to long double is
// several times slower for the t quantile.
using FastPolicy = boost::math::policies::policy<boost::math::policies::promote_double<false>>;
using StudentT = boost::math::students_t_distribution<double, FastPolicy>;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

template <std::size_t N>
double gl_half_sum(double asr, double hk, double hs) {
  using rule = boost::math::quadrature::gauss<double, N>;
  const auto& x = rule::abscissa();
  const auto& w = rule::weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (double sgn : {-1.0, 1.0}) {
      const double sn = std::sin(asr * (sgn * x[i] + 1.0) / 2.0);
      sum += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
    }
  }
  return sum;
}

template <std::size_t N>
double gl_high_corr_sum(double a, double bs, double hk, double c, double d) {
  using rule = boost::math::quadrature::gauss<double, N>;
  const auto& x = rule::abscissa();
  const auto& w = rule::weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (double sgn : {-1.0, 1.0}) {
      const double xs = (a * (sgn * x[i] + 1.0)) * (a * (sgn * x[i] + 1.0));
      const double rs = std::sqrt(1.0 - xs);
      sum += a * w[i] *
             (std::exp(-bs / (2.0 * xs) - hk / (1.0 + rs)) / rs -
              std::exp(-(bs / xs + hk) / 2.0) * (1.0 + c * xs * (1.0 + d * xs)));
    }
  }
  return sum;
}

// Upper orthant probability P(X > h, Y > k).
double bvn_upper(double h, double k, double r) {
  const double ar = std::abs(r);
  double hk = h * k;
  double bvn = 0.0;
  if (ar < 0.925) {
    const double hs = (h * h + k * k) / 2.0;
    const double asr = std::asin(r);
    double sum;
    if (ar < 0.3) {
      sum = gl_half_sum<6>(asr, hk, hs);
    } else if (ar < 0.75) {
      sum = gl_half_sum<12>(asr, hk, hs);
    } else {
      sum = gl_half_sum<20>(asr, hk, hs);
    }
    return sum * asr / (4.0 * kPi) + normal_cdf(-h) * normal_cdf(-k);
  }
  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  if (ar < 1.0) {
    const double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    bvn = a * std::exp(-(bs / as + hk) / 2.0) *
          (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
    if (hk > -160.0) {
      const double b = std::sqrt(bs);
      bvn -= std::exp(-hk / 2.0) * std::sqrt(2.0 * kPi) * normal_cdf(-b / a) * b *
             (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a /= 2.0;
    bvn += gl_high_corr_sum<20>(a, bs, hk, c, d);
    bvn = -bvn / (2.0 * kPi);
  }
  if (r > 0.0) {
    bvn += normal_cdf(-std::max(h, k));
  } else {
    bvn = -bvn + std::max(0.0, normal_cdf(-h) - normal_cdf(-k));
  }
  return bvn;
}

// Merge sort of y counting the number of inversions (discordant swaps).
std::uint64_t sort_count_swaps(std::vector<double>& y, std::vector<double>& buf,
                               std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t swaps = sort_count_swaps(y, buf, lo, mid) + sort_count_swaps(y, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (y[j] < y[i]) {
      swaps += mid - i;
      buf[k++] = y[j++];
    } else {
      buf[k++] = y[i++];
    }
  }
  while (i < mid) buf[k++] = y[i++];
  while (j < hi) buf[k++] = y[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
            buf.begin() + static_cast<std::ptrdiff_t>(hi),
            y.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

std::uint64_t count_tied_pairs(const std::vector<double>& sorted) {
  std::uint64_t ties = 0;
  std::uint64_t run = 1;
  for (std::size_t i = 1; i <= sorted.size(); ++i) {
    if (i < sorted.size() && sorted[i] == sorted[i - 1]) {
      ++run;
    } else {
      ties += run * (run - 1) / 2;
      run = 1;
    }
  }
  return ties;
}

}  // namespace

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_quantile(double p) {
  require(p > 0.0 && p < 1.0, "normal_quantile: p must lie in (0,1)");
  return -kSqrt2 * boost::math::erfc_inv(2.0 * p);
}

double student_t_cdf(double x, double nu) {
  return boost::math::cdf(StudentT(nu), x);
}

double student_t_quantile(double p, double nu) {
  require(p > 0.0 && p < 1.0, "student_t_quantile: p must lie in (0,1)");
  return boost::math::quantile(StudentT(nu), p);
}

double student_t_log_pdf(double x, double nu) {
  return std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0) -
         0.5 * std::log(nu * kPi) - (nu + 1.0) / 2.0 * std::log1p(x * x / nu);
}

double chi_squared_sf(double x, double dof) {
  if (x <= 0.0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(dof), x));
}

double bivariate_normal_cdf(double x, double y, double rho) {
  require(rho >= -1.0 && rho <= 1.0, "bivariate_normal_cdf: rho outside [-1,1]");
  if (rho == 1.0) return normal_cdf(std::min(x, y));
  if (rho == -1.0) return std::max(0.0, normal_cdf(x) - normal_cdf(-y));
  const double p = bvn_upper(-x, -y, rho);
  return std::clamp(p, 0.0, 1.0);
}

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "kendall_tau: length mismatch");
  const std::size_t n = x.size();
  require(n >= 2, "kendall_tau: need at least two observations");

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = x[idx[i]];
    ys[i] = y[idx[i]];
  }

  const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t tx = count_tied_pairs(xs);
  // joint ties: consecutive runs equal in both coordinates
  std::uint64_t txy = 0;
  {
    std::uint64_t run = 1;
    for (std::size_t i = 1; i <= n; ++i) {
      if (i < n && xs[i] == xs[i - 1] && ys[i] == ys[i - 1]) {
        ++run;
      } else {
        txy += run * (run - 1) / 2;
        run = 1;
      }
    }
  }
  std::vector<double> buf(n);
  const std::uint64_t swaps = sort_count_swaps(ys, buf, 0, n);
  const std::uint64_t ty = count_tied_pairs(ys);

  const double denom = std::sqrt(static_cast<double>(n0 - tx) * static_cast<double>(n0 - ty));
  require(denom > 0.0, "kendall_tau: degenerate (constant) input");
  const double concordant_minus_discordant = static_cast<double>(n0) - static_cast<double>(tx) -
                                             static_cast<double>(ty) + static_cast<double>(txy) -
                                             2.0 * static_cast<double>(swaps);
  return concordant_minus_discordant / denom;
}

double mean(std::span<const double> x) {
  require(!x.empty(), "mean: empty input");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double median(std::vector<double> x) {
  require(!x.empty(), "median: empty input");
  const std::size_t n = x.size();
  const auto mid = x.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(x.begin(), mid, x.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(x.begin(), mid);
  return 0.5 * (lower + upper);
}

MinimizeResult minimize_bounded(const std::function<double(double)>& f, double lo, double hi,
                                int max_iter) {
  std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
  const auto [xmin, fmin] =
      boost::math::tools::brent_find_minima(f, lo, hi, std::numeric_limits<double>::digits / 2, iters);
  return {xmin, fmin};
}

double solve_bracketed(const std::function<double(double)>& f, double lo, double hi, double tol,
                       int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  require((flo < 0.0) != (fhi < 0.0), "solve_bracketed: root not bracketed");
  try {
    std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
    auto stop = [tol](double a, double b) { return std::abs(b - a) <= tol; };
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, iters);
    if (iters < static_cast<std::uintmax_t>(max_iter)) return 0.5 * (a + b);
  } catch (const std::exception&) {
    // fall through to bisection
  }
  for (int i = 0; i < 400 && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

QuadratureResult integrate_gauss_legendre(const std::function<double(double)>& f, double a,
                                          double b, const QuadratureOptions& opts) {
  using rule = boost::math::quadrature::gauss<double, 15>;
  const auto& x = rule::abscissa();
  const auto& w = rule::weights();

  auto composite = [&](int panels) {
    const double width = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double centre = a + (p + 0.5) * width;
      const double half = 0.5 * width;
      double s = w[0] * f(centre);  // odd rule: abscissa()[0] == 0
      for (std::size_t i = 1; i < x.size(); ++i) {
        s += w[i] * (f(centre - half * x[i]) + f(centre + half * x[i]));
      }
      total += s * half;
    }
    return total;
  };

  QuadratureResult out;
  if (b == a) {
    out.converged = true;
    return out;
  }
  int panels = std::max(1, opts.initial_panels);
  double prev = composite(panels);
  while (panels < opts.max_panels) {
    panels *= 2;
    const double cur = composite(panels);
    const double err = std::abs(cur - prev);
    out.value = cur;
    out.error_estimate = err;
    out.panels = panels;
    if (err <= std::max(opts.abs_tol, opts.rel_tol * std::abs(cur))) {
      out.converged = true;
      return out;
    }
    prev = cur;
  }
  return out;
}

}  // namespace cvhar::numeric
