// SPDX-License-Identifier: Apache-2.0
#include "kamreduce/approxfn.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/binomial.hpp>

#include "kamreduce/errors.hpp"

namespace kamreduce
{

namespace
{

constexpr auto GRID_POINTS = 4096;
constexpr auto GRID_TOP = 1.0e9;
constexpr auto GRID_BOTTOM = 1.0e-6;
constexpr auto REFINE_TOL = 1.0e-12;
constexpr auto XI_FLOOR = 1.0e-15;
constexpr auto QUAD_TOL = 1.0e-12;
constexpr auto XI_T_CAP = 1.0e300;
constexpr std::size_t XI_MAX_TERMS = 4096;

double integrate_log_scale(const std::function<double(double)> &g, double a, double b)
{
  // int_a^b g(t) dt with t = e^u.
  auto f = [&](double u) { const double t = std::exp(u); return g(t) * t; };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, std::log(a), std::log(b), 20, QUAD_TOL);
}

double integrate_log_to_infinity(const std::function<double(double)> &h, double a)
{
  // int_{log a}^inf h(u) du; h must be finite for all u.
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(h, std::log(a), std::numeric_limits<double>::infinity(), QUAD_TOL);
}

// log(1 + e^u) without overflow.
double log1p_exp(double u)
{
  return u > 30.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

// delta(t)/t = log((1+t)^2 Delta^3(t)) / t at t = e^u.
double delta_ratio_at_log(const ApproximationFunction &af, double u)
{
  return 2.0 * log1p_exp(u) * std::exp(-u) + 3.0 * af.log_delta_ratio_at_log(u);
}

}  // namespace

ApproximationFunction ApproximationFunction::power(double alpha)
{
  if (!(alpha > 0.0 && alpha < 1.0))
  {
    throw DomainError("power family needs 0 < alpha < 1");
  }
  return {AfFamily::Power, alpha};
}

ApproximationFunction ApproximationFunction::log_damped(double alpha)
{
  if (!(alpha > 1.0))
  {
    throw DomainError("logdamped family needs alpha > 1");
  }
  return {AfFamily::LogDamped, alpha};
}

ApproximationFunction ApproximationFunction::log_power(double alpha)
{
  if (!(alpha > 1.0))
  {
    throw DomainError("logpower family needs alpha > 1");
  }
  return {AfFamily::LogPower, alpha};
}

ApproximationFunction ApproximationFunction::constant()
{
  return {AfFamily::Constant, 0.0};
}

ApproximationFunction ApproximationFunction::tabulated(std::vector<std::pair<double, double>> table)
{
  if (table.size() < 2 || table.front().first != 0.0 || table.front().second != 1.0)
  {
    throw DomainError("tabulated family needs at least two points starting at (0, 1)");
  }
  ApproximationFunction af(AfFamily::Tabulated, 0.0);
  for (std::size_t i = 0; i < table.size(); ++i)
  {
    const auto [t, d] = table[i];
    if (i > 0 && !(t > table[i - 1].first))
    {
      throw DomainError("tabulated t must be strictly increasing");
    }
    if (!(d >= 1.0) || (i > 0 && d < table[i - 1].second))
    {
      throw DomainError("tabulated Delta must be >= 1 and non-decreasing");
    }
    af.table_t_.push_back(t);
    af.table_log_.push_back(std::log(d));
  }
  return af;
}

std::string ApproximationFunction::name() const
{
  switch (family_)
  {
    case AfFamily::Power: return "power";
    case AfFamily::LogDamped: return "logdamped";
    case AfFamily::LogPower: return "logpower";
    case AfFamily::Constant: return "constant";
    case AfFamily::Tabulated: return "tabulated";
  }
  return "unknown";
}

double ApproximationFunction::onset() const
{
  switch (family_)
  {
    case AfFamily::LogPower: return std::exp(alpha_);
    case AfFamily::Tabulated: return table_t_[1];
    default: return 0.0;
  }
}

double ApproximationFunction::log_delta(double t) const
{
  if (!(t >= 0.0))
  {
    throw DomainError("approximation function evaluated at negative t");
  }
  switch (family_)
  {
    case AfFamily::Power:
      return std::pow(t, alpha_) / alpha_;
    case AfFamily::LogDamped:
      return t / (1.0 + std::pow(std::log1p(t), alpha_));
    case AfFamily::LogPower:
    {
      const double t0 = std::exp(alpha_);
      if (t < t0)
      {
        return t * std::pow(alpha_, -alpha_);
      }
      return t / std::pow(std::log(t), alpha_);
    }
    case AfFamily::Constant:
      return 0.0;
    case AfFamily::Tabulated:
    {
      const auto &ts = table_t_;
      if (t >= ts.back())
      {
        return table_log_.back() * (t / ts.back());
      }
      const auto it = std::upper_bound(ts.begin(), ts.end(), t);
      const std::size_t hi = static_cast<std::size_t>(it - ts.begin());
      const std::size_t lo = hi - 1;
      const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
      return (1.0 - w) * table_log_[lo] + w * table_log_[hi];
    }
  }
  return 0.0;
}

double ApproximationFunction::log_delta_ratio_at_log(double u) const
{
  switch (family_)
  {
    case AfFamily::Power:
      return std::exp(u * (alpha_ - 1.0)) / alpha_;
    case AfFamily::LogDamped:
      return 1.0 / (1.0 + std::pow(log1p_exp(u), alpha_));
    case AfFamily::LogPower:
      return u < alpha_ ? std::pow(alpha_, -alpha_) : std::pow(u, -alpha_);
    case AfFamily::Constant:
      return 0.0;
    case AfFamily::Tabulated:
    {
      const double t = std::exp(u);
      if (t >= table_t_.back())
      {
        return table_log_.back() / table_t_.back();
      }
      return log_delta(t) / t;
    }
  }
  return 0.0;
}

double ApproximationFunction::dlog_delta(double t) const
{
  if (!(t >= 0.0))
  {
    throw DomainError("approximation function evaluated at negative t");
  }
  switch (family_)
  {
    case AfFamily::Power:
      return t == 0.0 ? std::numeric_limits<double>::infinity() : std::pow(t, alpha_ - 1.0);
    case AfFamily::LogDamped:
    {
      const double l = std::log1p(t);
      const double den = 1.0 + std::pow(l, alpha_);
      const double dden = t == 0.0 ? 0.0 : alpha_ * std::pow(l, alpha_ - 1.0) / (1.0 + t);
      return (den - t * dden) / (den * den);
    }
    case AfFamily::LogPower:
    {
      const double t0 = std::exp(alpha_);
      if (t < t0)
      {
        return std::pow(alpha_, -alpha_);
      }
      const double l = std::log(t);
      return (1.0 - alpha_ / l) / std::pow(l, alpha_);
    }
    case AfFamily::Constant:
      return 0.0;
    case AfFamily::Tabulated:
    {
      const auto &ts = table_t_;
      if (t >= ts.back())
      {
        return table_log_.back() / ts.back();
      }
      const auto it = std::upper_bound(ts.begin(), ts.end(), t);
      const std::size_t hi = static_cast<std::size_t>(it - ts.begin());
      const std::size_t lo = hi - 1;
      return (table_log_[hi] - table_log_[lo]) / (ts[hi] - ts[lo]);
    }
  }
  return 0.0;
}

double eval_delta(const ApproximationFunction &af, double t)
{
  return std::exp(af.log_delta(t));
}

ValidationReport validate_af(const ApproximationFunction &af, double t_max, int n_grid,
                             int exponent)
{
  if (!(t_max > 1.0) || n_grid < 16)
  {
    throw DomainError("validate_af needs t_max > 1 and n_grid >= 16");
  }
  ValidationReport rep;
  rep.onset = af.onset();
  rep.exponent = exponent;

  // Grid: 0 plus log-spaced points on [1e-3, t_max].
  std::vector<double> grid{0.0};
  const double lo = std::log(1.0e-3), hi = std::log(t_max);
  for (int i = 0; i < n_grid - 1; ++i)
  {
    grid.push_back(std::exp(lo + (hi - lo) * i / (n_grid - 2)));
  }
  double prev_delta = 0.0, prev_ratio = std::numeric_limits<double>::infinity();
  for (double t : grid)
  {
    const double d = eval_delta(af, t);
    if (d < prev_delta)
    {
      rep.monotone = false;
    }
    prev_delta = d;
    if (t > 0.0 && t >= rep.onset)
    {
      const double ratio = af.log_delta(t) / t;
      if (ratio > prev_ratio * (1.0 + 1.0e-12) + 1.0e-300)
      {
        rep.log_ratio_decreasing = false;
      }
      prev_ratio = ratio;
    }
  }

  // Brjuno integral on [1, t_max] and doubling increments for the tail.
  auto g = [&](double t) { return af.log_delta(t) / std::pow(t, exponent); };
  const double i4 = integrate_log_scale(g, 1.0, t_max / 4.0);
  const double i2 = integrate_log_scale(g, 1.0, t_max / 2.0);
  const double i1 = integrate_log_scale(g, 1.0, t_max);
  rep.integral = i1;
  const double d1 = i2 - i4, d2 = i1 - i2;
  const double scale = std::max(1.0, std::abs(i1));
  if (std::abs(d2) <= 1.0e-13 * scale)
  {
    rep.converged = true;
    rep.tail_estimate = 0.0;
  }
  else
  {
    const double q = d2 / d1;
    if (d1 > 0.0 && q > 0.0 && q < 0.99)
    {
      rep.converged = true;
      rep.tail_estimate = d2 * q / (1.0 - q);
    }
    else
    {
      rep.divergent = true;
      rep.tail_estimate = std::numeric_limits<double>::infinity();
    }
  }
  return rep;
}

GammaResult log_gamma_ab(const ApproximationFunction &af, const GammaQuery &q)
{
  if (!(q.sigma > 0.0) || q.a < 0 || q.b < 0)
  {
    throw DomainError("gamma_ab needs sigma > 0 and non-negative exponents");
  }
  auto f = [&](double t) { return q.a * std::log1p(t) + q.b * af.log_delta(t) - q.sigma * t; };

  // First grid on [0, 1e9]; if the maximum sits at its end, continue on [1e9, 1e300].
  const std::pair<double, double> ranges[] = {{GRID_BOTTOM, GRID_TOP}, {GRID_TOP, 1.0e300}};
  for (int pass = 0; pass < 2; ++pass)
  {
    std::vector<double> ts(GRID_POINTS);
    ts[0] = pass == 0 ? 0.0 : ranges[0].second;
    const double lo = std::log(ranges[pass].first), hi = std::log(ranges[pass].second);
    for (int i = 1; i < GRID_POINTS; ++i)
    {
      ts[i] = std::exp(lo + (hi - lo) * (i - 1) / (GRID_POINTS - 2));
    }
    std::size_t best = 0;
    double fbest = f(ts[0]);
    for (std::size_t i = 1; i < ts.size(); ++i)
    {
      const double v = f(ts[i]);
      if (v > fbest)
      {
        fbest = v;
        best = i;
      }
    }
    if (best + 1 == ts.size())
    {
      continue;
    }
    // Golden section on the bracketing cell.
    double a = best == 0 ? ts[0] : ts[best - 1];
    double b = ts[best + 1];
    constexpr double invphi = 0.6180339887498949;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 400 && b - a > REFINE_TOL * (1.0 + b); ++it)
    {
      if (fc >= fd)
      {
        b = d;
        d = c;
        fd = fc;
        c = b - invphi * (b - a);
        fc = f(c);
      }
      else
      {
        a = c;
        c = d;
        fc = fd;
        d = a + invphi * (b - a);
        fd = f(d);
      }
    }
    GammaResult r{fbest, ts[best]};
    for (double t : {a, b, c, d})
    {
      const double v = f(t);
      if (v > r.log_value)
      {
        r = {v, t};
      }
    }
    return r;
  }
  throw OverflowError("gamma_ab: supremum not bracketed (Delta grows too fast for sigma)");
}

double gamma_ab(const ApproximationFunction &af, const GammaQuery &q)
{
  const auto r = log_gamma_ab(af, q);
  if (r.log_value > 709.0)
  {
    throw OverflowError("gamma_ab exceeds double range; use log_gamma_ab");
  }
  return std::exp(r.log_value);
}

double xi_precondition(const ApproximationFunction &af, double kappa, double T)
{
  if (!(kappa > 1.0) || !(T > 0.0))
  {
    throw DomainError("xi schedule needs kappa > 1 and T > 0");
  }
  auto h = [&](double u) { return delta_ratio_at_log(af, u); };
  const double v = integrate_log_to_infinity(h, T);
  return v / std::log(kappa);
}

double XiSchedule::sum() const
{
  double acc = 0.0;
  for (double s : sigma)
  {
    acc += s;
  }
  return acc;
}

XiSchedule xi_schedule(const ApproximationFunction &af, double sigma, double kappa, double T)
{
  if (!(sigma > 0.0))
  {
    throw DomainError("xi schedule needs sigma > 0");
  }
  XiSchedule out;
  out.sigma_total = sigma;
  out.kappa = kappa;
  out.T = T;
  out.precondition = xi_precondition(af, kappa, T);
  if (!(out.precondition < sigma))
  {
    throw InfeasibleScheduleError("xi schedule infeasible: enlarge sigma or T");
  }
  double t = kappa * T;
  while (t < XI_T_CAP && out.sigma.size() < XI_MAX_TERMS)
  {
    const double s = delta_ratio_at_log(af, std::log(t));
    if (s < XI_FLOOR * sigma)
    {
      break;
    }
    out.sigma.push_back(s);
    t *= kappa;
  }
  if (out.sigma.empty())
  {
    throw InfeasibleScheduleError("xi schedule produced no admissible terms");
  }
  // Fold the remainder (bounded by the integral tail) into the last term.
  const double t_last = T * std::pow(kappa, static_cast<double>(out.sigma.size()));
  out.sigma.back() += xi_precondition(af, kappa, t_last);

  double log_xi = 0.0, weight = 1.0;
  for (double s : out.sigma)
  {
    weight /= kappa;
    log_xi += weight * log_gamma_ab(af, {2, 3, s}).log_value;
  }
  out.log_xi = log_xi;
  out.log_bound = sigma * T;
  out.certified = log_xi <= out.log_bound + std::log1p(1.0e-6);
  return out;
}

double xi_auto_T(const ApproximationFunction &af, double sigma, double kappa)
{
  for (int m = 0; m < 200; ++m)
  {
    const double T = std::ldexp(1.0, m);
    if (xi_precondition(af, kappa, T) < sigma)
    {
      return T;
    }
  }
  throw InfeasibleScheduleError("no feasible T found for the xi schedule");
}

double lattice_shell_count(int n, int m)
{
  if (m == 0)
  {
    return 1.0;
  }
  double acc = 0.0;
  for (int i = 1; i <= std::min(n, m); ++i)
  {
    acc += std::ldexp(1.0, i) * boost::math::binomial_coefficient<double>(n, i) *
           boost::math::binomial_coefficient<double>(m - 1, i - 1);
  }
  return acc;
}

BrjunoSum brjuno_sum(const ApproximationFunction &af, int n, int k_max)
{
  if (n < 1 || k_max < 1)
  {
    throw DomainError("brjuno_sum needs n >= 1 and K_max >= 1");
  }
  BrjunoSum out;
  for (int m = 0; m <= k_max; ++m)
  {
    out.partial += lattice_shell_count(n, m) * std::exp(-0.5 * af.log_delta(m));
  }
  // Summability proviso: t^n / sqrt(Delta(t)) -> 0.
  auto lg = [&](double t) { return n * std::log(t) - 0.5 * af.log_delta(t); };
  const double v6 = lg(1.0e6), v9 = lg(1.0e9), v12 = lg(1.0e12);
  out.summable = v9 < v6 && v12 < v9 && v12 < -10.0;
  if (!out.summable)
  {
    out.tail_bound = std::numeric_limits<double>::infinity();
    return out;
  }
  auto h = [&](double u) {
    const double t = std::exp(u);
    if (!std::isfinite(t))
    {
      return 0.0;
    }
    double log_binom = 0.0;
    for (int i = 1; i <= n; ++i)
    {
      log_binom += std::log((t + i) / i);
    }
    const double slope = af.dlog_delta(t);
    if (!(slope > 0.0))
    {
      return 0.0;
    }
    const double v = std::exp(log_binom + std::log(0.5 * slope * t) - 0.5 * af.log_delta(t));
    return std::isfinite(v) ? v : 0.0;
  };
  out.tail_bound = std::ldexp(1.0, n) * integrate_log_to_infinity(h, static_cast<double>(k_max));
  return out;
}

double brjuno_total(const ApproximationFunction &af, int n, int k_max)
{
  const auto s = brjuno_sum(af, n, k_max);
  if (!s.summable || !std::isfinite(s.tail_bound))
  {
    throw SummabilityError("Brjuno sum is not summable for this approximation function");
  }
  return s.partial + s.tail_bound;
}

}  // namespace kamreduce
