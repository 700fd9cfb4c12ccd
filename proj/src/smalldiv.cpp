// SPDX-License-Identifier: Apache-2.0
#include "kamreduce/smalldiv.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <thread>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/factorials.hpp>

#include "kamreduce/errors.hpp"

namespace kamreduce
{

namespace
{

constexpr double TWO_PI = 2.0 * std::numbers::pi;

// Everything about a scan that does not depend on omega.
struct ScanContext
{
  FourierLattice lattice;
  std::vector<double> delta_by_l1;  // Delta(m), m = 0..K
  std::vector<double> Omega;        // Omega_1..Omega_J, 0-based
  bool increasing = false;
  double A2 = 1.0;

  ScanContext(int dim, const NormalForm &N, const ResonanceQuery &q)
    : lattice(dim, q.K), delta_by_l1(q.K + 1), Omega(q.J), A2(q.A2)
  {
    if (q.K < 1 || q.J < 1)
    {
      throw DomainError("divisor scan needs K, J >= 1");
    }
    if (N.modes() < q.J)
    {
      throw DomainError("normal form has fewer modes than the query");
    }
    for (int m = 0; m <= q.K; ++m)
    {
      delta_by_l1[m] = std::exp(q.af.log_delta(m));
    }
    for (int j = 1; j <= q.J; ++j)
    {
      Omega[j - 1] = N.frequency(j);
    }
    increasing = std::adjacent_find(Omega.begin(), Omega.end(), std::greater_equal<>{}) == Omega.end();
  }

  int J() const { return static_cast<int>(Omega.size()); }
  int range(int l1) const { return static_cast<int>(std::floor(A2 * l1 + 1e-12)); }
};

struct Tracker
{
  DivisorScan best;
  void offer(double divisor, double weight, std::size_t k_idx, const FourierLattice &lat, int i, int j,
             DivisorType type)
  {
    const double v = std::abs(divisor) * weight;
    if (v < best.value)
    {
      best.value = v;
      best.divisor = divisor;
      const auto k = lat.mode(k_idx);
      best.site = {std::vector<int>(k.begin(), k.end()), i, j, type};
    }
  }
};

// Index in [lo, hi) of the entry of the increasing array v nearest to x.
int nearest(const std::vector<double> &v, int lo, int hi, double x)
{
  const auto it = std::lower_bound(v.begin() + lo, v.begin() + hi, x);
  int idx = static_cast<int>(it - v.begin());
  if (idx == hi)
  {
    return hi - 1;
  }
  if (idx > lo && x - v[idx - 1] <= v[idx] - x)
  {
    return idx - 1;
  }
  return idx;
}

DivisorScan scan(const ScanContext &ctx, std::span<const double> omega, double stop_below)
{
  const auto &lat = ctx.lattice;
  const auto &Om = ctx.Omega;
  const int J = ctx.J();
  const double om_min = *std::min_element(Om.begin(), Om.end());
  Tracker tr;
  for (std::size_t idx = 0; idx < lat.size(); ++idx)
  {
    const int l1 = lat.l1(idx);
    const double D = ctx.delta_by_l1[l1];
    const double kw = dot_compensated(lat.mode(idx), omega);
    if (l1 > 0)
    {
      tr.offer(kw, D, idx, lat, 0, 0, DivisorType::Frequency);
    }
    // Plus family: skip when even the smallest pair cannot beat the running minimum.
    if (!((kw + 2.0 * om_min) * D >= tr.best.value))
    {
      for (int i = 1; i <= J; ++i)
      {
        if (ctx.increasing)
        {
          const int j = nearest(Om, 0, J, -kw - Om[i - 1]) + 1;
          tr.offer(kw + Om[i - 1] + Om[j - 1], D, idx, lat, i, j, DivisorType::Plus);
        }
        else
        {
          for (int j = 1; j <= J; ++j)
          {
            tr.offer(kw + Om[i - 1] + Om[j - 1], D, idx, lat, i, j, DivisorType::Plus);
          }
        }
      }
    }
    // Minus family: |i - j| <= A2 |k|, so nothing at k = 0.
    const int R = ctx.range(l1);
    if (l1 > 0)
    {
      for (int i = 1; i <= J; ++i)
      {
        const int lo = std::max(1, i - R), hi = std::min(J, i + R);
        if (ctx.increasing)
        {
          const int j = nearest(Om, lo - 1, hi, kw + Om[i - 1]) + 1;
          tr.offer(kw + Om[i - 1] - Om[j - 1], D, idx, lat, i, j, DivisorType::Minus);
        }
        else
        {
          for (int j = lo; j <= hi; ++j)
          {
            tr.offer(kw + Om[i - 1] - Om[j - 1], D, idx, lat, i, j, DivisorType::Minus);
          }
        }
      }
    }
    if (tr.best.value < stop_below)
    {
      break;
    }
  }
  return tr.best;
}

}  // namespace

std::string to_string(DivisorType t)
{
  switch (t)
  {
    case DivisorType::Frequency:
      return "frequency";
    case DivisorType::Plus:
      return "plus";
    case DivisorType::Minus:
      return "minus";
  }
  return "unknown";
}

DivisorScan scan_divisors(std::span<const double> omega, const NormalForm &N, const ResonanceQuery &q,
                          double stop_below)
{
  const ScanContext ctx(static_cast<int>(omega.size()), N, q);
  return scan(ctx, omega, stop_below);
}

DivisorScan scan_divisors_exhaustive(std::span<const double> omega, const NormalForm &N,
                                     const ResonanceQuery &q)
{
  const FourierLattice lat(static_cast<int>(omega.size()), q.K);
  Tracker tr;
  for (std::size_t idx = 0; idx < lat.size(); ++idx)
  {
    const int l1 = lat.l1(idx);
    const double D = std::exp(q.af.log_delta(l1));
    double kw = 0.0;
    for (std::size_t h = 0; h < omega.size(); ++h)
    {
      kw += lat.mode(idx)[h] * omega[h];
    }
    if (l1 > 0)
    {
      tr.offer(kw, D, idx, lat, 0, 0, DivisorType::Frequency);
    }
    for (int i = 1; i <= q.J; ++i)
    {
      for (int j = 1; j <= q.J; ++j)
      {
        tr.offer(kw + N.frequency(i) + N.frequency(j), D, idx, lat, i, j, DivisorType::Plus);
        if ((i != j || l1 > 0) && std::abs(i - j) <= q.A2 * l1 + 1e-12)
        {
          tr.offer(kw + N.frequency(i) - N.frequency(j), D, idx, lat, i, j, DivisorType::Minus);
        }
      }
    }
  }
  return tr.best;
}

MarginReport min_margin(std::span<const double> omega, const NormalForm &N, const ResonanceQuery &q)
{
  if (!(q.gamma > 0.0))
  {
    throw DomainError("min_margin needs gamma > 0");
  }
  const auto s = scan_divisors(omega, N, q);
  return {s.value / q.gamma, s.divisor, s.site};
}

double gap_slope(const NormalForm &N)
{
  double a1 = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= N.modes(); ++i)
  {
    for (int j = i + 1; j <= N.modes(); ++j)
    {
      a1 = std::min(a1, std::abs(N.frequency(i) - N.frequency(j)) / (j - i));
    }
  }
  return a1;
}

double pair_range_constant(const NormalForm &N)
{
  const double a1 = gap_slope(N);
  if (!(a1 > 0.0))
  {
    throw DomainError("normal frequencies are not separated; A2 undefined");
  }
  return std::max(1.0, (1.0 + 2.0 * a1 + 2.0 * N.shift_bound) / a1);
}

std::vector<double> parameter_grid(int grid)
{
  if (grid < 1)
  {
    throw DomainError("grid must be positive");
  }
  std::vector<double> g(grid);
  for (int m = 0; m < grid; ++m)
  {
    g[m] = TWO_PI * (m + 0.5) / grid;
  }
  return g;
}

std::vector<double> excluded_fractions(const ResonanceQuery &q, std::span<const double> gammas,
                                       const NormalFormBuilder &builder, int dim, int grid, int threads)
{
  if (dim < 1)
  {
    throw DomainError("excluded_fraction needs dim >= 1");
  }
  const auto axis = parameter_grid(grid);
  std::size_t total = 1;
  for (int h = 0; h < dim; ++h)
  {
    total *= static_cast<std::size_t>(grid);
  }
  std::vector<double> minima(total);

  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<double> omega(dim), freq(q.J);
    // Consecutive samples with the same normal frequencies share one context.
    std::optional<ScanContext> shared;
    for (std::size_t s = begin; s < end; ++s)
    {
      std::size_t rest = s;
      for (int h = 0; h < dim; ++h)
      {
        omega[h] = axis[rest % grid];
        rest /= grid;
      }
      const auto N = builder(omega);
      for (int j = 1; j <= std::min(q.J, N.modes()); ++j)
      {
        freq[j - 1] = N.frequency(j);
      }
      if (!shared || shared->Omega != freq)
      {
        shared.emplace(dim, N, q);
      }
      minima[s] = scan(*shared, omega, -1.0).value;
    }
  };

  threads = std::max(1, threads);
  if (threads == 1 || total < 1024)
  {
    work(0, total);
  }
  else
  {
    std::vector<std::thread> pool;
    const std::size_t chunk = (total + threads - 1) / threads;
    for (int t = 0; t < threads; ++t)
    {
      const std::size_t b = t * chunk, e = std::min(total, b + chunk);
      if (b < e)
      {
        pool.emplace_back(work, b, e);
      }
    }
    for (auto &th : pool)
    {
      th.join();
    }
  }

  std::vector<double> out;
  for (double g : gammas)
  {
    const auto bad = std::count_if(minima.begin(), minima.end(), [g](double m) { return m < g; });
    out.push_back(static_cast<double>(bad) / static_cast<double>(total));
  }
  return out;
}

double excluded_fraction(const ResonanceQuery &q, const NormalFormBuilder &builder, int dim, int grid,
                         int threads)
{
  const double g[] = {q.gamma};
  return excluded_fractions(q, g, builder, dim, grid, threads).front();
}

double union_bound(const ResonanceQuery &q, const NormalForm &N, int dim)
{
  const FourierLattice lat(dim, q.K);
  double total = 0.0;
  auto strip = [&](std::size_t idx, double c, double thr) {
    const auto k = lat.mode(idx);
    double lo = c, hi = c;
    int kinf = 0;
    for (int v : k)
    {
      (v > 0 ? hi : lo) += v * TWO_PI;
      kinf = std::max(kinf, std::abs(v));
    }
    if (kinf == 0)
    {
      return std::abs(c) < thr ? 1.0 : 0.0;
    }
    if (lo > thr || hi < -thr)
    {
      return 0.0;
    }
    return std::min(1.0, 2.0 * thr / (kinf * TWO_PI));
  };
  for (std::size_t idx = 0; idx < lat.size(); ++idx)
  {
    const int l1 = lat.l1(idx);
    const double thr = q.gamma / std::exp(q.af.log_delta(l1));
    if (l1 > 0)
    {
      total += strip(idx, 0.0, thr);
    }
    for (int i = 1; i <= q.J; ++i)
    {
      for (int j = i; j <= q.J; ++j)
      {
        total += strip(idx, N.frequency(i) + N.frequency(j), thr);
      }
      for (int j = 1; j <= q.J; ++j)
      {
        if ((i != j || l1 > 0) && std::abs(i - j) <= q.A2 * l1 + 1e-12)
        {
          total += strip(idx, N.frequency(i) - N.frequency(j), thr);
        }
      }
    }
    if (total >= 1.0)
    {
      return 1.0;
    }
  }
  return std::min(1.0, total);
}

SlopeFit fit_loglog(std::span<const double> gammas, std::span<const double> fractions)
{
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < std::min(gammas.size(), fractions.size()); ++i)
  {
    if (!(fractions[i] > 0.0))
    {
      continue;
    }
    const double x = std::log(gammas[i]), y = std::log(fractions[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  SlopeFit fit;
  fit.points = n;
  if (n >= 2)
  {
    const double den = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / den;
    fit.intercept = (sy - fit.slope * sx) / n;
  }
  return fit;
}

RussmannReport russmann_check(const std::function<double(double)> &f, double a, double b, int q,
                              double beta, double eps, int samples)
{
  if (!(b > a) || q < 1 || !(beta > 0.0) || !(eps > 0.0) || samples < 2)
  {
    throw DomainError("russmann_check needs a < b, q >= 1, beta > 0, eps > 0, samples >= 2");
  }
  RussmannReport rep;
  const double h = (b - a) / samples;
  // Step balancing truncation against rounding in the q-th difference.
  const double fd = (b - a) * std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (q + 2));
  int hits = 0;
  rep.precondition_verified = true;
  for (int m = 0; m < samples; ++m)
  {
    const double t = a + (m + 0.5) * h;
    if (std::abs(f(t)) <= eps)
    {
      ++hits;
    }
    // Central q-th difference.
    double d = 0.0;
    for (int l = 0; l <= q; ++l)
    {
      const double c = boost::math::binomial_coefficient<double>(q, l) * ((l % 2) ? -1.0 : 1.0);
      d += c * f(t + (0.5 * q - l) * fd);
    }
    d /= std::pow(fd, q);
    if (std::abs(d) < beta * (1.0 - 1e-4))
    {
      rep.precondition_verified = false;
    }
  }
  rep.measured = hits * h;
  rep.bound = 4.0 * std::pow(boost::math::factorial<double>(q) * eps / (2.0 * beta), 1.0 / q);
  // {|f| <= eps} has at most q components when f^(q) has no zero; each end costs one cell.
  rep.slack = 2.0 * q * h;
  return rep;
}

}  // namespace kamreduce
