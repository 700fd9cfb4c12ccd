// SPDX-License-Identifier: Apache-2.0
#include "kamreduce/lattice.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "kamreduce/errors.hpp"

namespace kamreduce
{

DivisorViolation::DivisorViolation(std::vector<int> k, int i, int j, double value,
                                   double threshold)
  : Error("divisor below threshold"), k_(std::move(k)), i_(i), j_(j), value_(value),
    threshold_(threshold)
{
}

FourierLattice::FourierLattice(int dim, int capacity)
  : dim_(dim), capacity_(capacity), side_(2 * capacity + 1)
{
  if (dim < 1 || capacity < 0)
  {
    throw std::invalid_argument("lattice needs dim >= 1 and capacity >= 0");
  }
  std::size_t box = 1;
  for (int d = 0; d < dim_; ++d)
  {
    box *= static_cast<std::size_t>(side_);
  }
  std::vector<std::vector<std::size_t>> shells(capacity_ + 1);
  std::vector<int> k(dim_);
  for (std::size_t b = 0; b < box; ++b)
  {
    std::size_t rest = b;
    int norm = 0;
    for (int d = dim_ - 1; d >= 0; --d)
    {
      k[d] = static_cast<int>(rest % side_) - capacity_;
      rest /= side_;
      norm += std::abs(k[d]);
    }
    if (norm <= capacity_)
    {
      shells[norm].push_back(b);
    }
  }
  box_.assign(box, npos);
  for (int m = 0; m <= capacity_; ++m)
  {
    for (auto b : shells[m])
    {
      box_[b] = l1_.size();
      l1_.push_back(m);
      std::size_t rest = b;
      std::vector<int> kk(dim_);
      for (int d = dim_ - 1; d >= 0; --d)
      {
        kk[d] = static_cast<int>(rest % side_) - capacity_;
        rest /= side_;
      }
      modes_.insert(modes_.end(), kk.begin(), kk.end());
    }
  }
  negation_.resize(size());
  std::vector<int> neg(dim_);
  for (std::size_t i = 0; i < size(); ++i)
  {
    auto m = mode(i);
    for (int d = 0; d < dim_; ++d)
    {
      neg[d] = -m[d];
    }
    negation_[i] = index(neg);
  }
}

std::size_t FourierLattice::index(std::span<const int> k) const
{
  std::size_t b = 0;
  int norm = 0;
  for (int d = 0; d < dim_; ++d)
  {
    norm += std::abs(k[d]);
    if (norm > capacity_)
    {
      return npos;
    }
    b = b * side_ + static_cast<std::size_t>(k[d] + capacity_);
  }
  return box_[b];
}

std::size_t FourierLattice::sum(std::size_t a, std::size_t b) const
{
  auto ka = mode(a);
  auto kb = mode(b);
  std::size_t box = 0;
  int norm = 0;
  for (int d = 0; d < dim_; ++d)
  {
    const int s = ka[d] + kb[d];
    norm += std::abs(s);
    if (norm > capacity_)
    {
      return npos;
    }
    box = box * side_ + static_cast<std::size_t>(s + capacity_);
  }
  return box_[box];
}

LatticePtr make_lattice(int dim, int capacity)
{
  return std::make_shared<const FourierLattice>(dim, capacity);
}

double coeff_fourier_norm(const FourierLattice &lat, std::span<const cplx> f, double r)
{
  double acc = 0.0;
  for (std::size_t i = 0; i < lat.size(); ++i)
  {
    if (f[i] != cplx{})
    {
      acc += std::abs(f[i]) * std::exp(lat.l1(i) * r);
    }
  }
  return acc;
}

double gradient_fourier_norm(const FourierLattice &lat, std::span<const cplx> f, double r)
{
  double acc = 0.0;
  for (std::size_t i = 0; i < lat.size(); ++i)
  {
    if (f[i] != cplx{})
    {
      acc += lat.l1(i) * std::abs(f[i]) * std::exp(lat.l1(i) * r);
    }
  }
  return acc;
}

double sampled_fourier_norm(const FourierLattice &lat, std::span<const Series> samples,
                            double step, double r)
{
  if (samples.empty())
  {
    return 0.0;
  }
  double acc = 0.0;
  const std::size_t ns = samples.size();
  for (std::size_t i = 0; i < lat.size(); ++i)
  {
    double sup = 0.0;
    for (std::size_t s = 0; s < ns; ++s)
    {
      double deriv = 0.0;
      if (ns >= 2 && step > 0.0)
      {
        // One-sided at the ends, central inside.
        const std::size_t lo = s == 0 ? 0 : s - 1;
        const std::size_t hi = s + 1 == ns ? s : s + 1;
        deriv = std::abs(samples[hi][i] - samples[lo][i]) / (step * double(hi - lo));
      }
      sup = std::max(sup, std::abs(samples[s][i]) + deriv);
    }
    acc += sup * std::exp(lat.l1(i) * r);
  }
  return acc;
}

cplx evaluate(const FourierLattice &lat, std::span<const cplx> f, std::span<const double> theta)
{
  cplx acc{};
  for (std::size_t i = 0; i < lat.size(); ++i)
  {
    if (f[i] == cplx{})
    {
      continue;
    }
    const double phase = dot_compensated(lat.mode(i), theta);
    acc += f[i] * std::polar(1.0, phase);
  }
  return acc;
}

double dot_compensated(std::span<const int> k, std::span<const double> x)
{
  // Neumaier summation of exact products (fma recovers the product error).
  double sum = 0.0, comp = 0.0;
  for (std::size_t d = 0; d < k.size(); ++d)
  {
    const double a = static_cast<double>(k[d]);
    const double prod = a * x[d];
    const double perr = std::fma(a, x[d], -prod);
    const double t = sum + prod;
    if (std::abs(sum) >= std::abs(prod))
    {
      comp += (sum - t) + prod;
    }
    else
    {
      comp += (prod - t) + sum;
    }
    sum = t;
    comp += perr;
  }
  return sum + comp;
}

}  // namespace kamreduce
