// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace kamreduce
{

using cplx = std::complex<double>;

// The index set {k in Z^n : |k|_1 <= K_cap}, enumerated shell by shell so that
// index 0 is k = 0. Lookups go through a dense (2K_cap+1)^n box.
class FourierLattice
{
public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  FourierLattice(int dim, int capacity);

  int dim() const { return dim_; }
  int capacity() const { return capacity_; }
  std::size_t size() const { return l1_.size(); }

  std::span<const int> mode(std::size_t idx) const
  {
    return {modes_.data() + idx * dim_, static_cast<std::size_t>(dim_)};
  }
  int l1(std::size_t idx) const { return l1_[idx]; }

  // npos when k lies outside the capacity.
  std::size_t index(std::span<const int> k) const;
  std::size_t zero() const { return 0; }
  std::size_t negate(std::size_t idx) const { return negation_[idx]; }
  std::size_t sum(std::size_t a, std::size_t b) const;

  bool operator==(const FourierLattice &o) const
  {
    return dim_ == o.dim_ && capacity_ == o.capacity_;
  }

private:
  int dim_, capacity_, side_;
  std::vector<int> modes_;
  std::vector<int> l1_;
  std::vector<std::size_t> box_;
  std::vector<std::size_t> negation_;
};

using LatticePtr = std::shared_ptr<const FourierLattice>;

LatticePtr make_lattice(int dim, int capacity);

// Scalar theta-Fourier series on a lattice.
using Series = std::vector<cplx>;

// sum_k |f_k| e^{|k| r}
double coeff_fourier_norm(const FourierLattice &lat, std::span<const cplx> f, double r);

// sum_k |k_h| |f_k| e^{|k| r} summed over h: the norm of the gradient components.
double gradient_fourier_norm(const FourierLattice &lat, std::span<const cplx> f, double r);

// Parameter-sampled norm: sum_k sup_s (|f_k(xi_s)| + |df_k/dxi(xi_s)|) e^{|k| r}, the
// derivative taken by central differences over consecutive samples spaced by step.
double sampled_fourier_norm(const FourierLattice &lat, std::span<const Series> samples,
                            double step, double r);

// Evaluate at one angle vector theta.
cplx evaluate(const FourierLattice &lat, std::span<const cplx> f, std::span<const double> theta);

// k . x with compensated summation.
double dot_compensated(std::span<const int> k, std::span<const double> x);

}  // namespace kamreduce
