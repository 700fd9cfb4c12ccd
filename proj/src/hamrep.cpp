// SPDX-License-Identifier: Apache-2.0
#include "kamreduce/hamrep.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "kamreduce/errors.hpp"

namespace kamreduce
{

namespace
{

constexpr cplx I1{0.0, 1.0};

Matrix zeros(int J) { return Matrix::Zero(J, J); }

void symmetrize_in_place(Matrix &m)
{
  Matrix t = m.transpose();
  m = 0.5 * (m + t);
}

// Coefficient-norm matrices: sum_k |c_k| e^{|k| r} (and the |k|_1-weighted version).
struct NormMatrices
{
  Eigen::MatrixXd zz, zzbar, zbarzbar;
};

// Fills `plain` and, when given, the |k|_1-weighted `gradient` in one pass.
void coefficient_norms(const QuadHam &P, double r, NormMatrices &plain, NormMatrices *gradient)
{
  const int J = P.modes();
  auto init = [J](NormMatrices &n) {
    n = {Eigen::MatrixXd::Zero(J, J), Eigen::MatrixXd::Zero(J, J), Eigen::MatrixXd::Zero(J, J)};
  };
  init(plain);
  if (gradient)
  {
    init(*gradient);
  }
  const auto &lat = P.lattice();
  Eigen::MatrixXd a(J, J);
  for (std::size_t idx = 0; idx < lat.size(); ++idx)
  {
    if (!P.allocated(idx))
    {
      continue;
    }
    const auto &b = P[idx];
    const double w = std::exp(lat.l1(idx) * r);
    const double wg = w * lat.l1(idx);
    auto add = [&](const Matrix &m, Eigen::MatrixXd &cp, Eigen::MatrixXd *cg) {
      a = m.cwiseAbs();
      cp += w * a;
      if (cg && wg != 0.0)
      {
        *cg += wg * a;
      }
    };
    add(b.zz, plain.zz, gradient ? &gradient->zz : nullptr);
    add(b.zzbar, plain.zzbar, gradient ? &gradient->zzbar : nullptr);
    add(b.zbarzbar, plain.zbarzbar, gradient ? &gradient->zbarzbar : nullptr);
  }
}

NormMatrices coefficient_norms(const QuadHam &P, double r)
{
  NormMatrices n;
  coefficient_norms(P, r, n, nullptr);
  return n;
}

VfNorm vf_from_norms(const NormMatrices &c, const NormMatrices &d, const Analyticity &an, int J)
{
  Eigen::VectorXd w(J);
  for (int j = 0; j < J; ++j)
  {
    w[j] = an.weight(j + 1);
  }
  // Row i of the z-component derivative matrices weighted by w_i, summed per column j.
  // X^{z_i}: |z_j| <- zzbar_ji, |zbar_j| <- 2 zbarzbar_ij
  // X^{zbar_i}: |z_j| <- 2 zz_ij, |zbar_j| <- zzbar_ij
  Eigen::VectorXd cz = c.zzbar * w + 2.0 * (c.zz.transpose() * w);
  Eigen::VectorXd cc = 2.0 * (c.zbarzbar.transpose() * w) + c.zzbar.transpose() * w;
  VfNorm out;
  double mz = 0.0, mc = 0.0;
  for (int j = 0; j < J; ++j)
  {
    mz = std::max(mz, cz[j] / w[j]);
    mc = std::max(mc, cc[j] / w[j]);
  }
  out.z_part = an.s * (mz + mc);
  double t20 = 0.0, t11 = 0.0, t02 = 0.0;
  for (int i = 0; i < J; ++i)
  {
    for (int j = 0; j < J; ++j)
    {
      const double ww = w[i] * w[j];
      t20 = std::max(t20, d.zz(i, j) / ww);
      t11 = std::max(t11, d.zzbar(i, j) / ww);
      t02 = std::max(t02, d.zbarzbar(i, j) / ww);
    }
  }
  out.theta_part = an.s * an.s * (t20 + t11 + t02);
  return out;
}

enum class Shape
{
  Zero,
  Diagonal,
  Dense
};

Shape shape_of(const Matrix &m)
{
  bool zero = true;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
  {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
    {
      if (m(i, j) != cplx{})
      {
        if (i != j)
        {
          return Shape::Dense;
        }
        zero = false;
      }
    }
  }
  return zero ? Shape::Zero : Shape::Diagonal;
}

struct BlockShape
{
  Shape zz, zzbar, zbarzbar;
};

std::vector<BlockShape> block_shapes(const QuadHam &P, const std::vector<std::size_t> &support)
{
  std::vector<BlockShape> out;
  out.reserve(support.size());
  for (auto idx : support)
  {
    const auto &b = P[idx];
    out.push_back({shape_of(b.zz), shape_of(b.zzbar), shape_of(b.zbarzbar)});
  }
  return out;
}

// out += c X Y, skipping zero factors and using the diagonal when one factor is diagonal.
// Transposition does not change the shape.
template <typename X, typename Y>
bool accumulate(Matrix &out, double c, const X &x, Shape xs, const Y &y, Shape ys)
{
  if (xs == Shape::Zero || ys == Shape::Zero)
  {
    return false;
  }
  if (xs == Shape::Diagonal)
  {
    out.noalias() += c * (x.diagonal().asDiagonal() * y);
  }
  else if (ys == Shape::Diagonal)
  {
    out.noalias() += c * (x * y.diagonal().asDiagonal());
  }
  else
  {
    out.noalias() += c * x * y;
  }
  return true;
}

}  // namespace

double Analyticity::weight(int j) const
{
  return std::exp(a * j) * std::pow(static_cast<double>(j), p);
}

bool QuadBlock::is_zero() const
{
  return zz.isZero(0.0) && zzbar.isZero(0.0) && zbarzbar.isZero(0.0);
}

QuadHam::QuadHam(LatticePtr lattice, int modes, Analyticity an)
  : lattice_(std::move(lattice)), modes_(modes), an_(an)
{
  if (!lattice_ || modes_ < 1)
  {
    throw std::invalid_argument("QuadHam needs a lattice and at least one mode");
  }
  blocks_.resize(lattice_->size());
  zero_ = QuadBlock{zeros(modes_), zeros(modes_), zeros(modes_)};
}

QuadBlock &QuadHam::operator[](std::size_t idx)
{
  auto &b = blocks_[idx];
  if (!b)
  {
    b = zero_;
  }
  return *b;
}

QuadBlock &QuadHam::at(std::span<const int> k)
{
  const auto idx = lattice_->index(k);
  if (idx == FourierLattice::npos)
  {
    throw std::out_of_range("Fourier mode beyond capacity");
  }
  return (*this)[idx];
}

const QuadBlock &QuadHam::at(std::span<const int> k) const
{
  const auto idx = lattice_->index(k);
  if (idx == FourierLattice::npos)
  {
    throw std::out_of_range("Fourier mode beyond capacity");
  }
  return std::as_const(*this)[idx];
}

void QuadHam::add_tail(double v)
{
  if (!(v >= 0.0))
  {
    throw NumericalError("tail contribution must be non-negative and finite");
  }
  tail_ += v;
}

bool QuadHam::is_zero() const
{
  return std::all_of(blocks_.begin(), blocks_.end(),
                     [](const std::optional<QuadBlock> &b) { return !b || b->is_zero(); });
}

std::vector<std::size_t> QuadHam::support() const
{
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < blocks_.size(); ++i)
  {
    if (blocks_[i] && !blocks_[i]->is_zero())
    {
      out.push_back(i);
    }
  }
  return out;
}

int QuadHam::support_radius() const
{
  int r = -1;
  for (auto idx : support())
  {
    r = std::max(r, lattice_->l1(idx));
  }
  return r;
}

void QuadHam::symmetrize()
{
  for (auto &b : blocks_)
  {
    if (b)
    {
      symmetrize_in_place(b->zz);
      symmetrize_in_place(b->zbarzbar);
    }
  }
}

void QuadHam::enforce_reality()
{
  // zbarzbar(k) = conj(zz(-k)), zzbar(k) = zzbar(-k)^H; average each relation pair.
  const auto &lat = *lattice_;
  for (std::size_t idx = 0; idx < lat.size(); ++idx)
  {
    const auto neg = lat.negate(idx);
    if (neg < idx || (!blocks_[idx] && !blocks_[neg]))
    {
      continue;
    }
    auto &b = (*this)[idx];
    auto &c = (*this)[neg];
    Matrix zz = 0.5 * (b.zz + c.zbarzbar.conjugate());
    Matrix zzn = 0.5 * (c.zz + b.zbarzbar.conjugate());
    Matrix h = 0.5 * (b.zzbar + c.zzbar.adjoint());
    b.zz = zz;
    b.zbarzbar = zzn.conjugate();
    c.zz = zzn;
    c.zbarzbar = zz.conjugate();
    b.zzbar = h;
    c.zzbar = h.adjoint();
  }
  symmetrize();
}

double QuadHam::reality_defect() const
{
  const auto &lat = *lattice_;
  double worst = 0.0;
  for (std::size_t idx = 0; idx < lat.size(); ++idx)
  {
    if (!blocks_[idx] && !blocks_[lat.negate(idx)])
    {
      continue;
    }
    const auto &b = (*this)[idx];
    const auto &c = std::as_const(*this)[lat.negate(idx)];
    worst = std::max(worst, (b.zbarzbar - c.zz.conjugate()).cwiseAbs().maxCoeff());
    worst = std::max(worst, (b.zzbar - c.zzbar.adjoint()).cwiseAbs().maxCoeff());
  }
  return worst;
}

void QuadHam::check_compatible(const QuadHam &o) const
{
  if (!(*lattice_ == o.lattice()) || modes_ != o.modes_)
  {
    throw std::invalid_argument("QuadHam dimension mismatch");
  }
}

QuadHam &QuadHam::operator+=(const QuadHam &o)
{
  check_compatible(o);
  for (std::size_t i = 0; i < blocks_.size(); ++i)
  {
    if (!o.blocks_[i])
    {
      continue;
    }
    auto &b = (*this)[i];
    b.zz += o.blocks_[i]->zz;
    b.zzbar += o.blocks_[i]->zzbar;
    b.zbarzbar += o.blocks_[i]->zbarzbar;
  }
  tail_ += o.tail_;
  return *this;
}

QuadHam &QuadHam::operator-=(const QuadHam &o)
{
  check_compatible(o);
  for (std::size_t i = 0; i < blocks_.size(); ++i)
  {
    if (!o.blocks_[i])
    {
      continue;
    }
    auto &b = (*this)[i];
    b.zz -= o.blocks_[i]->zz;
    b.zzbar -= o.blocks_[i]->zzbar;
    b.zbarzbar -= o.blocks_[i]->zbarzbar;
  }
  tail_ += o.tail_;
  return *this;
}

QuadHam &QuadHam::operator*=(cplx c)
{
  for (auto &b : blocks_)
  {
    if (b)
    {
      b->zz *= c;
      b->zzbar *= c;
      b->zbarzbar *= c;
    }
  }
  tail_ *= std::abs(c);
  return *this;
}

QuadHam operator+(QuadHam a, const QuadHam &b) { return a += b; }
QuadHam operator-(QuadHam a, const QuadHam &b) { return a -= b; }
QuadHam operator*(cplx c, QuadHam a) { return a *= c; }

double max_abs_diff(const QuadHam &a, const QuadHam &b)
{
  if (!(a.lattice() == b.lattice()) || a.modes() != b.modes())
  {
    throw std::invalid_argument("QuadHam dimension mismatch");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.lattice().size(); ++i)
  {
    worst = std::max(worst, (a[i].zz - b[i].zz).cwiseAbs().maxCoeff());
    worst = std::max(worst, (a[i].zzbar - b[i].zzbar).cwiseAbs().maxCoeff());
    worst = std::max(worst, (a[i].zbarzbar - b[i].zbarzbar).cwiseAbs().maxCoeff());
  }
  return worst;
}

QuadHam normal_form_part(const NormalForm &N, const LatticePtr &lattice, const Analyticity &an)
{
  QuadHam out(lattice, N.modes(), an);
  auto &b = out[lattice->zero()];
  for (int j = 1; j <= N.modes(); ++j)
  {
    b.zzbar(j - 1, j - 1) = N.frequency(j);
  }
  return out;
}

QuadHam angle_derivative(const QuadHam &F, std::span<const double> omega)
{
  QuadHam out(F.lattice_ptr(), F.modes(), F.analyticity());
  const auto &lat = F.lattice();
  for (std::size_t idx = 0; idx < lat.size(); ++idx)
  {
    if (!F.allocated(idx))
    {
      continue;
    }
    const cplx factor = I1 * dot_compensated(lat.mode(idx), omega);
    if (factor == cplx{})
    {
      continue;
    }
    const auto &src = F[idx];
    auto &dst = out[idx];
    dst.zz = factor * src.zz;
    dst.zzbar = factor * src.zzbar;
    dst.zbarzbar = factor * src.zbarzbar;
  }
  return out;
}

VfNorm vf_norm_parts(const QuadHam &P, const Analyticity &an)
{
  NormMatrices c, d;
  coefficient_norms(P, an.r, c, &d);
  return vf_from_norms(c, d, an, P.modes());
}

double vf_norm(const QuadHam &P) { return vf_norm_parts(P, P.analyticity()).total(); }

double vf_norm(const QuadHam &P, const Analyticity &an) { return vf_norm_parts(P, an).total(); }

double mode_vf_bound(const QuadBlock &b, int l1, const Analyticity &an)
{
  const double w = std::exp(l1 * an.r);
  NormMatrices c{w * b.zz.cwiseAbs(), w * b.zzbar.cwiseAbs(), w * b.zbarzbar.cwiseAbs()};
  NormMatrices d{l1 * c.zz, l1 * c.zzbar, l1 * c.zbarzbar};
  return vf_from_norms(c, d, an, static_cast<int>(b.zz.rows())).total();
}

TLReport tl_seminorm(const QuadHam &P, double rho, const DiagonalLimits *limits)
{
  return tl_seminorm(P, rho, P.analyticity().r, limits);
}

TLReport tl_seminorm(const QuadHam &P, double rho, double r, const DiagonalLimits *limits)
{
  if (!(rho > 0.0))
  {
    throw DomainError("tl_seminorm needs rho > 0");
  }
  const int J = P.modes();
  const auto &lat = P.lattice();
  const auto c = coefficient_norms(P, r);
  TLReport rep;
  for (int i = 1; i <= J; ++i)
  {
    for (int j = 1; j <= J; ++j)
    {
      const double diag = std::exp(rho * std::abs(i - j));
      const double anti = std::exp(rho * (i + j));
      const double t = std::min(i, j);
      rep.M1 = std::max(rep.M1, c.zzbar(i - 1, j - 1) * diag);
      const double z20 = 2.0 * c.zz(i - 1, j - 1), z02 = 2.0 * c.zbarzbar(i - 1, j - 1);
      rep.M1 = std::max({rep.M1, z20 * anti, z02 * anti});
      rep.M3 = std::max({rep.M3, z20 * t * anti, z02 * t * anti});
    }
  }
  // Lipschitz term along each diagonal of zzbar against its reference.
  for (int d = -(J - 1); d <= J - 1; ++d)
  {
    const int i_ref = d >= 0 ? J : J + d;
    const int j_ref = i_ref - d;
    const Series *limit = nullptr;
    if (limits != nullptr && !limits->zzbar.empty())
    {
      limit = &limits->zzbar[static_cast<std::size_t>(d + J - 1)];
    }
    const double diag = std::exp(rho * std::abs(d));
    for (int i = std::max(1, 1 + d); i <= std::min(J, J + d); ++i)
    {
      const int j = i - d;
      if (limit == nullptr && i == i_ref && j == j_ref)
      {
        continue;
      }
      double dev = 0.0;
      for (std::size_t idx = 0; idx < lat.size(); ++idx)
      {
        const cplx ref = limit != nullptr ? (*limit)[idx] : P[idx].zzbar(i_ref - 1, j_ref - 1);
        const cplx v = P[idx].zzbar(i - 1, j - 1) - ref;
        if (v != cplx{})
        {
          dev += std::abs(v) * std::exp(lat.l1(idx) * r);
        }
      }
      rep.M3 = std::max(rep.M3, dev * std::min(i, j) * diag);
    }
  }
  return rep;
}

QuadHam poisson_bracket(const QuadHam &R, const QuadHam &F)
{
  if (!(R.lattice() == F.lattice()) || R.modes() != F.modes())
  {
    throw std::invalid_argument("poisson_bracket dimension mismatch");
  }
  const auto &lat = R.lattice();
  const int J = R.modes();
  QuadHam out(R.lattice_ptr(), J, R.analyticity());
  const auto rs = R.support();
  const auto fs = F.support();
  const auto rsh = block_shapes(R, rs), fsh = block_shapes(F, fs);
  QuadBlock term{zeros(J), zeros(J), zeros(J)};
  for (std::size_t ia = 0; ia < rs.size(); ++ia)
  {
    const auto a = rs[ia];
    const auto &Rb = R[a];
    const auto &rz = rsh[ia];
    for (std::size_t ib = 0; ib < fs.size(); ++ib)
    {
      const auto b = fs[ib];
      const auto &Fb = F[b];
      const auto &fz = fsh[ib];
      term.zz.setZero();
      term.zzbar.setZero();
      term.zbarzbar.setZero();
      bool any = false;
      // zz: 2 A B'^T - 2 B A'
      any |= accumulate(term.zz, 2.0, Rb.zz, rz.zz, Fb.zzbar.transpose(), fz.zzbar);
      any |= accumulate(term.zz, -2.0, Rb.zzbar, rz.zzbar, Fb.zz, fz.zz);
      // zzbar: 4 A C' - B B' + B' B - 4 A' C
      any |= accumulate(term.zzbar, 4.0, Rb.zz, rz.zz, Fb.zbarzbar, fz.zbarzbar);
      any |= accumulate(term.zzbar, -1.0, Rb.zzbar, rz.zzbar, Fb.zzbar, fz.zzbar);
      any |= accumulate(term.zzbar, 1.0, Fb.zzbar, fz.zzbar, Rb.zzbar, rz.zzbar);
      any |= accumulate(term.zzbar, -4.0, Fb.zz, fz.zz, Rb.zbarzbar, rz.zbarzbar);
      // zbarzbar: 2 B^T C' - 2 C B'
      any |= accumulate(term.zbarzbar, 2.0, Rb.zzbar.transpose(), rz.zzbar, Fb.zbarzbar, fz.zbarzbar);
      any |= accumulate(term.zbarzbar, -2.0, Rb.zbarzbar, rz.zbarzbar, Fb.zzbar, fz.zzbar);
      if (!any || term.is_zero())
      {
        continue;
      }
      term.zz *= I1;
      term.zzbar *= I1;
      term.zbarzbar *= I1;
      symmetrize_in_place(term.zz);
      symmetrize_in_place(term.zbarzbar);
      const auto target = lat.sum(a, b);
      if (target == FourierLattice::npos)
      {
        int l1 = 0;
        for (int d = 0; d < lat.dim(); ++d)
        {
          l1 += std::abs(lat.mode(a)[d] + lat.mode(b)[d]);
        }
        out.add_tail(mode_vf_bound(term, l1, R.analyticity()));
        continue;
      }
      out[target].zz += term.zz;
      out[target].zzbar += term.zzbar;
      out[target].zbarzbar += term.zbarzbar;
    }
  }
  return out;
}

Truncation truncate_fourier(const QuadHam &P, int K, double sigma)
{
  if (K <= 0)
  {
    throw DomainError("truncate_fourier needs K > 0");
  }
  const auto &an = P.analyticity();
  if (!(sigma > 0.0 && 2.0 * sigma < an.r))
  {
    throw DomainError("truncate_fourier needs 0 < 2 sigma < r");
  }
  Truncation out{QuadHam(P.lattice_ptr(), P.modes(), an), QuadHam(P.lattice_ptr(), P.modes(), an)};
  const auto &lat = P.lattice();
  for (std::size_t idx = 0; idx < lat.size(); ++idx)
  {
    if (P[idx].is_zero())
    {
      continue;
    }
    if (lat.l1(idx) < K)
    {
      out.head[idx] = P[idx];
    }
    else
    {
      out.remainder[idx] = P[idx];
    }
  }
  out.remainder.add_tail(P.tail_norm());
  Analyticity narrow = an;
  narrow.r = an.r - 2.0 * sigma;
  out.remainder_norm = vf_norm(out.remainder, narrow);
  out.bound = 32.0 / (sigma * sigma) * std::exp(-K * sigma) * vf_norm(P);
  out.within_bound = out.remainder_norm <= out.bound;
  return out;
}

Matrix z_hessian(const QuadBlock &b)
{
  const int J = static_cast<int>(b.zz.rows());
  Matrix S(2 * J, 2 * J);
  for (int i = 0; i < J; ++i)
  {
    for (int j = 0; j < J; ++j)
    {
      S(2 * i, 2 * j) = 2.0 * b.zz(i, j);
      S(2 * i, 2 * j + 1) = b.zzbar(i, j);
      S(2 * i + 1, 2 * j) = b.zzbar(j, i);
      S(2 * i + 1, 2 * j + 1) = 2.0 * b.zbarzbar(i, j);
    }
  }
  return S;
}

QuadBlock from_z_hessian(const Matrix &S)
{
  const int J = static_cast<int>(S.rows() / 2);
  QuadBlock b{zeros(J), zeros(J), zeros(J)};
  for (int i = 0; i < J; ++i)
  {
    for (int j = 0; j < J; ++j)
    {
      b.zz(i, j) = 0.25 * (S(2 * i, 2 * j) + S(2 * j, 2 * i));
      b.zzbar(i, j) = 0.5 * (S(2 * i, 2 * j + 1) + S(2 * j + 1, 2 * i));
      b.zbarzbar(i, j) = 0.25 * (S(2 * i + 1, 2 * j + 1) + S(2 * j + 1, 2 * i + 1));
    }
  }
  return b;
}

TLMatrix TLMatrix::zero(LatticePtr lattice, int modes)
{
  TLMatrix m;
  m.coef.assign(lattice->size(), Matrix::Zero(2 * modes, 2 * modes));
  m.lattice = std::move(lattice);
  m.modes = modes;
  return m;
}

TLMatrix TLMatrix::identity(LatticePtr lattice, int modes)
{
  auto m = zero(std::move(lattice), modes);
  m.coef[m.lattice->zero()].setIdentity();
  return m;
}

Matrix symplectic_unit(int modes)
{
  Matrix Jm = Matrix::Zero(2 * modes, 2 * modes);
  for (int j = 0; j < modes; ++j)
  {
    Jm(2 * j, 2 * j + 1) = 1.0;
    Jm(2 * j + 1, 2 * j) = -1.0;
  }
  return Jm;
}

TLMatrix hessian_matrix(const QuadHam &F)
{
  auto A = TLMatrix::zero(F.lattice_ptr(), F.modes());
  const auto &lat = F.lattice();
  const int J = F.modes();
  for (std::size_t idx = 0; idx < lat.size(); ++idx)
  {
    const auto &b = F[idx];
    if (b.is_zero())
    {
      continue;
    }
    auto &M = A.coef[idx];
    for (int i = 0; i < J; ++i)
    {
      for (int j = 0; j < J; ++j)
      {
        M(2 * i, 2 * j) = b.zzbar(j, i);                  // d2F / dzbar_i dz_j
        M(2 * i, 2 * j + 1) = 2.0 * b.zbarzbar(i, j);     // d2F / dzbar_i dzbar_j
        M(2 * i + 1, 2 * j) = -2.0 * b.zz(i, j);          // -d2F / dz_i dz_j
        M(2 * i + 1, 2 * j + 1) = -b.zzbar(i, j);         // -d2F / dz_i dzbar_j
      }
    }
  }
  A.tail_norm = F.tail_norm();
  return A;
}

TLReport tl_matnorm(const TLMatrix &A, double rho, double r)
{
  if (!(rho > 0.0))
  {
    throw DomainError("tl_matnorm needs rho > 0");
  }
  const int J = A.modes;
  const auto &lat = *A.lattice;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2 * J, 2 * J);
  for (std::size_t idx = 0; idx < lat.size(); ++idx)
  {
    if (A.coef[idx].isZero(0.0))
    {
      continue;
    }
    c += std::exp(lat.l1(idx) * r) * A.coef[idx].cwiseAbs();
  }
  TLReport rep;
  for (int i = 1; i <= J; ++i)
  {
    for (int j = 1; j <= J; ++j)
    {
      const double diag = std::exp(rho * std::abs(i - j));
      const double anti = std::exp(rho * (i + j));
      const double t = std::min(i, j);
      const int a = 2 * (i - 1), b = 2 * (j - 1);
      rep.M1 = std::max({rep.M1, c(a, b) * diag, c(a + 1, b + 1) * diag});
      rep.M1 = std::max({rep.M1, c(a, b + 1) * anti, c(a + 1, b) * anti});
      rep.M3 = std::max({rep.M3, c(a, b + 1) * t * anti, c(a + 1, b) * t * anti});
    }
  }
  for (int comp = 0; comp < 2; ++comp)
  {
    for (int d = -(J - 1); d <= J - 1; ++d)
    {
      const int i_ref = d >= 0 ? J : J + d;
      const int j_ref = i_ref - d;
      const double diag = std::exp(rho * std::abs(d));
      for (int i = std::max(1, 1 + d); i <= std::min(J, J + d); ++i)
      {
        const int j = i - d;
        if (i == i_ref)
        {
          continue;
        }
        double dev = 0.0;
        for (std::size_t idx = 0; idx < lat.size(); ++idx)
        {
          const auto &M = A.coef[idx];
          const cplx v = M(2 * (i - 1) + comp, 2 * (j - 1) + comp) -
                         M(2 * (i_ref - 1) + comp, 2 * (j_ref - 1) + comp);
          if (v != cplx{})
          {
            dev += std::abs(v) * std::exp(lat.l1(idx) * r);
          }
        }
        rep.M3 = std::max(rep.M3, dev * std::min(i, j) * diag);
      }
    }
  }
  return rep;
}

TLMatrix matmul(const TLMatrix &A, const TLMatrix &B, double r)
{
  if (!(*A.lattice == *B.lattice) || A.modes != B.modes)
  {
    throw std::invalid_argument("matmul dimension mismatch");
  }
  const auto &lat = *A.lattice;
  auto C = TLMatrix::zero(A.lattice, A.modes);
  for (std::size_t a = 0; a < lat.size(); ++a)
  {
    if (A.coef[a].isZero(0.0))
    {
      continue;
    }
    for (std::size_t b = 0; b < lat.size(); ++b)
    {
      if (B.coef[b].isZero(0.0))
      {
        continue;
      }
      const auto target = lat.sum(a, b);
      if (target == FourierLattice::npos)
      {
        int l1 = 0;
        for (int d = 0; d < lat.dim(); ++d)
        {
          l1 += std::abs(lat.mode(a)[d] + lat.mode(b)[d]);
        }
        C.tail_norm += std::exp(l1 * r) * (A.coef[a] * B.coef[b]).cwiseAbs().maxCoeff();
        continue;
      }
      C.coef[target].noalias() += A.coef[a] * B.coef[b];
    }
  }
  return C;
}

}  // namespace kamreduce
