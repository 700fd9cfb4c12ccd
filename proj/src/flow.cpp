// SPDX-License-Identifier: Apache-2.0
#include "kamreduce/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "kamreduce/errors.hpp"

namespace kamreduce
{

namespace
{

constexpr cplx I1{0.0, 1.0};
constexpr double THETA13 = 5.371920351148152;
constexpr std::array<double, 14> PADE13{64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                        1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                        670442572800.0,      33522128640.0,       1323241920.0,
                                        40840800.0,          960960.0,            16380.0,
                                        182.0,               1.0};

// Values on the grid: column g is the flattened (column-major) 2J x 2J matrix at point g.
using Field = Eigen::MatrixXcd;

Eigen::Map<const Matrix> point(const Field &f, std::size_t g, int n2)
{
  return {f.col(static_cast<Eigen::Index>(g)).data(), n2, n2};
}

Eigen::Map<Matrix> point(Field &f, std::size_t g, int n2)
{
  return {f.col(static_cast<Eigen::Index>(g)).data(), n2, n2};
}

// Per-axis DFT matrix. Frequency slots use the wrapped order p <-> p or p - G.
// synthesis: out(:, q) = sum_p in(:, p) e^{i p theta_q}; analysis: the inverse with 1/G.
Matrix axis_transform(int G, bool synthesis)
{
  Matrix T(G, G);
  for (int a = 0; a < G; ++a)
  {
    for (int b = 0; b < G; ++b)
    {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>((a * b) % G) / G;
      T(a, b) = synthesis ? std::polar(1.0, phase) : std::polar(1.0 / G, -phase);
    }
  }
  return T;
}

void transform_all_axes(Field &data, const AngleGrid &grid, bool synthesis)
{
  const int G = grid.points;
  const Matrix T = axis_transform(G, synthesis);
  const std::size_t total = grid.size();
  std::size_t stride = total;
  Matrix line(data.rows(), G);
  for (int axis = 0; axis < grid.dim; ++axis)
  {
    stride /= static_cast<std::size_t>(G);
    const std::size_t block = stride * static_cast<std::size_t>(G);
    for (std::size_t outer = 0; outer < total; outer += block)
    {
      for (std::size_t inner = 0; inner < stride; ++inner)
      {
        for (int q = 0; q < G; ++q)
        {
          line.col(q) = data.col(static_cast<Eigen::Index>(outer + inner + q * stride));
        }
        const Matrix out = line * T;
        for (int q = 0; q < G; ++q)
        {
          data.col(static_cast<Eigen::Index>(outer + inner + q * stride)) = out.col(q);
        }
      }
    }
  }
}

int wrap(int k, int G) { return ((k % G) + G) % G; }

std::size_t slot_of(std::span<const int> k, const AngleGrid &grid)
{
  std::size_t s = 0;
  for (int d = 0; d < grid.dim; ++d)
  {
    s = s * static_cast<std::size_t>(grid.points) + static_cast<std::size_t>(wrap(k[d], grid.points));
  }
  return s;
}

std::vector<int> frequency_of(std::size_t slot, const AngleGrid &grid)
{
  std::vector<int> k(grid.dim);
  for (int d = grid.dim - 1; d >= 0; --d)
  {
    const int p = static_cast<int>(slot % static_cast<std::size_t>(grid.points));
    slot /= static_cast<std::size_t>(grid.points);
    k[d] = p <= grid.max_frequency() ? p : p - grid.points;
  }
  return k;
}

void check_grid(const FourierLattice &lat, const AngleGrid &grid)
{
  if (grid.dim != lat.dim() || grid.points % 2 == 0 || grid.max_frequency() < lat.capacity())
  {
    throw DomainError("angle grid must be odd, match the lattice dimension and resolve its capacity");
  }
}

// Hessians of P (or of d_theta_h P when axis >= 0) at all grid points.
Field synthesize(const QuadHam &P, const AngleGrid &grid, int axis = -1)
{
  const auto &lat = P.lattice();
  check_grid(lat, grid);
  const int n2 = 2 * P.modes();
  Field data = Field::Zero(n2 * n2, static_cast<Eigen::Index>(grid.size()));
  for (std::size_t idx = 0; idx < lat.size(); ++idx)
  {
    if (!P.allocated(idx) || P[idx].is_zero())
    {
      continue;
    }
    const auto k = lat.mode(idx);
    const cplx factor = axis < 0 ? cplx{1.0} : I1 * static_cast<double>(k[axis]);
    if (factor == cplx{})
    {
      continue;
    }
    point(data, slot_of(k, grid), n2) = factor * z_hessian(P[idx]);
  }
  transform_all_axes(data, grid, true);
  return data;
}

// Back to Fourier coefficients; slots outside the lattice are handed to `overflow`.
template <typename Keep, typename Overflow>
void analyze(Field data, const FourierLattice &lat, const AngleGrid &grid, int n2, Keep keep,
             Overflow overflow)
{
  transform_all_axes(data, grid, false);
  for (std::size_t slot = 0; slot < grid.size(); ++slot)
  {
    const auto k = frequency_of(slot, grid);
    const Matrix S = point(data, slot, n2);
    const auto idx = lat.index(k);
    if (idx == FourierLattice::npos)
    {
      int l1 = 0;
      for (int v : k)
      {
        l1 += std::abs(v);
      }
      overflow(S, l1);
    }
    else
    {
      keep(idx, S);
    }
  }
}

QuadHam to_quadham(const Field &data, const QuadHam &like, const AngleGrid &grid)
{
  QuadHam out(like.lattice_ptr(), like.modes(), like.analyticity());
  const int n2 = 2 * like.modes();
  analyze(
      data, like.lattice(), grid, n2,
      [&](std::size_t idx, const Matrix &S) {
        if (!S.isZero(0.0))
        {
          out[idx] = from_z_hessian(S);
        }
      },
      [&](const Matrix &S, int l1) {
        if (!S.isZero(0.0))
        {
          out.add_tail(mode_vf_bound(from_z_hessian(S), l1, like.analyticity()));
        }
      });
  out.symmetrize();
  return out;
}

double norm1(const Matrix &A) { return A.cwiseAbs().colwise().sum().maxCoeff(); }

double norm_inf(const Matrix &A) { return A.cwiseAbs().rowwise().sum().maxCoeff(); }

// Diagonal Pade approximants of degree m with their backward-error thresholds.
struct PadeRule
{
  int m;
  double theta;
  std::span<const double> b;
};

constexpr std::array<double, 4> PADE3{120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> PADE5{30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> PADE7{17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0};
constexpr std::array<double, 10> PADE9{17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                                       2162160.0,     110880.0,     3960.0,       90.0,        1.0};

PadeRule pade_rule(double nrm)
{
  if (nrm <= 1.495585217958292e-2)
  {
    return {3, 1.495585217958292e-2, PADE3};
  }
  if (nrm <= 2.539398330063230e-1)
  {
    return {5, 2.539398330063230e-1, PADE5};
  }
  if (nrm <= 9.504178996162932e-1)
  {
    return {7, 9.504178996162932e-1, PADE7};
  }
  if (nrm <= 2.097847961257068)
  {
    return {9, 2.097847961257068, PADE9};
  }
  return {13, THETA13, PADE13};
}

struct Expm1Parts
{
  Matrix B;   // e^A - I
  Matrix B2;  // e^A - I - A, only when requested
};

// r_m(A) = (V - U)^{-1} (V + U) with U odd and V even in A. Then
//   r - I     = (V - U)^{-1} 2U
//   r - I - A = (V - U)^{-1} A^2 (u + A w),  U = A u,  w = sum_{i>=1} (2 b_{2i+1} - b_{2i}) A^{2i-2},
// using b_0 = 2 b_1. Both stay relatively accurate for small A, and squaring keeps the
// split: (I + X)^2 - I = 2X + X^2, X - A -> 2 (X - A) + X^2.
Expm1Parts expm1_parts(const Matrix &A, bool want_b2)
{
  const auto n = A.rows();
  const double nrm = n == 0 ? 0.0 : norm1(A);
  if (!std::isfinite(nrm))
  {
    throw NumericalError("expm of a non-finite matrix");
  }
  if (nrm == 0.0)
  {
    return {Matrix::Zero(n, n), want_b2 ? Matrix::Zero(n, n) : Matrix{}};
  }
  const PadeRule rule = pade_rule(nrm);
  const int s = rule.m < 13 ? 0 : std::max(0, static_cast<int>(std::ceil(std::log2(nrm / THETA13))));
  const Matrix As = A * std::ldexp(1.0, -s);
  const Matrix A2 = As * As;
  const auto &b = rule.b;
  const int half = (rule.m - 1) / 2;
  Matrix power = Matrix::Identity(n, n);  // A^{2i}
  Matrix u = b[1] * power, v = b[0] * power, w = Matrix::Zero(n, n);
  for (int i = 1; i <= half; ++i)
  {
    w += (2.0 * b[2 * i + 1] - b[2 * i]) * power;
    power = (power * A2).eval();
    u += b[2 * i + 1] * power;
    v += b[2 * i] * power;
  }
  const Matrix U = As * u;
  const auto lu = (v - U).partialPivLu();
  Expm1Parts out;
  out.B = lu.solve(2.0 * U);
  if (want_b2)
  {
    out.B2 = lu.solve(A2 * (u + As * w));
  }
  for (int i = 0; i < s; ++i)
  {
    const Matrix sq = out.B * out.B;
    if (want_b2)
    {
      out.B2 = (2.0 * out.B2 + sq).eval();
    }
    out.B = (2.0 * out.B + sq).eval();
  }
  return out;
}

// Gauss-Kronrod rule mapped to [0, 1], kept as the lower-half nodes t = (1 - x) / 2; the
// mirror 1 - t is implied for x > 0. Gauss weights are zero on Kronrod-only nodes.
struct KronrodRule
{
  std::vector<double> x, wk, wg;
};

template <unsigned N>
KronrodRule kronrod_rule()
{
  using K = boost::math::quadrature::gauss_kronrod<double, N>;
  using G = boost::math::quadrature::gauss<double, (N - 1) / 2>;
  KronrodRule r;
  const auto &gx = G::abscissa();
  const auto &gw = G::weights();
  for (std::size_t i = 0; i < K::abscissa().size(); ++i)
  {
    const double x = K::abscissa()[i];
    double wg = 0.0;
    for (std::size_t j = 0; j < gx.size(); ++j)
    {
      if (std::abs(gx[j] - x) < 1e-14)
      {
        wg = gw[j];
      }
    }
    r.x.push_back(x);
    r.wk.push_back(0.5 * K::weights()[i]);
    r.wg.push_back(0.5 * wg);
  }
  return r;
}

const KronrodRule &rule_for(int points)
{
  static const KronrodRule r15 = kronrod_rule<15>(), r31 = kronrod_rule<31>(), r61 = kronrod_rule<61>();
  switch (points)
  {
    case 15:
      return r15;
    case 31:
      return r31;
    case 61:
      return r61;
  }
  throw std::invalid_argument("Gauss-Kronrod point count must be 15, 31 or 61");
}

// e^{-tA} - I from e^{tA} - I for Hamiltonian A: e^{-tA} = -Jm e^{tA}^T Jm.
Matrix reverse_deviation(const Matrix &B)
{
  const auto n = B.rows();
  Matrix out(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
  {
    const Eigen::Index pr = r ^ 1;
    const double sr = (r & 1) == 0 ? 1.0 : -1.0;
    for (Eigen::Index c = 0; c < n; ++c)
    {
      const Eigen::Index pc = c ^ 1;
      const double tc = (c & 1) == 0 ? -1.0 : 1.0;
      out(r, c) = -sr * tc * B(pc, pr);
    }
  }
  return out;
}

struct ShiftEstimate
{
  std::vector<Matrix> kronrod, gauss;
};

// M_h + C_h = -int_0^1 (B_t^T C_h B_t + B_t^T C_h + C_h B_t) dt with B_t = e^{tA} - I, so
// that M_h = -int e^{tA}^T C_h e^{tA} dt keeps its O(A) part analytic.
ShiftEstimate action_shift(const Matrix &A, const Matrix &B1, const std::vector<Matrix> &C, int points)
{
  const auto &rule = rule_for(points);
  const auto dim = A.rows();
  ShiftEstimate est{std::vector<Matrix>(C.size(), Matrix::Zero(dim, dim)),
                    std::vector<Matrix>(C.size(), Matrix::Zero(dim, dim))};
  auto add = [&](const Matrix &Bt, double wk, double wg) {
    for (std::size_t h = 0; h < C.size(); ++h)
    {
      const Matrix CB = C[h] * Bt;
      const Matrix f = Bt.transpose() * (C[h] + CB) + CB;
      est.kronrod[h].noalias() -= wk * f;
      if (wg != 0.0)
      {
        est.gauss[h].noalias() -= wg * f;
      }
    }
  };
  for (std::size_t q = 0; q < rule.x.size(); ++q)
  {
    const double x = rule.x[q];
    const Matrix lo = expm1_parts(0.5 * (1.0 - x) * A, false).B;
    add(lo, rule.wk[q], rule.wg[q]);
    if (x > 0.0)
    {
      // e^{(1-t)A} - I = B1 + R + B1 R with R = e^{-tA} - I.
      const Matrix R = reverse_deviation(lo);
      add(B1 + R + B1 * R, rule.wk[q], rule.wg[q]);
    }
  }
  return est;
}

double max_gap(const std::vector<Matrix> &a, const std::vector<Matrix> &b)
{
  double g = 0.0;
  for (std::size_t h = 0; h < a.size(); ++h)
  {
    g = std::max(g, (a[h] - b[h]).cwiseAbs().maxCoeff());
  }
  return g;
}

Matrix symmetric_part(const Matrix &m) { return 0.5 * (m + m.transpose()); }

Matrix normal_form_hessian(const NormalForm &N, int J)
{
  Matrix D = Matrix::Zero(2 * J, 2 * J);
  for (int j = 1; j <= J; ++j)
  {
    D(2 * j - 2, 2 * j - 1) = N.frequency(j);
    D(2 * j - 1, 2 * j - 2) = N.frequency(j);
  }
  return D;
}

// Largest operator amplification max_g ||L||_1 ||L||_inf, used to carry an incoming tail.
double amplification(const SymplecticMap &map)
{
  double a = 1.0;
  for (const auto &L : map.L)
  {
    a = std::max(a, norm1(L) * norm_inf(L));
  }
  return a;
}

void check_map(const QuadHam &P, const SymplecticMap &map)
{
  check_grid(P.lattice(), map.grid);
  if (map.modes != P.modes() || map.L.size() != map.grid.size() || map.B.size() != map.L.size())
  {
    throw std::invalid_argument("symplectic map does not match the Hamiltonian");
  }
}

}  // namespace

std::size_t AngleGrid::size() const
{
  std::size_t n = 1;
  for (int d = 0; d < dim; ++d)
  {
    n *= static_cast<std::size_t>(points);
  }
  return n;
}

std::vector<double> AngleGrid::angles(std::size_t g) const
{
  std::vector<double> th(dim);
  for (int d = dim - 1; d >= 0; --d)
  {
    th[d] = 2.0 * std::numbers::pi * static_cast<double>(g % static_cast<std::size_t>(points)) / points;
    g /= static_cast<std::size_t>(points);
  }
  return th;
}

AngleGrid default_grid(const FourierLattice &lat) { return {lat.dim(), 4 * lat.capacity() + 1}; }

SymplecticMap SymplecticMap::identity(const AngleGrid &grid, int modes)
{
  SymplecticMap m;
  m.grid = grid;
  m.modes = modes;
  m.L.assign(grid.size(), Matrix::Identity(2 * modes, 2 * modes));
  m.B.assign(grid.size(), Matrix::Zero(2 * modes, 2 * modes));
  m.M.assign(grid.size(), std::vector<Matrix>(grid.dim, Matrix::Zero(2 * modes, 2 * modes)));
  return m;
}

double SymplecticMap::symplectic_defect() const
{
  const Matrix Jm = symplectic_unit(modes);
  double worst = 0.0;
  for (const auto &l : L)
  {
    worst = std::max(worst, (l.transpose() * Jm * l - Jm).cwiseAbs().maxCoeff());
  }
  return worst;
}

Matrix expm1(const Matrix &A) { return expm1_parts(A, false).B; }

Matrix expm(const Matrix &A)
{
  Matrix E = expm1(A);
  E.diagonal().array() += 1.0;
  return E;
}

SymplecticMap flow_map(const QuadHam &F, const FlowOptions &opt)
{
  const auto &lat = F.lattice();
  const AngleGrid grid = opt.grid.value_or(default_grid(lat));
  check_grid(lat, grid);
  if (opt.gate)
  {
    Analyticity narrow = F.analyticity();
    narrow.r -= opt.gate->sigma;
    const double size = vf_norm(F, narrow) + tl_seminorm(F, opt.gate->rho, narrow.r).combined();
    if (!(size < opt.gate->constant * opt.gate->sigma))
    {
      std::ostringstream msg;
      msg << "generator too large for the flow domain: " << size << " >= " << opt.gate->constant << " * "
          << opt.gate->sigma;
      throw FlowDomainError(msg.str());
    }
  }
  rule_for(opt.kronrod);
  const int J = F.modes();
  const int n2 = 2 * J;
  const Matrix Jm = symplectic_unit(J);
  const Field S = synthesize(F, grid);
  std::vector<Field> dS;
  for (int h = 0; h < lat.dim(); ++h)
  {
    dS.push_back(synthesize(F, grid, h));
  }
  SymplecticMap map;
  map.grid = grid;
  map.modes = J;
  map.L.resize(grid.size());
  map.B.resize(grid.size());
  map.B2.resize(grid.size());
  map.M.resize(grid.size());
  map.M2.resize(grid.size());
  map.generator = F;
  double gap = 0.0;
  std::vector<Matrix> C(lat.dim());
  for (std::size_t g = 0; g < grid.size(); ++g)
  {
    const Matrix A = I1 * (Jm * point(S, g, n2));
    // e^A from e^{A/2}: the midpoint is a quadrature node anyway.
    auto half = expm1_parts(0.5 * A, true);
    const Matrix sq = half.B * half.B;
    map.B[g] = 2.0 * half.B + sq;
    map.B2[g] = 2.0 * half.B2 + sq;
    map.L[g] = map.B[g];
    map.L[g].diagonal().array() += 1.0;
    bool constant = true;
    for (int h = 0; h < lat.dim(); ++h)
    {
      C[h] = point(dS[h], g, n2);
      constant = constant && C[h].isZero(0.0);
    }
    if (constant)
    {
      map.M[g].assign(lat.dim(), Matrix::Zero(n2, n2));
      map.M2[g].assign(lat.dim(), Matrix::Zero(n2, n2));
      continue;
    }
    int points = opt.kronrod;
    auto est = action_shift(A, map.B[g], C, points);
    for (;;)
    {
      double scale = 1.0;
      for (int h = 0; h < lat.dim(); ++h)
      {
        scale = std::max(scale, (est.kronrod[h] - C[h]).cwiseAbs().maxCoeff());
      }
      const double d = max_gap(est.kronrod, est.gauss);
      if (d <= opt.tol * scale || points == 61)
      {
        gap = std::max(gap, d);
        break;
      }
      points = points == 15 ? 31 : 61;
      est = action_shift(A, map.B[g], C, points);
    }
    map.M[g].resize(lat.dim());
    map.M2[g].resize(lat.dim());
    for (int h = 0; h < lat.dim(); ++h)
    {
      map.M2[g][h] = symmetric_part(est.kronrod[h]);
      map.M[g][h] = symmetric_part(est.kronrod[h] - C[h]);
    }
  }
  map.error_estimate = gap;
  return map;
}

namespace
{

// S_+ - S_N at every grid point. With the flow's second-order parts available the O(F) term
// A^T D + D A - sum_h omega_h C_h is left out (the caller adds it in coefficient space):
//   L^T S_P L + B2^T D + D B2 + B^T D B + sum_h omega_h M2_h.
// Otherwise the full B^T D + D B + B^T D B + sum_h omega_h M_h is used.
Field pullback(const Field &SP, const SymplecticMap &map, const Matrix *D, std::span<const double> omega,
               bool split)
{
  const int n2 = 2 * map.modes;
  Field out(SP.rows(), SP.cols());
  for (std::size_t g = 0; g < map.grid.size(); ++g)
  {
    const auto &L = map.L[g];
    Matrix S = L.transpose() * point(SP, g, n2) * L;
    if (D)
    {
      const auto &B = map.B[g];
      const Matrix DB = *D * B;
      const Matrix first = split ? Matrix(*D * map.B2[g]) : DB;
      S += first + first.transpose() + B.transpose() * DB;
      const auto &M = split ? map.M2[g] : map.M[g];
      for (std::size_t h = 0; h < omega.size(); ++h)
      {
        S += omega[h] * M[h];
      }
    }
    point(out, g, n2) = S;
  }
  return out;
}

}  // namespace

Hamiltonian transform_flow(const Hamiltonian &H, const SymplecticMap &map)
{
  check_map(H.P, map);
  if (static_cast<int>(H.N.omega.size()) != H.P.dim() || H.N.modes() < H.P.modes())
  {
    throw std::invalid_argument("normal form and perturbation dimensions differ");
  }
  const bool split = map.generator.has_value() && map.B2.size() == map.L.size();
  const Matrix D = normal_form_hessian(H.N, H.P.modes());
  const Field SP = synthesize(H.P, map.grid);
  auto P = to_quadham(pullback(SP, map, &D, H.N.omega, split), H.P, map.grid);
  if (split)
  {
    // {N, F} - omega . d_theta F, exact in coefficient space.
    const auto Nq = normal_form_part(H.N, H.P.lattice_ptr(), H.P.analyticity());
    P += poisson_bracket(Nq, *map.generator);
    P -= angle_derivative(*map.generator, H.N.omega);
    P.symmetrize();
  }
  P.add_tail(H.P.tail_norm() * amplification(map));
  return {H.N, std::move(P)};
}

QuadHam compose_quadratic(const QuadHam &R, const SymplecticMap &map)
{
  check_map(R, map);
  auto out = to_quadham(pullback(synthesize(R, map.grid), map, nullptr, {}, false), R, map.grid);
  out.add_tail(R.tail_norm() * amplification(map));
  return out;
}

LieResult transform_lie(const Hamiltonian &H, const QuadHam &F, const LieOptions &opt)
{
  const double pn = vf_norm(H.P);
  const auto Nq = normal_form_part(H.N, H.P.lattice_ptr(), H.P.analyticity());
  LieResult res{H, 0, 0.0};
  // m = 1: {N + P, F} - omega . d_theta F
  QuadHam term = poisson_bracket(Nq + H.P, F);
  term -= angle_derivative(F, H.N.omega);
  double prev = std::numeric_limits<double>::infinity();
  for (int m = 1; m <= opt.max_terms; ++m)
  {
    const double tn = vf_norm(term);
    res.H.P += term;
    res.terms = m;
    if (tn <= opt.tol * (1.0 + pn))
    {
      const double q = std::isfinite(prev) && prev > 0.0 ? tn / prev : 0.0;
      res.tail_bound = (q < 1.0 ? tn * q / (1.0 - q) : tn) + res.H.P.tail_norm();
      return res;
    }
    if (m >= 2 && tn >= prev)
    {
      std::ostringstream msg;
      msg << "Lie series term " << m << " did not decrease: " << tn << " >= " << prev;
      throw LieDivergence(msg.str());
    }
    prev = tn;
    term = poisson_bracket(term, F);
    term *= cplx(1.0 / (m + 1));
  }
  throw LieDivergence("Lie series did not converge within max_terms");
}

TLMatrix jacobian_deviation(const SymplecticMap &map, const LatticePtr &lattice)
{
  check_grid(*lattice, map.grid);
  const int n2 = 2 * map.modes;
  Field B(n2 * n2, static_cast<Eigen::Index>(map.grid.size()));
  for (std::size_t g = 0; g < map.grid.size(); ++g)
  {
    auto p = point(B, g, n2);
    p = map.B[g];
  }
  auto out = TLMatrix::zero(lattice, map.modes);
  analyze(
      std::move(B), *lattice, map.grid, n2, [&](std::size_t idx, const Matrix &S) { out.coef[idx] = S; },
      [&](const Matrix &S, int) { out.tail_norm += S.cwiseAbs().sum(); });
  return out;
}

std::vector<double> condition_numbers(const SymplecticMap &map)
{
  std::vector<double> out;
  out.reserve(map.L.size());
  for (const auto &L : map.L)
  {
    const auto sv = L.jacobiSvd().singularValues();
    out.push_back(sv[0] / sv[sv.size() - 1]);
  }
  return out;
}

}  // namespace kamreduce
