// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "kamreduce/errors.hpp"
#include "kamreduce/flow.hpp"
#include "kamreduce/homological.hpp"
#include "kamreduce/testing.hpp"

namespace
{

using namespace kamreduce;
using kamreduce::testing::random_tl_ham;

constexpr cplx I1{0.0, 1.0};

// Oracle exponential: Taylor series after scaling to norm <= 1/2, then repeated squaring.
Matrix taylor_expm(const Matrix &A)
{
  const double nrm = A.cwiseAbs().colwise().sum().maxCoeff();
  const int s = nrm > 0.5 ? static_cast<int>(std::ceil(std::log2(nrm / 0.5))) : 0;
  const Matrix X = A * std::ldexp(1.0, -s);
  Matrix term = Matrix::Identity(A.rows(), A.cols());
  Matrix sum = term;
  for (int k = 1; k < 40; ++k)
  {
    term = (term * X / static_cast<double>(k)).eval();
    sum += term;
  }
  for (int i = 0; i < s; ++i)
  {
    sum = (sum * sum).eval();
  }
  return sum;
}

Matrix random_matrix(int n, double scale, std::mt19937_64 &rng)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix A(n, n);
  for (int i = 0; i < n; ++i)
  {
    for (int j = 0; j < n; ++j)
    {
      A(i, j) = scale * cplx(u(rng), u(rng));
    }
  }
  return A;
}

NormalForm spectrum(std::vector<double> omega, int J, double m)
{
  NormalForm N;
  N.omega = std::move(omega);
  for (int j = 1; j <= J; ++j)
  {
    N.shift.push_back(std::sqrt(j * j + m) - j);
  }
  N.shift_bound = 1.0 + m;
  return N;
}

QuadHam scaled(QuadHam P, double c)
{
  P *= cplx(c);
  return P;
}

TEST(Expm, MatchesTaylorOracle)
{
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial)
  {
    const double scale = std::pow(10.0, -4.0 + 0.1 * trial);
    const Matrix A = random_matrix(6, scale, rng);
    const Matrix ref = taylor_expm(A);
    EXPECT_LE((expm(A) - ref).cwiseAbs().maxCoeff(), 1e-13 * ref.cwiseAbs().maxCoeff()) << scale;
  }
}

TEST(Expm, Expm1KeepsRelativeAccuracyForTinyArguments)
{
  std::mt19937_64 rng(32);
  const Matrix A = random_matrix(5, 1e-9, rng);
  const Matrix B = expm1(A);
  // e^A - I = A + A^2/2 + O(|A|^3)
  const Matrix ref = A + 0.5 * A * A;
  EXPECT_LE((B - ref).cwiseAbs().maxCoeff(), 1e-15 * A.cwiseAbs().maxCoeff());
  EXPECT_TRUE(expm1(Matrix::Zero(3, 3)).isZero(0.0));
}

TEST(Expm, TwoByTwoRotation)
{
  Matrix A(2, 2);
  A << 0.0, 1.3, -1.3, 0.0;
  const Matrix E = expm(A);
  EXPECT_NEAR(std::abs(E(0, 0) - std::cos(1.3)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(E(0, 1) - std::sin(1.3)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(E(1, 0) + std::sin(1.3)), 0.0, 1e-15);
}

TEST(FlowMap, ZeroGeneratorIsIdentity)
{
  const auto lat = make_lattice(1, 3);
  const QuadHam F(lat, 4, {});
  const auto map = flow_map(F);
  EXPECT_EQ(map.grid.points, 13);
  for (std::size_t g = 0; g < map.grid.size(); ++g)
  {
    EXPECT_TRUE(map.L[g].isIdentity(0.0));
    EXPECT_TRUE(map.M[g][0].isZero(0.0));
  }
  EXPECT_EQ(map.symplectic_defect(), 0.0);
}

TEST(FlowMap, DiagonalActionIsPhaseRotation)
{
  const auto lat = make_lattice(1, 2);
  QuadHam F(lat, 3, {});
  const double c = 0.37;
  F[0].zzbar(0, 0) = c;
  const auto map = flow_map(F);
  for (std::size_t g = 0; g < map.grid.size(); ++g)
  {
    const auto &L = map.L[g];
    EXPECT_LT(std::abs(L(0, 0) - std::exp(I1 * c)), 1e-15);
    EXPECT_LT(std::abs(L(1, 1) - std::exp(-I1 * c)), 1e-15);
    Matrix rest = L;
    rest(0, 0) = 1.0;
    rest(1, 1) = 1.0;
    EXPECT_TRUE(rest.isIdentity(0.0));
    EXPECT_TRUE(map.M[g][0].isZero(0.0));
  }
}

TEST(FlowMap, DeviationBelowExponentialSeriesBound)
{
  std::mt19937_64 rng(33);
  const auto lat = make_lattice(1, 4);
  for (int trial = 0; trial < 20; ++trial)
  {
    const auto F = scaled(random_tl_ham(lat, 5, 0.3, 3, rng), 0.02 * (1 + trial % 5));
    const auto map = flow_map(F);
    const Matrix Jm = symplectic_unit(5);
    for (std::size_t g = 0; g < map.grid.size(); ++g)
    {
      // Reconstruct A from the Fourier sum directly, independent of the grid synthesis.
      Matrix S = Matrix::Zero(10, 10);
      const auto th = map.grid.angles(g);
      for (std::size_t idx = 0; idx < lat->size(); ++idx)
      {
        S += z_hessian(F[idx]) * std::exp(I1 * (lat->mode(idx)[0] * th[0]));
      }
      const Matrix A = I1 * (Jm * S);
      const double a = A.cwiseAbs().colwise().sum().maxCoeff();
      Matrix B = map.L[g];
      B.diagonal().array() -= 1.0;
      EXPECT_LE(B.cwiseAbs().colwise().sum().maxCoeff(), std::expm1(a) * (1.0 + 1e-12));
      EXPECT_LE((map.L[g] - taylor_expm(A)).cwiseAbs().maxCoeff(), 1e-13);
    }
    EXPECT_LE(map.symplectic_defect(), 1e-10);
  }
}

TEST(FlowMap, ActionShiftMatchesBlockExponentialOracle)
{
  // int_0^1 e^{A^T s} C e^{A s} ds = e^{A^T} G, where G is the upper-right block of
  // exp([[-A^T, C], [0, A]]).
  std::mt19937_64 rng(34);
  for (int dim : {1, 2})
  {
    const auto lat = make_lattice(dim, 2);
    const auto F = scaled(random_tl_ham(lat, 3, 0.3, 2, rng), 0.1);
    const auto map = flow_map(F);
    const Matrix Jm = symplectic_unit(3);
    for (std::size_t g = 0; g < map.grid.size(); g += 3)
    {
      const auto th = map.grid.angles(g);
      Matrix S = Matrix::Zero(6, 6);
      std::vector<Matrix> C(dim, Matrix::Zero(6, 6));
      for (std::size_t idx = 0; idx < lat->size(); ++idx)
      {
        const auto k = lat->mode(idx);
        double phase = 0.0;
        for (int d = 0; d < dim; ++d)
        {
          phase += k[d] * th[d];
        }
        const Matrix H = z_hessian(F[idx]) * std::exp(I1 * phase);
        S += H;
        for (int d = 0; d < dim; ++d)
        {
          C[d] += I1 * static_cast<double>(k[d]) * H;
        }
      }
      const Matrix A = I1 * (Jm * S);
      for (int d = 0; d < dim; ++d)
      {
        Matrix X = Matrix::Zero(12, 12);
        X.topLeftCorner(6, 6) = -A.transpose();
        X.topRightCorner(6, 6) = C[d];
        X.bottomRightCorner(6, 6) = A;
        const Matrix E = taylor_expm(X);
        const Matrix ref = -(taylor_expm(A).transpose() * E.topRightCorner(6, 6));
        EXPECT_LE((map.M[g][d] - ref).cwiseAbs().maxCoeff(), 1e-13);
        EXPECT_TRUE(map.M[g][d].isApprox(map.M[g][d].transpose(), 0.0));
      }
    }
  }
}

TEST(FlowMap, GateRejectsLargeGenerator)
{
  std::mt19937_64 rng(35);
  const auto lat = make_lattice(1, 3);
  const auto F = random_tl_ham(lat, 4, 0.3, 2, rng);
  FlowOptions opt;
  opt.gate = FlowGate{0.1, 0.3, 0.25};
  EXPECT_THROW(flow_map(F, opt), FlowDomainError);
  EXPECT_NO_THROW(flow_map(scaled(F, 1e-6), opt));
  opt.gate.reset();
  opt.grid = AngleGrid{1, 6};
  EXPECT_THROW(flow_map(F, opt), DomainError);
}

TEST(FlowMap, ConditionNumbersOfIdentityAndPhases)
{
  const auto lat = make_lattice(1, 2);
  QuadHam F(lat, 2, {});
  for (double c : condition_numbers(flow_map(F)))
  {
    EXPECT_EQ(c, 1.0);
  }
  F[0].zzbar(1, 1) = 2.0;
  for (double c : condition_numbers(flow_map(F)))
  {
    EXPECT_NEAR(c, 1.0, 1e-14);
  }
}

TEST(TransformFlow, ZeroGeneratorLeavesHamiltonianUnchanged)
{
  std::mt19937_64 rng(36);
  const auto lat = make_lattice(2, 3);
  Hamiltonian H{spectrum({0.8, 1.7}, 4, 1.0), random_tl_ham(lat, 4, 0.3, 3, rng)};
  const auto map = flow_map(QuadHam(lat, 4, {}));
  const auto out = transform_flow(H, map);
  EXPECT_LE(max_abs_diff(out.P, H.P), 1e-15);
  EXPECT_LE(out.P.tail_norm(), 1e-12 * vf_norm(H.P));  // DFT roundoff only
  EXPECT_EQ(out.N.omega, H.N.omega);
}

TEST(TransformFlow, PhaseFlowPreservesModeModuli)
{
  // theta-independent diagonal F: L = diag(e^{i c_j}, e^{-i c_j}), so |z_j| is conserved.
  const auto lat = make_lattice(1, 2);
  QuadHam F(lat, 3, {});
  for (int j = 0; j < 3; ++j)
  {
    F[0].zzbar(j, j) = 0.2 * (j + 1);
  }
  const auto map = flow_map(F);
  for (const auto &L : map.L)
  {
    for (int r = 0; r < 6; ++r)
    {
      EXPECT_NEAR(std::abs(L(r, r)), 1.0, 1e-15);
    }
    EXPECT_NEAR((L.cwiseAbs() - Matrix::Identity(6, 6).cwiseAbs()).cwiseAbs().maxCoeff(), 0.0, 1e-15);
  }
}

TEST(TransformFlow, OneStepCancelsFirstOrder)
{
  // After solving {N, F} + R = N_hat the remainder is second order in R.
  std::mt19937_64 rng(37);
  const auto lat = make_lattice(1, 8);
  const auto N = spectrum({2.0 * std::numbers::pi * 0.618034}, 2, 0.5);
  QuadHam R0 = random_tl_ham(lat, 2, 0.3, 2, rng);
  SolveOptions opt;
  opt.gamma = 0.01;
  opt.K = 3;
  double prev = 0.0;
  for (double eps : {1e-3, 5e-4, 2.5e-4})
  {
    const auto R = scaled(R0, eps);
    const auto sol = solve_homological(N, R, opt);
    const auto map = flow_map(sol.F);
    auto out = transform_flow({N, R}, map).P;
    out -= correction_part(sol.correction, R);
    const double rem = vf_norm(out);
    EXPECT_LT(rem, 1e3 * eps * eps) << eps;
    if (prev > 0.0)
    {
      EXPECT_NEAR(prev / rem, 4.0, 0.05) << eps;
    }
    prev = rem;
    const auto lie = transform_lie({N, R}, sol.F);
    EXPECT_LE(max_abs_diff(transform_flow({N, R}, map).P, lie.H.P), 1e-14);
  }
}

TEST(TransformLie, ZeroGeneratorAndFirstTerm)
{
  std::mt19937_64 rng(38);
  const auto lat = make_lattice(1, 6);
  const auto N = spectrum({1.1}, 3, 1.0);
  const auto P = scaled(random_tl_ham(lat, 3, 0.3, 2, rng), 0.1);
  const auto same = transform_lie({N, P}, QuadHam(lat, 3, {}));
  EXPECT_EQ(max_abs_diff(same.H.P, P), 0.0);
  EXPECT_EQ(same.terms, 1);

  // d/dt H o X^1_{tF} at t = 0 is {N + P, F} - omega . d_theta F.
  const auto F = random_tl_ham(lat, 3, 0.3, 2, rng);
  const double t = 1e-7;
  auto diff = transform_lie({N, P}, scaled(F, t)).H.P;
  diff -= P;
  diff *= cplx(1.0 / t);
  auto first = poisson_bracket(normal_form_part(N, lat, P.analyticity()) + P, F);
  first -= angle_derivative(F, N.omega);
  EXPECT_LE(max_abs_diff(diff, first), 1e-6 * (1.0 + vf_norm(first)));
}

TEST(TransformLie, DivergenceGuard)
{
  std::mt19937_64 rng(39);
  const auto lat = make_lattice(1, 4);
  const auto N = spectrum({1.1}, 3, 1.0);
  const auto P = random_tl_ham(lat, 3, 0.3, 2, rng);
  EXPECT_THROW(transform_lie({N, P}, scaled(P, 50.0)), LieDivergence);
  LieOptions few;
  few.max_terms = 2;
  EXPECT_THROW(transform_lie({N, P}, scaled(P, 0.1), few), LieDivergence);
}

TEST(TransformEquivalence, FlowAndLieAgreeOnRandomInstances)
{
  std::mt19937_64 rng(40);
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi), sc(0.005, 0.05);
  for (int trial = 0; trial < 50; ++trial)
  {
    const int dim = 1 + trial % 2;
    const int J = 3 + trial % 4;
    const auto lat = make_lattice(dim, dim == 1 ? 8 : 4);
    std::vector<double> omega(dim);
    for (auto &w : omega)
    {
      w = u(rng);
    }
    Hamiltonian H{spectrum(omega, J, 1.0), scaled(random_tl_ham(lat, J, 0.3, 2, rng), 0.1)};
    const auto F = scaled(random_tl_ham(lat, J, 0.3, 2, rng), sc(rng));
    const auto map = flow_map(F);
    const auto flow = transform_flow(H, map);
    const auto lie = transform_lie(H, F);
    auto diff = flow.P;
    diff -= lie.H.P;
    const double budget =
        10.0 * (1e-15 * (1.0 + vf_norm(H.P)) + 1e-12 + map.error_estimate + lie.tail_bound + flow.P.tail_norm());
    EXPECT_LE(vf_norm(diff), budget) << "trial " << trial;
    EXPECT_LE(map.symplectic_defect(), 1e-10);
    EXPECT_LE(flow.P.reality_defect(), 1e-13);
  }
}

TEST(FlowEstimates, JacobianDeviationBoundedByGeneratorSeminorm)
{
  std::mt19937_64 rng(41);
  const double rho = 0.3, delta = 0.1, sigma = 0.1;
  for (int trial = 0; trial < 100; ++trial)
  {
    const auto lat = make_lattice(1, 6);
    const auto F = scaled(random_tl_ham(lat, 6, rho, 3, rng), 0.002 * (1 + trial % 10));
    const auto map = flow_map(F);
    const double r = F.analyticity().r - sigma;
    const double lhs = tl_matnorm(jacobian_deviation(map, lat), rho - delta, r).combined();
    const double rhs = tl_seminorm(F, rho, r).combined();
    EXPECT_LE(lhs, 2.0 * rhs) << trial;
  }
}

TEST(FlowEstimates, CanonicalTransformationBound)
{
  // <R o X^1_F>_{rho - 3 delta, r - sigma} <= 16 delta^-2 <R>_rho
  std::mt19937_64 rng(42);
  const double rho = 0.3, delta = 0.08, sigma = 0.1;
  for (int trial = 0; trial < 100; ++trial)
  {
    const auto lat = make_lattice(1, 6);
    const auto R = random_tl_ham(lat, 6, rho, 3, rng);
    const auto F = scaled(random_tl_ham(lat, 6, rho, 3, rng), 0.002 * (1 + trial % 10));
    const auto RF = compose_quadratic(R, flow_map(F));
    const double lhs = tl_seminorm(RF, rho - 3.0 * delta, R.analyticity().r - sigma).combined();
    const double rhs = 16.0 / (delta * delta) * tl_seminorm(R, rho).combined();
    EXPECT_LE(lhs, rhs) << trial;
  }
}

TEST(ComposeQuadratic, IdentityMapRoundTrip)
{
  std::mt19937_64 rng(43);
  for (int dim : {1, 2})
  {
    const auto lat = make_lattice(dim, 3);
    const auto R = random_tl_ham(lat, 3, 0.3, 3, rng);
    const auto out = compose_quadratic(R, SymplecticMap::identity(default_grid(*lat), 3));
    EXPECT_LE(max_abs_diff(out, R), 1e-14);
    EXPECT_LE(out.tail_norm(), 1e-12 * vf_norm(R));  // DFT roundoff only
  }
}

}  // namespace
