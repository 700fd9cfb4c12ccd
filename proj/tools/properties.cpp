// SPDX-License-Identifier: Apache-2.0
#include "properties.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kamreduce/approxfn.hpp"
#include "kamreduce/errors.hpp"
#include "kamreduce/flow.hpp"
#include "kamreduce/homological.hpp"
#include "kamreduce/kamloop.hpp"
#include "kamreduce/models.hpp"
#include "kamreduce/smalldiv.hpp"
#include "kamreduce/testing.hpp"
#include "kamreduce/verify.hpp"

namespace kamreduce::cli
{

void Tally::add(double value)
{
  ++r_.instances;
  r_.worst = std::max(r_.worst, value);
  if (!(value <= r_.bound))
  {
    ++r_.violations;
  }
}

namespace
{

using testing::random_tl_ham;

constexpr double PI = std::numbers::pi;
constexpr cplx I1{0.0, 1.0};

using Rng = std::mt19937_64;

double uniform(Rng &rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
int uniform_int(Rng &rng, int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }

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

ApproximationFunction random_af(Rng &rng)
{
  switch (uniform_int(rng, 0, 3))
  {
  case 0:
    return ApproximationFunction::power(uniform(rng, 0.1, 0.9));
  case 1:
    return ApproximationFunction::log_damped(uniform(rng, 1.1, 2.0));  // non-monotone above alpha = 2
  case 2:
    return ApproximationFunction::log_power(uniform(rng, 1.1, 3.0));
  default:
    return ApproximationFunction::constant();
  }
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Taylor series after scaling to norm <= 1/2, then squaring.
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

// z' = i H z with Hermitian [[h11, c], [c, h22]].
std::array<cplx, 2> hermitian_flow(double h11, double h22, double c, std::array<cplx, 2> z, double t)
{
  const double mu = 0.5 * (h11 + h22);
  const double lam = std::hypot(0.5 * (h11 - h22), c);
  const cplx ph = std::polar(1.0, mu * t);
  const double co = std::cos(lam * t), si = std::sin(lam * t) / lam;
  return {ph * (co * z[0] + I1 * si * ((h11 - mu) * z[0] + c * z[1])),
          ph * (co * z[1] + I1 * si * (c * z[0] + (h22 - mu) * z[1]))};
}

// c e^{i theta} z_1 zbar_2 + c.c. on two modes; exact in the frame y_2 = e^{-i omega t} z_2.
struct Rotating
{
  NormalForm N;
  QuadHam P;
  double c;

  Rotating(Rng &rng)
      : N(spectrum({uniform(rng, 0.3, 1.5)}, 2, 0.0)), P(make_lattice(1, 1), 2, {}), c(uniform(rng, 0.05, 0.3))
  {
    N.shift = {uniform(rng, -0.4, 0.4), uniform(rng, -0.4, 0.4)};
    const int plus[] = {1}, minus[] = {-1};
    P.at(plus).zzbar(0, 1) = c;
    P.at(minus).zzbar(1, 0) = c;
  }

  double error(const Trajectory &tr, std::array<cplx, 2> z0) const
  {
    const double w = N.omega[0];
    double worst = 0.0;
    for (std::size_t s = 0; s < tr.times.size(); ++s)
    {
      auto y = hermitian_flow(N.frequency(1), N.frequency(2) - w, c, z0, tr.times[s]);
      y[1] *= std::polar(1.0, w * tr.times[s]);
      worst = std::max({worst, std::abs(tr.states[s](0) - y[0]), std::abs(tr.states[s](2) - y[1])});
    }
    return worst;
  }
};

PropertyResult af_normalization(Rng &rng, int n, double scale)
{
  Tally t("approxfn.normalization", 1e-15 * scale);
  for (int i = 0; i < n; ++i)
  {
    const auto af = random_af(rng);
    const double a = uniform(rng, 0.0, 50.0), b = a + uniform(rng, 0.0, 50.0);
    t.add(std::abs(eval_delta(af, 0.0) - 1.0) + std::max(0.0, af.log_delta(a) - af.log_delta(b)));
  }
  return t.result();
}

PropertyResult gamma_shift(Rng &rng, int n, double scale)
{
  // Gamma_{k,3}(sigma) <= sigma^l Gamma_{k+l,3}(sigma), in logs.
  Tally t("approxfn.gamma_shift", std::log1p(1e-9) * scale);
  for (int i = 0; i < n; ++i)
  {
    const auto af = random_af(rng);
    const int k = uniform_int(rng, 1, 4), l = uniform_int(rng, 0, 3);
    const double sigma = std::pow(10.0, uniform(rng, -1.5, 1.0));
    try
    {
      const double lhs = log_gamma_ab(af, {k, 3, sigma}).log_value;
      const double rhs = l * std::log(sigma) + log_gamma_ab(af, {k + l, 3, sigma}).log_value;
      t.add(lhs - rhs);
    }
    catch (const OverflowError &)
    {
      --i;  // out of double range for this draw; redraw
    }
  }
  return t.result();
}

PropertyResult xi_certificate(Rng &rng, int n, double scale)
{
  Tally t("approxfn.xi_certificate", std::log1p(1e-6) * scale);
  const ApproximationFunction fams[] = {ApproximationFunction::power(0.5), ApproximationFunction::log_power(2.0),
                                        ApproximationFunction::constant()};
  for (int i = 0; i < n; ++i)
  {
    const auto &af = fams[static_cast<std::size_t>(i % 3)];
    const double T = 10.0 * uniform(rng, 1.1, 4.0);
    const double sigma = uniform(rng, 1.1, 4.0) * xi_precondition(af, 4.0 / 3.0, T);
    const auto s = xi_schedule(af, sigma, 4.0 / 3.0, T);
    t.add(s.certified ? s.log_xi - sigma * T : INFINITY);
  }
  return t.result();
}

PropertyResult bracket_oracle(Rng &rng, int n, double scale)
{
  Tally t("hamrep.bracket_oracle", 1e-13 * scale);
  const auto lat = make_lattice(1, 4);
  for (int i = 0; i < n; ++i)
  {
    const int J = uniform_int(rng, 3, 8);
    const auto R = random_tl_ham(lat, J, 0.4, 2, rng);
    const auto F = random_tl_ham(lat, J, 0.4, 2, rng);
    t.add(max_abs_diff(poisson_bracket(R, F), testing::bracket_oracle(R, F)) / (1.0 + vf_norm(R) * vf_norm(F)));
  }
  return t.result();
}

PropertyResult bracket_jacobi(Rng &rng, int n, double scale)
{
  Tally t("hamrep.bracket_jacobi", 1e-12 * scale);
  const auto lat = make_lattice(1, 6);
  for (int i = 0; i < n; ++i)
  {
    const int J = uniform_int(rng, 3, 6);
    const auto A = random_tl_ham(lat, J, 0.4, 2, rng);
    const auto B = random_tl_ham(lat, J, 0.4, 2, rng);
    const auto C = random_tl_ham(lat, J, 0.4, 2, rng);
    const auto sum = poisson_bracket(poisson_bracket(A, B), C) + poisson_bracket(poisson_bracket(B, C), A) +
                     poisson_bracket(poisson_bracket(C, A), B);
    t.add(vf_norm(sum) / (vf_norm(A) * vf_norm(B) * vf_norm(C)));
  }
  return t.result();
}

PropertyResult bracket_tl_bound(Rng &rng, int n, double scale)
{
  // <{R,F}>_{rho - delta} <= (4 / delta) <R>_rho <F>_rho
  Tally t("hamrep.bracket_tl_bound", 1.0 * scale);
  const auto lat = make_lattice(1, 6);
  const double rho = 0.6;
  for (int i = 0; i < n; ++i)
  {
    const int J = uniform_int(rng, 4, 12);
    const auto R = random_tl_ham(lat, J, rho, 3, rng);
    const auto F = random_tl_ham(lat, J, rho, 3, rng);
    const double delta = uniform(rng, 0.05, 0.3);
    const double lhs = tl_seminorm(poisson_bracket(R, F), rho - delta).combined();
    t.add(lhs / (4.0 / delta * tl_seminorm(R, rho).combined() * tl_seminorm(F, rho).combined()));
  }
  return t.result();
}

PropertyResult product_tl_bound(Rng &rng, int n, double scale)
{
  Tally t("hamrep.product_tl_bound", 1.0 * scale);
  const auto lat = make_lattice(1, 6);
  const double rho = 0.6, r = 0.5;
  for (int i = 0; i < n; ++i)
  {
    const int J = uniform_int(rng, 4, 12);
    const auto A = hessian_matrix(random_tl_ham(lat, J, rho, 3, rng));
    const auto B = hessian_matrix(random_tl_ham(lat, J, rho, 3, rng));
    const double delta = uniform(rng, 0.05, 0.3);
    const double lhs = tl_matnorm(matmul(A, B, r), rho - delta, r).combined();
    t.add(lhs / (4.0 / delta * tl_matnorm(A, rho, r).combined() * tl_matnorm(B, rho, r).combined()));
  }
  return t.result();
}

PropertyResult af_identity(Rng &rng, int n, double scale)
{
  // The matrix A = J d^2 F carries the same TL seminorm as F.
  Tally t("hamrep.hessian_norm_identity", 1e-12 * scale);
  const auto lat = make_lattice(2, 3);
  for (int i = 0; i < n; ++i)
  {
    const double rho = uniform(rng, 0.1, 0.8), r = uniform(rng, 0.1, 1.0);
    const auto F = random_tl_ham(lat, uniform_int(rng, 3, 8), rho, 3, rng);
    const auto a = tl_matnorm(hessian_matrix(F), rho, r);
    const auto b = tl_seminorm(F, rho, r);
    t.add(std::max(rel(a.M1, b.M1), rel(a.M3, b.M3)));
  }
  return t.result();
}

PropertyResult fourier_remainder(Rng &rng, int n, double scale)
{
  // ||R - T_K R||_{r - 2 sigma} <= 32 sigma^-2 e^{-K sigma} ||R||_r
  Tally t("hamrep.fourier_remainder", 1.0 * scale);
  const auto lat = make_lattice(1, 16);
  for (int i = 0; i < n; ++i)
  {
    Analyticity an{uniform(rng, 0.3, 1.0), 1.0, 0.0, 0.0};
    const auto P = random_tl_ham(lat, uniform_int(rng, 3, 6), 0.3, 16, rng, an);
    const double sigma = an.r * uniform(rng, 0.05, 0.45);
    const int K = uniform_int(rng, 2, 14);
    const auto tr = truncate_fourier(P, K, sigma);
    t.add(tr.remainder_norm / (32.0 / (sigma * sigma) * std::exp(-K * sigma) * vf_norm(P)));
  }
  return t.result();
}

PropertyResult exponential_sum(Rng &rng, int n, double scale)
{
  // sum_k e^{-delta (|i - k| + |k - j|)} <= 4 / delta
  Tally t("hamrep.exponential_sum", 1.0 * scale);
  for (int s = 0; s < n; ++s)
  {
    const double delta = uniform(rng, 0.05, 1.0);
    const int i = uniform_int(rng, -50, 50), j = uniform_int(rng, -50, 50);
    const int L = 50 + static_cast<int>(std::ceil(45.0 / delta));
    double sum = 0.0;
    for (int k = -L; k <= L; ++k)
    {
      sum += std::exp(-delta * (std::abs(i - k) + std::abs(k - j)));
    }
    t.add(sum * delta / 4.0);
  }
  return t.result();
}

PropertyResult fast_scan(Rng &rng, int n, double scale)
{
  Tally t("smalldiv.fast_scan", 1e-12 * scale);
  for (int s = 0; s < n; ++s)
  {
    const int dim = uniform_int(rng, 1, 2);
    std::vector<double> omega(static_cast<std::size_t>(dim));
    for (auto &w : omega)
    {
      w = uniform(rng, 0.0, 2.0 * PI);
    }
    const auto N = spectrum(omega, uniform_int(rng, 4, 10), uniform(rng, 0.0, 2.0));
    const ResonanceQuery q{random_af(rng), 0.01, uniform_int(rng, 2, dim == 1 ? 10 : 5), N.modes(),
                           pair_range_constant(N)};
    const auto a = scan_divisors(omega, N, q);
    const auto b = scan_divisors_exhaustive(omega, N, q);
    t.add(std::abs(a.value - b.value) / std::max(1.0, b.value));
  }
  return t.result();
}

PropertyResult fraction_monotone(Rng &rng, int n, double scale)
{
  // Nested exclusion sets: f(gamma_small) - f(gamma_large) <= 0.
  Tally t("smalldiv.fraction_monotone", 0.0 * scale);
  for (int s = 0; s < n; ++s)
  {
    const int J = uniform_int(rng, 4, 12);
    const double m = uniform(rng, 0.0, 2.0);
    const auto N = spectrum({}, J, m);
    const NormalFormBuilder builder = [&](std::span<const double>) { return N; };
    const ResonanceQuery q{random_af(rng), 0.1, uniform_int(rng, 2, 6), J, pair_range_constant(N)};
    const double g1 = std::pow(10.0, uniform(rng, -3.0, -1.0));
    const double gammas[] = {g1, g1 * uniform(rng, 1.0, 5.0)};
    const auto f = excluded_fractions(q, gammas, builder, 1, 2000);
    t.add(f[0] - f[1]);
  }
  return t.result();
}

PropertyResult russmann(Rng &rng, int n, double scale)
{
  // f = c (t - t0)^q + lower order: f^(q) = c q!, so |{|f| <= eps}| <= 4 (q! eps / (2 beta))^{1/q}.
  Tally t("smalldiv.russmann", 0.0 * scale);
  for (int s = 0; s < n; ++s)
  {
    const int q = 1 + s % 3;
    const double c = uniform(rng, 0.5, 3.0), t0 = uniform(rng, -1.0, 1.0), a1 = 0.3 * uniform(rng, -1.0, 1.0);
    auto f = [&](double x) { return c * std::pow(x - t0, q) + (q >= 2 ? a1 * (x - t0) : 0.0); };
    double fact = 1.0;
    for (int i = 2; i <= q; ++i)
    {
      fact *= i;
    }
    const auto r = russmann_check(f, -1.0, 1.0, q, c * fact, std::pow(10.0, uniform(rng, -4.0, -1.0)), 20000);
    t.add(r.precondition_verified ? r.measured - r.bound - r.slack : INFINITY);
  }
  return t.result();
}

PropertyResult homological_residual(Rng &rng, int n, double scale)
{
  Tally t("homological.residual", 1e-12 * scale);
  const auto lat = make_lattice(2, 6);
  for (int s = 0; s < n; ++s)
  {
    const auto R = random_tl_ham(lat, uniform_int(rng, 4, 12), 0.3, 5, rng);
    for (int attempt = 0; attempt < 50; ++attempt)
    {
      const auto N = spectrum({uniform(rng, 0.0, 2.0 * PI), uniform(rng, 0.0, 2.0 * PI)}, R.modes(), 1.0);
      try
      {
        SolveOptions o;
        o.gamma = 1e-3;
        o.K = 6;
        const auto sol = solve_homological(N, R, o);
        t.add(homological_residual(N, sol.F, R, sol.correction) / vf_norm(R));
        break;
      }
      catch (const DivisorViolation &)
      {
      }
    }
  }
  return t.result();
}

PropertyResult expm_oracle(Rng &rng, int n, double scale)
{
  Tally t("flow.expm_oracle", 1e-12 * scale);
  for (int s = 0; s < n; ++s)
  {
    const int J = uniform_int(rng, 1, 5);
    // Not Matrix::Random: that draws from the global std::rand state.
    Matrix S(2 * J, 2 * J);
    for (Eigen::Index i = 0; i < S.size(); ++i)
    {
      S.data()[i] = cplx(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
    }
    S = (0.5 * (S + S.transpose())).eval();
    S *= uniform(rng, 0.001, 3.0) / S.cwiseAbs().maxCoeff();
    const Matrix A = I1 * (symplectic_unit(J) * S);
    const Matrix E = taylor_expm(A);
    t.add((expm(A) - E).cwiseAbs().maxCoeff() / E.cwiseAbs().maxCoeff());
  }
  return t.result();
}

PropertyResult flow_symplectic(Rng &rng, int n, double scale)
{
  Tally t("flow.symplectic", 1e-10 * scale);
  for (int s = 0; s < n; ++s)
  {
    const int dim = uniform_int(rng, 1, 2);
    const auto lat = make_lattice(dim, dim == 1 ? 6 : 3);
    const auto F = scaled(random_tl_ham(lat, uniform_int(rng, 2, 8), 0.3, 3, rng), uniform(rng, 0.001, 0.3));
    t.add(flow_map(F).symplectic_defect());
  }
  return t.result();
}

PropertyResult lie_equivalence(Rng &rng, int n, double scale)
{
  // transform_flow and the Lie series agree within their combined error estimates.
  Tally t("flow.lie_equivalence", 1.0 * scale);
  for (int s = 0; s < n; ++s)
  {
    const int dim = 1 + s % 2;
    const int J = 3 + s % 4;
    const auto lat = make_lattice(dim, dim == 1 ? 8 : 4);
    std::vector<double> omega(static_cast<std::size_t>(dim));
    for (auto &w : omega)
    {
      w = uniform(rng, 0.0, 2.0 * PI);
    }
    const Hamiltonian H{spectrum(omega, J, 1.0), scaled(random_tl_ham(lat, J, 0.3, 2, rng), 0.1)};
    const auto F = scaled(random_tl_ham(lat, J, 0.3, 2, rng), uniform(rng, 0.005, 0.05));
    const auto map = flow_map(F);
    const auto flow = transform_flow(H, map);
    const auto lie = transform_lie(H, F);
    const double budget =
        10.0 * (1e-15 * (1.0 + vf_norm(H.P)) + 1e-12 + map.error_estimate + lie.tail_bound + flow.P.tail_norm());
    t.add(std::max(vf_norm(flow.P - lie.H.P) / budget, map.symplectic_defect() / 1e-10));
  }
  return t.result();
}

PropertyResult canonical_bound(Rng &rng, int n, double scale)
{
  // <R o X^1_F>_{rho - 3 delta, r - sigma} <= 16 delta^-2 <R>_rho
  Tally t("flow.canonical_bound", 1.0 * scale);
  const double rho = 0.3, delta = 0.08, sigma = 0.1;
  const auto lat = make_lattice(1, 6);
  for (int s = 0; s < n; ++s)
  {
    const auto R = random_tl_ham(lat, 6, rho, 3, rng);
    const auto F = scaled(random_tl_ham(lat, 6, rho, 3, rng), uniform(rng, 0.002, 0.02));
    const auto RF = compose_quadratic(R, flow_map(F));
    const double lhs = tl_seminorm(RF, rho - 3.0 * delta, R.analyticity().r - sigma).combined();
    t.add(lhs / (16.0 / (delta * delta) * tl_seminorm(R, rho).combined()));
  }
  return t.result();
}

PropertyResult dirichlet_quadrature(Rng &rng, int n, double scale)
{
  // Closed-form couplings against the trapezoid rule, exact for these trig polynomials.
  Tally t("models.dirichlet_quadrature", 1e-13 * scale);
  const auto lat = make_lattice(1, 3);
  constexpr int NODES = 512;
  for (int s = 0; s < n; ++s)
  {
    const auto V = random_analytic(lat, 1.0, 0.2, 1.0, 0.5, 40, 3, rng());
    const int i = uniform_int(rng, 1, 20), j = uniform_int(rng, 1, 20);
    const auto p = dirichlet_coupling(V, i, j);
    double worst = 0.0;
    for (std::size_t idx = 0; idx < lat->size(); ++idx)
    {
      cplx acc{};
      for (int q = 0; q < NODES; ++q)
      {
        const double x = 2.0 * PI * q / NODES;
        cplx v{};
        for (int l = 0; l <= V.degree(); ++l)
        {
          v += V.harmonics[static_cast<std::size_t>(l)][idx] * std::cos(l * x);
        }
        acc += v * (2.0 / PI) * std::sin(i * x) * std::sin(j * x);
      }
      worst = std::max(worst, std::abs(p[idx] - 0.5 * acc * (2.0 * PI / NODES)));
    }
    t.add(worst);
  }
  return t.result();
}

PropertyResult schedule_contraction(Rng &rng, int n, double scale)
{
  // log [P_{nu+1}] - kappa log [P_nu] <= log Gamma_nu on random half-wave problems. Gamma_nu
  // overflows double range, so the check runs in logs.
  Tally t("kamloop.schedule_contraction", 0.0 * scale);
  const auto lat = make_lattice(1, 8);
  for (int s = 0; s < n; ++s)
  {
    const auto V = random_analytic(lat, 1.0, 0.25, 1.0, 0.5, 6, 3, rng());
    const auto model = halfwave_hamiltonian(uniform(rng, 2e-4, 2e-3), V, 8, {0.5, 1.0, 0.25, 1.0}, {PI * (std::sqrt(5.0) - 1.0)});
    ScheduleParams p;
    p.K_cap = 8;
    p.nu_max = 3;
    p.eps0 = perturbation_size(model.P, p.rho0, p.r0, &model.limits);
    const auto sched = build_schedule(p);
    ReduceOptions ro;
    ro.nu_max = 3;
    const auto res = reduce({model.N, model.P}, sched, ro, &model.limits);
    double worst = -INFINITY;
    for (const auto &row : res.table)
    {
      if (row.stepped)
      {
        worst = std::max(worst, std::log(row.next_size) - p.kappa * std::log(row.P_size) -
                                    sched.log_Gamma[static_cast<std::size_t>(row.nu)]);
      }
    }
    t.add(worst);
  }
  return t.result();
}

PropertyResult rk4_oracle(Rng &rng, int n, double scale)
{
  Tally t("verify.rk4_oracle", 1e-8 * scale);
  for (int s = 0; s < n; ++s)
  {
    const Rotating sys(rng);
    const std::array<cplx, 2> z0{std::polar(uniform(rng, 0.1, 1.0), uniform(rng, 0.0, 2.0 * PI)),
                                 std::polar(uniform(rng, 0.1, 1.0), uniform(rng, 0.0, 2.0 * PI))};
    DirectOptions opt;
    opt.T = 10.0;
    opt.samples = 20;
    t.add(sys.error(integrate_direct(sys.N, sys.P, real_state({z0[0], z0[1]}), opt), z0));
  }
  return t.result();
}

PropertyResult rk4_order(Rng &rng, int n, double scale)
{
  // Halving dt divides the global error by 16 within 20%.
  Tally t("verify.rk4_order", 0.2 * scale);
  for (int s = 0; s < n; ++s)
  {
    const Rotating sys(rng);
    const std::array<cplx, 2> z0{cplx(0.6, 0.2), cplx(-0.3, 0.5)};
    DirectOptions opt;
    opt.T = 10.0;
    opt.samples = 1;
    opt.dt = 0.02;
    const double e1 = sys.error(integrate_direct(sys.N, sys.P, real_state({z0[0], z0[1]}), opt), z0);
    opt.dt = 0.01;
    const double e2 = sys.error(integrate_direct(sys.N, sys.P, real_state({z0[0], z0[1]}), opt), z0);
    t.add(std::abs(e1 / e2 / 16.0 - 1.0));
  }
  return t.result();
}

std::uint64_t name_hash(const std::string &s)
{
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : s)
  {
    h = (h ^ c) * 1099511628211ull;
  }
  return h;
}

}  // namespace

const std::vector<Property> &property_suite()
{
  static const std::vector<Property> suite{
      {"approxfn.normalization", "Delta(0) = 1 and Delta non-decreasing", af_normalization},
      {"approxfn.gamma_shift", "Gamma_{k,3}(sigma) <= sigma^l Gamma_{k+l,3}(sigma)", gamma_shift},
      {"approxfn.xi_certificate", "certified Xi <= e^{sigma T}", xi_certificate},
      {"hamrep.bracket_oracle", "bracket equals the Hessian commutator oracle", bracket_oracle},
      {"hamrep.bracket_jacobi", "Jacobi identity of the bracket", bracket_jacobi},
      {"hamrep.bracket_tl_bound", "TL bracket bound with constant 4", bracket_tl_bound},
      {"hamrep.product_tl_bound", "TL matrix product bound with constant 4", product_tl_bound},
      {"hamrep.hessian_norm_identity", "<J d^2 F> = <F> to 1e-12", af_identity},
      {"hamrep.fourier_remainder", "truncation remainder below 32 sigma^-2 e^{-K sigma}", fourier_remainder},
      {"hamrep.exponential_sum", "sum_k e^{-delta(|i-k|+|k-j|)} <= 4 / delta", exponential_sum},
      {"smalldiv.fast_scan", "nearest-neighbour scan equals exhaustive enumeration", fast_scan},
      {"smalldiv.fraction_monotone", "excluded fraction non-decreasing in gamma", fraction_monotone},
      {"smalldiv.russmann", "sublevel measure below 4 (q! eps / 2 beta)^{1/q}", russmann},
      {"homological.residual", "homological residual below 1e-12 ||R||", homological_residual},
      {"flow.expm_oracle", "Pade exponential against the Taylor oracle", expm_oracle},
      {"flow.symplectic", "L^T J L = J on every grid point", flow_symplectic},
      {"flow.lie_equivalence", "grid flow and Lie series agree", lie_equivalence},
      {"flow.canonical_bound", "canonical transformation bound with constant 16", canonical_bound},
      {"models.dirichlet_quadrature", "closed-form couplings against quadrature", dirichlet_quadrature},
      {"kamloop.schedule_contraction", "[P_{nu+1}] <= Gamma_nu [P_nu]^kappa", schedule_contraction},
      {"verify.rk4_oracle", "RK4 against the rotating 2x2 closed form", rk4_oracle},
      {"verify.rk4_order", "RK4 global error ratio 16 under dt halving", rk4_order},
  };
  return suite;
}

const Property &find_property(const std::string &name)
{
  for (const auto &p : property_suite())
  {
    if (p.name == name)
    {
      return p;
    }
  }
  throw std::out_of_range("unknown property " + name);
}

PropertyResult run_property(const Property &p, std::uint64_t seed, int instances, double scale)
{
  const std::uint64_t h = name_hash(p.name);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  std::mt19937_64 rng(seq);
  auto r = p.run(rng, instances, scale);
  r.name = p.name;
  return r;
}

}  // namespace kamreduce::cli
