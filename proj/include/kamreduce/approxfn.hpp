// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

namespace kamreduce
{

enum class AfFamily
{
  Power,      // exp(t^alpha / alpha), 0 < alpha < 1
  LogDamped,  // exp(t / (1 + log^alpha(1 + t))), alpha > 1
  LogPower,   // exp(t / log^alpha t), alpha > 1, linear ramp below the onset e^alpha
  Constant,
  Tabulated
};

// Approximation function Delta with Delta(0) = 1. Internally everything is carried as
// log Delta to avoid overflow.
class ApproximationFunction
{
public:
  static ApproximationFunction power(double alpha);
  static ApproximationFunction log_damped(double alpha);
  static ApproximationFunction log_power(double alpha);
  static ApproximationFunction constant();
  // Points (t, Delta(t)); must start at (0, 1) with t strictly increasing.
  static ApproximationFunction tabulated(std::vector<std::pair<double, double>> table);

  AfFamily family() const { return family_; }
  double alpha() const { return alpha_; }
  std::string name() const;

  // Onset from which log Delta(t)/t is required to be non-increasing.
  double onset() const;

  double log_delta(double t) const;
  // log Delta(e^u) / e^u, stable for large u.
  double log_delta_ratio_at_log(double u) const;
  // Right derivative of log Delta.
  double dlog_delta(double t) const;

private:
  ApproximationFunction(AfFamily f, double alpha) : family_(f), alpha_(alpha) {}

  AfFamily family_;
  double alpha_;
  std::vector<double> table_t_, table_log_;
};

double eval_delta(const ApproximationFunction &af, double t);

struct ValidationReport
{
  bool monotone = true;
  bool log_ratio_decreasing = true;  // log Delta(t)/t non-increasing past the onset
  double onset = 0.0;
  int exponent = 2;                  // Brjuno integrand log Delta / t^exponent
  double integral = 0.0;             // over [1, t_max]
  double tail_estimate = 0.0;
  bool converged = false;
  bool divergent = false;
  double total() const { return integral + tail_estimate; }
  bool ok() const { return monotone && log_ratio_decreasing && converged; }
};

ValidationReport validate_af(const ApproximationFunction &af, double t_max, int n_grid,
                             int exponent = 2);

struct GammaQuery
{
  int a = 0;
  int b = 0;
  double sigma = 1.0;
};

struct GammaResult
{
  double log_value = 0.0;
  double argmax = 0.0;
};

// sup_{t>=0} (1+t)^a Delta^b(t) e^{-t sigma}, in log form.
GammaResult log_gamma_ab(const ApproximationFunction &af, const GammaQuery &q);
double gamma_ab(const ApproximationFunction &af, const GammaQuery &q);

// (1/log kappa) int_T^inf log((1+t)^2 Delta^3(t)) / t^2 dt
double xi_precondition(const ApproximationFunction &af, double kappa, double T);

struct XiSchedule
{
  std::vector<double> sigma;   // sigma_nu, non-increasing
  double sigma_total = 0.0;    // requested sigma
  double kappa = 0.0;
  double T = 0.0;
  double precondition = 0.0;
  double log_xi = 0.0;         // sum_nu kappa^{-(nu+1)} log Gamma_23(sigma_nu)
  double log_bound = 0.0;      // sigma T
  bool certified = false;
  double sum() const;
};

XiSchedule xi_schedule(const ApproximationFunction &af, double sigma, double kappa, double T);

// Smallest T = 2^m making the schedule feasible.
double xi_auto_T(const ApproximationFunction &af, double sigma, double kappa);

struct BrjunoSum
{
  double partial = 0.0;
  double tail_bound = 0.0;
  bool summable = false;
};

// #{k in Z^n : |k|_1 = m}
double lattice_shell_count(int n, int m);

BrjunoSum brjuno_sum(const ApproximationFunction &af, int n, int k_max);

// Throws SummabilityError when the sum is not summable.
double brjuno_total(const ApproximationFunction &af, int n, int k_max);

}  // namespace kamreduce
