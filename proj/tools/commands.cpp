// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <numbers>
#include <random>
#include <sstream>

#include "kamreduce/csv.hpp"
#include "kamreduce/errors.hpp"
#include "kamreduce/smalldiv.hpp"
#include "kamreduce/verify.hpp"
#include "properties.hpp"

namespace kamreduce::cli
{

namespace
{

std::string format_int(long long v) { return std::to_string(v); }

std::string join_ints(const std::vector<int> &k)
{
  std::string s;
  for (std::size_t d = 0; d < k.size(); ++d)
  {
    s += (d ? ";" : "") + std::to_string(k[d]);
  }
  return s;
}

void ensure_dir(const std::filesystem::path &dir)
{
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
  {
    throw IoError("cannot create output directory " + dir.string());
  }
}

void write_output(const RunContext &ctx, const char *name, const std::string &content)
{
  write_file_atomic(ctx.out / name, content);
  if (ctx.log)
  {
    *ctx.log << "wrote " << (ctx.out / name).string() << '\n';
  }
}

Json manifest(const RunContext &ctx, const char *command)
{
  Json m = Json::object();
  m["format"] = "kamreduce-manifest/1";
  m["command"] = command;
  m["config"] = ctx.cfg.resolved;
  return m;
}

Json schedule_json(const KamSchedule &s)
{
  Json j = Json::object();
  j["eps0"] = s.params.eps0;
  j["kappa"] = s.params.kappa;
  j["xi_T"] = s.xi.T;
  j["gate_main"] = s.gate_main;
  j["gate_strict"] = s.gate_strict;
  j["gate_ok"] = s.gate_ok;
  j["gamma"] = s.gamma;
  j["delta"] = s.delta;
  j["rho"] = s.rho;
  j["sigma"] = s.sigma;
  j["log_Gamma"] = s.log_Gamma;
  j["log_eps"] = s.log_eps;
  j["K_sched"] = s.K_sched;
  j["K_used"] = s.K_used;
  j["r"] = s.r;
  j["s"] = s.s;
  return j;
}

std::string convergence_csv(const std::vector<StepReport> &table)
{
  std::string out = csv_row({"nu", "stepped", "K", "gamma", "P_size", "P_vf", "P_tl", "next_size", "next_vf",
                             "next_tl", "worst_margin", "phi_dev", "omega_update", "tail_norm", "tail_growth",
                             "gate_ratio", "symplectic_defect", "flow_error"});
  for (const auto &r : table)
  {
    out += csv_row({format_int(r.nu), r.stepped ? "1" : "0", format_int(r.K), format_real(r.gamma),
                    format_real(r.P_size), format_real(r.P_vf), format_real(r.P_tl), format_real(r.next_size),
                    format_real(r.next_vf), format_real(r.next_tl), format_real(r.worst_margin),
                    format_real(r.phi_dev), format_real(r.omega_update), format_real(r.tail_norm),
                    format_real(r.tail_growth), format_real(r.gate_ratio), format_real(r.symplectic_defect),
                    format_real(r.flow_error)});
  }
  return out;
}

std::string normal_form_csv(const NormalForm &N0, const NormalForm &N)
{
  std::string out = csv_row({"j", "Omega_0", "Omega_inf", "shift_inf"});
  for (int j = 1; j <= N.modes(); ++j)
  {
    out += csv_row({format_int(j), format_real(N0.frequency(j)), format_real(N.frequency(j)),
                    format_real(N.shift[static_cast<std::size_t>(j - 1)])});
  }
  return out;
}

std::string resonance_csv(const DivisorViolation &e)
{
  return csv_row({"k", "i", "j", "value", "threshold"}) +
         csv_row({join_ints(e.mode()), format_int(e.row()), format_int(e.col()), format_real(e.value()),
                  format_real(e.threshold())});
}

const char *block_names[] = {"zz", "zzbar", "zbarzbar"};

Json generator_json(const QuadHam &F)
{
  Json terms = Json::array();
  for (std::size_t idx : F.support())
  {
    const auto &b = F[idx];
    const Matrix *blocks[] = {&b.zz, &b.zzbar, &b.zbarzbar};
    for (int kind = 0; kind < 3; ++kind)
    {
      const Matrix &m = *blocks[kind];
      for (Eigen::Index j = 0; j < m.cols(); ++j)
      {
        for (Eigen::Index i = 0; i < m.rows(); ++i)
        {
          if (m(i, j) != cplx{})
          {
            const auto k = F.lattice().mode(idx);
            terms.push_back({std::vector<int>(k.begin(), k.end()), block_names[kind], i, j, m(i, j).real(),
                             m(i, j).imag()});
          }
        }
      }
    }
  }
  const auto &an = F.analyticity();
  Json g = Json::object();
  g["analyticity"] = {{"r", an.r}, {"s", an.s}, {"a", an.a}, {"p", an.p}};
  g["terms"] = std::move(terms);
  return g;
}

// Throws on anything malformed; load_chain maps it to IoError.
QuadHam generator_from_json(const Json &g, const LatticePtr &lat, int J)
{
  const auto &a = g.at("analyticity");
  QuadHam F(lat, J, {a.at("r").get<double>(), a.at("s").get<double>(), a.at("a").get<double>(), a.at("p").get<double>()});
  for (const auto &t : g.at("terms"))
  {
    if (!t.is_array() || t.size() != 6)
    {
      throw std::invalid_argument("term must have 6 entries");
    }
    const auto k = t[0].get<std::vector<int>>();
    const auto name = t[1].get<std::string>();
    const auto i = t[2].get<Eigen::Index>(), j = t[3].get<Eigen::Index>();
    if (static_cast<int>(k.size()) != lat->dim() || lat->index(k) == FourierLattice::npos || i < 0 || j < 0 ||
        i >= J || j >= J)
    {
      throw std::invalid_argument("term outside the lattice or mode range");
    }
    auto &b = F.at(k);
    const cplx v{t[4].get<double>(), t[5].get<double>()};
    if (name == "zz")
    {
      b.zz(i, j) = v;
    }
    else if (name == "zzbar")
    {
      b.zzbar(i, j) = v;
    }
    else if (name == "zbarzbar")
    {
      b.zbarzbar(i, j) = v;
    }
    else
    {
      throw std::invalid_argument("unknown block " + name);
    }
  }
  return F;
}

ResonanceQuery frequency_query(const ExperimentConfig &cfg, const NormalForm &N, int K, int J, std::optional<double> A2)
{
  return {cfg.af, 0.1, K, J, A2 ? *A2 : pair_range_constant(N)};
}

}  // namespace

NormalForm model_spectrum(ModelKind kind, double mass, int J, std::size_t dim)
{
  NormalForm N;
  N.omega.assign(dim, 0.0);
  for (int j = 1; j <= J; ++j)
  {
    N.shift.push_back(kind == ModelKind::Wave ? std::sqrt(static_cast<double>(j) * j + mass) - j : 0.0);
  }
  N.shift_bound = kind == ModelKind::Wave ? 1.0 + mass : 1.0;
  N.shift_limit = 0.0;
  return N;
}

ModelHamiltonian build_model(const ExperimentConfig &cfg, Potential *potential)
{
  const auto &m = cfg.model;
  const auto lat = make_lattice(static_cast<int>(m.omega.size()), cfg.schedule.K_cap);
  const auto &pc = m.potential;
  Potential V = pc.kind == "single-cosine" ? single_cosine(lat, pc.c, pc.a, pc.p, m.an.r)
                : pc.kind == "geometric"   ? geometric_potential(lat, pc.c, pc.a, pc.p, pc.degree, m.an.r)
                                           : random_analytic(lat, pc.c, pc.a, pc.p, m.an.r, pc.degree, pc.radius, cfg.seed);
  auto model = m.kind == ModelKind::Wave ? wave_hamiltonian(m.mass, m.eps, V, m.J, m.an, m.omega)
                                         : halfwave_hamiltonian(m.eps, V, m.J, m.an, m.omega);
  if (potential)
  {
    *potential = std::move(V);
  }
  return model;
}

KamSchedule build_schedule_for(const ExperimentConfig &cfg, const ModelHamiltonian &model)
{
  ScheduleParams p = cfg.schedule;
  p.eps0 = perturbation_size(model.P, p.rho0, p.r0, &model.limits);
  return build_schedule(p);
}

ReduceOptions reduce_options(const ExperimentConfig &cfg)
{
  ReduceOptions ro;
  ro.nu_max = cfg.schedule.nu_max;
  ro.stop_tol = cfg.reduce.stop_tol;
  ro.step.flow_tol = cfg.reduce.flow_tol;
  ro.step.gate_constant = cfg.reduce.gate_constant;
  ro.step.enforce_gate = cfg.reduce.enforce_gate;
  ro.step.scan_divisors = cfg.reduce.scan_divisors;
  ro.step.A2 = cfg.reduce.A2;
  return ro;
}

std::vector<cplx> seeded_initial_data(const Analyticity &an, int J, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<cplx> z(static_cast<std::size_t>(J));
  for (int j = 1; j <= J; ++j)
  {
    z[static_cast<std::size_t>(j - 1)] = std::polar(std::exp(-2.0 * an.a * j) * std::pow(j, -an.p), phase(rng));
  }
  return z;
}

std::string chain_to_json(const ReduceResult &res, const AngleGrid &grid, double flow_tol)
{
  Json doc = Json::object();
  doc["format"] = "kamreduce-chain/1";
  doc["dim"] = res.P.dim();
  doc["capacity"] = res.P.capacity();
  doc["modes"] = res.P.modes();
  doc["grid_points"] = grid.points;
  doc["flow_tol"] = flow_tol;
  doc["omega"] = res.N.omega;
  doc["shift"] = res.N.shift;
  doc["shift_bound"] = res.N.shift_bound;
  doc["P_final"] = res.table.empty() ? 0.0 : res.table.back().next_size;
  Json gens = Json::array();
  for (const auto &m : res.chain)
  {
    if (!m.generator)
    {
      throw DomainError("chain element without a generator cannot be serialised");
    }
    gens.push_back(generator_json(*m.generator));
  }
  doc["generators"] = std::move(gens);
  return doc.dump() + "\n";
}

LoadedChain load_chain(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw IoError("cannot read chain file " + path.string());
  }
  try
  {
    const Json doc = Json::parse(in);
    if (doc.at("format").get<std::string>() != "kamreduce-chain/1")
    {
      throw std::invalid_argument("unknown format");
    }
    const int dim = doc.at("dim").get<int>(), cap = doc.at("capacity").get<int>(), J = doc.at("modes").get<int>();
    const int points = doc.at("grid_points").get<int>();
    if (dim < 1 || cap < 0 || J < 1 || points < 1 || points % 2 == 0)
    {
      throw std::invalid_argument("bad sizes");
    }
    LoadedChain out;
    out.N.omega = doc.at("omega").get<std::vector<double>>();
    out.N.shift = doc.at("shift").get<std::vector<double>>();
    out.N.shift_bound = doc.at("shift_bound").get<double>();
    out.P_final = doc.at("P_final").get<double>();
    if (static_cast<int>(out.N.omega.size()) != dim || out.N.modes() != J)
    {
      throw std::invalid_argument("normal form does not match the declared sizes");
    }
    const auto lat = make_lattice(dim, cap);
    FlowOptions fo;
    fo.grid = AngleGrid{dim, points};
    fo.tol = doc.at("flow_tol").get<double>();
    for (const auto &g : doc.at("generators"))
    {
      out.chain.push_back(flow_map(generator_from_json(g, lat, J), fo));
    }
    return out;
  }
  catch (const Error &)
  {
    throw;
  }
  catch (const std::exception &e)
  {
    throw IoError("malformed chain file " + path.string() + ": " + e.what());
  }
}

int cmd_check_frequency(const RunContext &ctx)
{
  const auto &f = ctx.cfg.frequency;
  if (f.omega_list.empty())
  {
    throw ConfigError("check-frequency needs a non-empty frequency.omega_list");
  }
  ensure_dir(ctx.out);
  const std::size_t n = f.omega_list.front().size();
  const auto N = model_spectrum(ctx.cfg.model.kind, ctx.cfg.model.mass, f.J, n);
  auto q = frequency_query(ctx.cfg, N, f.K, f.J, f.A2);
  q.gamma = f.gamma;

  std::vector<std::string> header;
  for (std::size_t d = 1; d <= n; ++d)
  {
    header.push_back("omega_" + std::to_string(d));
  }
  for (const char *h : {"gamma", "K", "J", "A2", "worst_margin", "divisor", "type", "k", "i", "j", "nonresonant"})
  {
    header.emplace_back(h);
  }
  std::string out = csv_row(header);
  int resonant = 0;
  for (const auto &omega : f.omega_list)
  {
    const auto rep = min_margin(omega, N, q);
    std::vector<std::string> row;
    for (double w : omega)
    {
      row.push_back(format_real(w));
    }
    for (auto &cell : {format_real(q.gamma), format_int(q.K), format_int(q.J), format_real(q.A2),
                       format_real(rep.worst), format_real(rep.divisor), to_string(rep.argmin.type),
                       join_ints(rep.argmin.k), format_int(rep.argmin.i), format_int(rep.argmin.j),
                       std::string(rep.nonresonant() ? "1" : "0")})
    {
      row.push_back(cell);
    }
    out += csv_row(row);
    resonant += rep.nonresonant() ? 0 : 1;
  }
  write_output(ctx, "frequency.csv", out);
  write_output(ctx, "manifest.json", manifest(ctx, "check-frequency").dump(1) + "\n");
  if (ctx.log)
  {
    *ctx.log << f.omega_list.size() << " frequency vectors, " << resonant << " below margin 1\n";
  }
  return EXIT_OK;
}

int cmd_reduce(const RunContext &ctx)
{
  ensure_dir(ctx.out);
  const auto model = build_model(ctx.cfg);
  const auto sched = build_schedule_for(ctx.cfg, model);
  auto m = manifest(ctx, "reduce");
  m["schedule"] = schedule_json(sched);
  ReduceResult res{model.N, model.P, {}, {}, false};
  try
  {
    res = reduce({model.N, model.P}, sched, reduce_options(ctx.cfg), &model.limits);
  }
  catch (const DivisorViolation &e)
  {
    write_output(ctx, "resonance.csv", resonance_csv(e));
    m["result"] = {{"status", "resonance"}, {"message", e.what()}};
    write_output(ctx, "manifest.json", m.dump(1) + "\n");
    if (ctx.log)
    {
      *ctx.log << "resonance: " << e.what() << '\n';
    }
    return EXIT_RESONANCE;
  }
  const AngleGrid grid = default_grid(model.P.lattice());
  write_output(ctx, "convergence.csv", convergence_csv(res.table));
  write_output(ctx, "normal_form.csv", normal_form_csv(model.N, res.N));
  write_output(ctx, "chain.json", chain_to_json(res, grid, ctx.cfg.reduce.flow_tol));
  const double P_final = res.table.empty() ? 0.0 : res.table.back().next_size;
  m["result"] = {{"status", res.converged ? "converged" : "not converged"},
                 {"rows", res.table.size()},
                 {"P_final", P_final},
                 {"Omega_inf", [&] {
                    std::vector<double> w;
                    for (int j = 1; j <= res.N.modes(); ++j)
                    {
                      w.push_back(res.N.frequency(j));
                    }
                    return w;
                  }()}};
  write_output(ctx, "manifest.json", m.dump(1) + "\n");
  if (ctx.log)
  {
    *ctx.log << res.table.size() << " rows, final [P] " << format_real(P_final)
             << (res.converged ? ", converged\n" : ", not converged\n");
  }
  return res.converged ? EXIT_OK : EXIT_PROPERTY;
}

int cmd_measure(const RunContext &ctx)
{
  const auto &ms = ctx.cfg.measure;
  if (ms.gamma_list.empty())
  {
    throw ConfigError("measure needs a non-empty measure.gamma_list");
  }
  ensure_dir(ctx.out);
  const auto N = model_spectrum(ms.spectrum, ctx.cfg.model.mass, ms.J, static_cast<std::size_t>(ms.dim));
  const auto q = frequency_query(ctx.cfg, N, ms.K, ms.J, ms.A2);
  const NormalFormBuilder builder = [&N](std::span<const double>) { return N; };
  const auto fractions = excluded_fractions(q, ms.gamma_list, builder, ms.dim, ms.grid, ctx.cfg.threads);

  std::string out = csv_row({"kind", "gamma", "grid", "excluded_fraction", "slope", "intercept"});
  for (std::size_t i = 0; i < fractions.size(); ++i)
  {
    out += csv_row({"sample", format_real(ms.gamma_list[i]), format_int(ms.grid), format_real(fractions[i]), "", ""});
  }
  const auto positive = std::count_if(fractions.begin(), fractions.end(), [](double f) { return f > 0.0; });
  if (positive >= 2)
  {
    const auto fit = fit_loglog(ms.gamma_list, fractions);
    out += csv_row({"fit", "", "", "", format_real(fit.slope), format_real(fit.intercept)});
    if (ctx.log)
    {
      *ctx.log << "log-log slope " << format_real(fit.slope) << " over " << fit.points << " points\n";
    }
  }
  write_output(ctx, "measure.csv", out);
  auto m = manifest(ctx, "measure");
  m["A2"] = q.A2;
  write_output(ctx, "manifest.json", m.dump(1) + "\n");
  return EXIT_OK;
}

int cmd_verify(const RunContext &ctx)
{
  const auto &v = ctx.cfg.verify;
  ensure_dir(ctx.out);
  const auto model = build_model(ctx.cfg);
  auto m = manifest(ctx, "verify");

  NormalForm N_inf;
  std::vector<SymplecticMap> chain;
  double P_final = 0.0;
  if (v.chain_file)
  {
    auto loaded = load_chain(*v.chain_file);
    if (loaded.N.modes() != model.N.modes() || loaded.N.omega != model.N.omega)
    {
      throw IoError("chain file " + *v.chain_file + " does not match the configured model");
    }
    N_inf = std::move(loaded.N);
    chain = std::move(loaded.chain);
    P_final = loaded.P_final;
  }
  else
  {
    const auto sched = build_schedule_for(ctx.cfg, model);
    m["schedule"] = schedule_json(sched);
    auto res = reduce({model.N, model.P}, sched, reduce_options(ctx.cfg), &model.limits);
    N_inf = std::move(res.N);
    chain = std::move(res.chain);
    P_final = res.table.empty() ? 0.0 : res.table.back().next_size;
  }

  const auto &an = ctx.cfg.model.an;
  const State z0 = real_state(seeded_initial_data(an, ctx.cfg.model.J, ctx.cfg.seed));
  DirectOptions dop;
  dop.T = v.T;
  dop.samples = v.samples;
  dop.dt_factor = v.dt_factor;
  dop.an = an;
  ReducedOptions rop;
  rop.T = v.T;
  rop.samples = v.samples;
  rop.probes = v.probes;
  rop.interpolation_tol = v.interpolation_tol;
  rop.an = an;

  const auto policy = ctx.cfg.threads > 1 ? std::launch::async : std::launch::deferred;
  auto direct_f = std::async(policy, [&] { return integrate_direct(model.N, model.P, z0, dop); });
  auto reduced_f = std::async(policy, [&] { return integrate_reduced(N_inf, chain, z0, rop); });
  const Trajectory direct = direct_f.get();
  const Trajectory reduced = reduced_f.get();

  // Richardson: with error ~ dt^4, e(dt) ~ |z(dt) - z(dt/2)| * 16 / 15.
  double integrator_error = 0.0;
  if (v.richardson && !direct.unstable)
  {
    DirectOptions half = dop;
    half.dt = 0.5 * direct.dt;
    integrator_error = sup_relative_error(direct, integrate_direct(model.N, model.P, z0, half), an) * 16.0 / 15.0;
  }
  const bool comparable = !direct.unstable && direct.times.size() == reduced.times.size();
  const double sup_error = comparable ? sup_relative_error(direct, reduced, an) : INFINITY;
  const double growth_direct = stability_ratio(direct);
  const double growth_reduced = stability_ratio(reduced);
  const double budget = comparison_budget(integrator_error, P_final, v.T, growth_direct);
  const bool pass = comparable && sup_error <= v.tolerance && !reduced.interpolation_flag;

  std::string out = csv_row({"metric", "value"});
  auto add = [&](const char *k, const std::string &val) { out += csv_row({k, val}); };
  add("sup_relative_error", format_real(sup_error));
  add("tolerance", format_real(v.tolerance));
  add("budget", format_real(budget));
  add("integrator_error", format_real(integrator_error));
  add("P_final", format_real(P_final));
  add("stability_direct", format_real(growth_direct));
  add("stability_reduced", format_real(growth_reduced));
  add("conjugate_defect_direct", format_real(direct.conjugate_defect));
  add("conjugate_defect_reduced", format_real(reduced.conjugate_defect));
  add("energy_drift", format_real(direct.energy_drift));
  add("modulus_drift", format_real(reduced.modulus_drift));
  add("interpolation_error", format_real(reduced.interpolation_error));
  add("interpolation_flag", reduced.interpolation_flag ? "1" : "0");
  add("unstable", direct.unstable ? "1" : "0");
  add("dt", format_real(direct.dt));
  add("chain_length", format_int(static_cast<long long>(chain.size())));
  add("pass", pass ? "1" : "0");
  write_output(ctx, "verify.csv", out);

  std::ostringstream d, r;
  write_trajectory_csv(d, direct);
  write_trajectory_csv(r, reduced);
  write_output(ctx, "direct.csv", d.str());
  write_output(ctx, "reduced.csv", r.str());
  write_output(ctx, "manifest.json", m.dump(1) + "\n");
  if (ctx.log)
  {
    *ctx.log << "sup relative error " << format_real(sup_error) << " (tolerance " << format_real(v.tolerance)
             << ", budget " << format_real(budget) << "), stability " << format_real(growth_direct) << '\n';
  }
  return pass ? EXIT_OK : EXIT_PROPERTY;
}

void list_properties(std::ostream &os)
{
  for (const auto &p : property_suite())
  {
    os << p.name << "  " << p.description << '\n';
  }
}

int cmd_selftest(const RunContext &ctx)
{
  const auto &st = ctx.cfg.selftest;
  std::vector<const Property *> chosen;
  if (st.only.empty())
  {
    for (const auto &p : property_suite())
    {
      chosen.push_back(&p);
    }
  }
  else
  {
    for (const auto &name : st.only)
    {
      try
      {
        chosen.push_back(&find_property(name));
      }
      catch (const std::out_of_range &)
      {
        throw ConfigError("selftest.only: unknown property " + name);
      }
    }
  }
  ensure_dir(ctx.out);

  // Each property owns its generator, so the split across workers does not change results.
  std::vector<PropertyResult> results(chosen.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < chosen.size(); i = next++)
    {
      results[i] = run_property(*chosen[i], ctx.cfg.seed, st.instances, st.tolerance_scale);
    }
  };
  std::vector<std::future<void>> pool;
  for (int t = 1; t < std::min<int>(ctx.cfg.threads, static_cast<int>(chosen.size())); ++t)
  {
    pool.push_back(std::async(std::launch::async, worker));
  }
  worker();
  for (auto &f : pool)
  {
    f.get();
  }

  std::string out = csv_row({"name", "instances", "violations", "worst", "bound", "pass"});
  int failed = 0;
  for (const auto &r : results)
  {
    out += csv_row({r.name, format_int(r.instances), format_int(r.violations), format_real(r.worst),
                    format_real(r.bound), r.pass() ? "1" : "0"});
    failed += r.pass() ? 0 : 1;
    if (ctx.log)
    {
      *ctx.log << (r.pass() ? "PASS " : "FAIL ") << r.name << " worst " << format_real(r.worst) << " bound "
               << format_real(r.bound) << '\n';
    }
  }
  write_output(ctx, "selftest.csv", out);
  write_output(ctx, "manifest.json", manifest(ctx, "selftest").dump(1) + "\n");
  return failed == 0 ? EXIT_OK : EXIT_PROPERTY;
}

}  // namespace kamreduce::cli
