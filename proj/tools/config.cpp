// SPDX-License-Identifier: Apache-2.0
#include "config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "kamreduce/errors.hpp"

namespace kamreduce::cli
{

namespace
{

enum class Kind
{
  Number,
  Integer,
  Bool,
  String,
  OptNumber,
  OptString,
  Numbers,
  NumberLists,
  Strings
};

struct Entry
{
  const char *path;
  Kind kind;
  Json value;
  const char *meaning;
};

const double GOLDEN_OMEGA = std::numbers::pi * (std::sqrt(5.0) - 1.0);

const std::vector<Entry> &entries()
{
  static const std::vector<Entry> table{
      {"/seed", Kind::Integer, 1, "seed for random potentials, initial data and the property suite"},
      {"/threads", Kind::Integer, 1, "worker threads; the flag and KAMREDUCE_THREADS override it"},
      {"/approximation/family", Kind::String, "power", "power, logdamped, logpower or constant"},
      {"/approximation/alpha", Kind::Number, 0.5, "family parameter; ignored by constant"},
      {"/model/kind", Kind::String, "halfwave", "halfwave or wave"},
      {"/model/mass", Kind::Number, 1.0, "wave mass m >= 0"},
      {"/model/eps", Kind::Number, 1e-3, "coupling epsilon >= 0"},
      {"/model/J", Kind::Integer, 32, "retained normal modes"},
      {"/model/omega", Kind::Numbers, Json::array({GOLDEN_OMEGA}), "tangential frequency vector"},
      {"/model/potential/kind", Kind::String, "single-cosine", "single-cosine, geometric or random-analytic"},
      {"/model/potential/c", Kind::Number, 1.0, "amplitude; the norm for random-analytic"},
      {"/model/potential/a", Kind::Number, 0.25, "x-analyticity of the potential"},
      {"/model/potential/p", Kind::Number, 1.0, "polynomial weight of the potential"},
      {"/model/potential/degree", Kind::Integer, 8, "x-harmonics for geometric and random-analytic"},
      {"/model/potential/radius", Kind::Integer, 3, "theta radius |k|_1 for random-analytic"},
      {"/model/analyticity/r", Kind::Number, 0.5, "theta strip width of P_0"},
      {"/model/analyticity/s", Kind::Number, 1.0, "ball radius in z"},
      {"/model/analyticity/a", Kind::Number, 0.25, "mode weight exponent a in e^{a j} j^p"},
      {"/model/analyticity/p", Kind::Number, 1.0, "mode weight power p"},
      {"/schedule/gamma0", Kind::Number, 0.1, "initial non-resonance constant"},
      {"/schedule/rho0", Kind::Number, 0.02, "initial TL decay rate"},
      {"/schedule/r0", Kind::Number, 0.5, "initial strip width"},
      {"/schedule/s0", Kind::Number, 1.0, "initial ball radius"},
      {"/schedule/sigma_total", Kind::Number, 0.08, "sum of the strip losses; 6 sigma_total < r0"},
      {"/schedule/C_star", Kind::Number, 2.0, "truncation constant in C* e^{-K sigma}"},
      {"/schedule/K0", Kind::Integer, 8, "minimum truncation order"},
      {"/schedule/K_cap", Kind::Integer, 16, "Fourier lattice capacity"},
      {"/schedule/nu_max", Kind::Integer, 4, "maximum KAM steps"},
      {"/schedule/strict_gate", Kind::Bool, false, "abort when eps0 fails the smallness gate"},
      {"/schedule/T", Kind::OptNumber, nullptr, "Xi horizon; null picks the smallest feasible"},
      {"/reduce/stop_tol", Kind::Number, 1e-12, "stop once [P] falls below"},
      {"/reduce/flow_tol", Kind::Number, 1e-12, "quadrature tolerance of the flow"},
      {"/reduce/gate_constant", Kind::OptNumber, 0.25, "flow gate constant; null disables the ratio"},
      {"/reduce/enforce_gate", Kind::Bool, false, "abort when the flow gate fails"},
      {"/reduce/scan_divisors", Kind::Bool, true, "full divisor scan before each solve"},
      {"/reduce/A2", Kind::Number, 1.0, "minus pairs restricted to |i - j| <= A2 |k|"},
      {"/frequency/omega_list", Kind::NumberLists, Json::array({Json::array({GOLDEN_OMEGA})}),
       "frequency vectors to check"},
      {"/frequency/gamma", Kind::Number, 0.1, "non-resonance constant"},
      {"/frequency/K", Kind::Integer, 8, "largest |k|_1"},
      {"/frequency/J", Kind::Integer, 32, "normal modes"},
      {"/frequency/A2", Kind::OptNumber, nullptr, "pair range; null derives it from the spectrum"},
      {"/measure/gamma_list", Kind::Numbers, Json::array({1e-1, 3e-2, 1e-2, 3e-3, 1e-3}), "gamma sweep"},
      {"/measure/grid", Kind::Integer, 100000, "parameter samples per dimension"},
      {"/measure/K", Kind::Integer, 8, "largest |k|_1"},
      {"/measure/J", Kind::Integer, 32, "normal modes"},
      {"/measure/dim", Kind::Integer, 1, "frequency dimension n"},
      {"/measure/spectrum", Kind::String, "wave", "wave (uses model.mass) or halfwave"},
      {"/measure/A2", Kind::OptNumber, nullptr, "pair range; null derives it from the spectrum"},
      {"/verify/T", Kind::Number, 100.0, "integration horizon"},
      {"/verify/samples", Kind::Integer, 1000, "recorded samples"},
      {"/verify/dt_factor", Kind::Number, 0.02, "dt = dt_factor / (J + max Omega), at most 0.1"},
      {"/verify/richardson", Kind::Bool, true, "estimate the integrator error with a dt / 2 run"},
      {"/verify/chain_file", Kind::OptString, nullptr, "chain.json from reduce; null reruns reduce"},
      {"/verify/tolerance", Kind::Number, 1e-4, "sup relative error accepted"},
      {"/verify/probes", Kind::Integer, 8, "off-grid interpolation probes"},
      {"/verify/interpolation_tol", Kind::Number, 1e-10, "interpolation error accepted"},
      {"/selftest/instances", Kind::Integer, 100, "seeded instances per property"},
      {"/selftest/tolerance_scale", Kind::Number, 1.0, "multiplies every property bound"},
      {"/selftest/only", Kind::Strings, Json::array(), "property names; empty runs all"},
  };
  return table;
}

const char *kind_name(Kind k)
{
  switch (k)
  {
    case Kind::Number: return "number";
    case Kind::Integer: return "integer";
    case Kind::Bool: return "bool";
    case Kind::String: return "string";
    case Kind::OptNumber: return "number or null";
    case Kind::OptString: return "string or null";
    case Kind::Numbers: return "number list";
    case Kind::NumberLists: return "list of number lists";
    case Kind::Strings: return "string list";
  }
  return "";
}

bool matches(Kind k, const Json &v)
{
  auto all = [&](auto pred) {
    return v.is_array() && std::all_of(v.begin(), v.end(), pred);
  };
  switch (k)
  {
    case Kind::Number: return v.is_number();
    case Kind::Integer: return v.is_number_integer();
    case Kind::Bool: return v.is_boolean();
    case Kind::String: return v.is_string();
    case Kind::OptNumber: return v.is_null() || v.is_number();
    case Kind::OptString: return v.is_null() || v.is_string();
    case Kind::Numbers: return all([](const Json &x) { return x.is_number(); });
    case Kind::NumberLists:
      return all([](const Json &x) {
        return x.is_array() && std::all_of(x.begin(), x.end(), [](const Json &y) { return y.is_number(); });
      });
    case Kind::Strings: return all([](const Json &x) { return x.is_string(); });
  }
  return false;
}

const Entry *find_entry(const std::string &path)
{
  for (const auto &e : entries())
  {
    if (path == e.path)
    {
      return &e;
    }
  }
  return nullptr;
}

void merge_into(Json &dst, const Json &src, const std::string &prefix)
{
  if (!src.is_object())
  {
    throw ConfigError("config" + (prefix.empty() ? std::string() : " " + prefix) + " must be an object");
  }
  for (auto it = src.begin(); it != src.end(); ++it)
  {
    const std::string path = prefix + "/" + it.key();
    if (!dst.contains(it.key()))
    {
      throw ConfigError("unknown config key " + path);
    }
    Json &slot = dst[it.key()];
    if (const Entry *e = find_entry(path))
    {
      if (!matches(e->kind, it.value()))
      {
        throw ConfigError("config key " + path + " must be a " + kind_name(e->kind));
      }
      slot = it.value();
    }
    else
    {
      merge_into(slot, it.value(), path);
    }
  }
}

double number(const Json &doc, const char *path) { return doc.at(Json::json_pointer(path)).get<double>(); }

long long integer(const Json &doc, const char *path) { return doc.at(Json::json_pointer(path)).get<long long>(); }

std::optional<double> opt_number(const Json &doc, const char *path)
{
  const auto &v = doc.at(Json::json_pointer(path));
  return v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
}

std::string string(const Json &doc, const char *path) { return doc.at(Json::json_pointer(path)).get<std::string>(); }

bool boolean(const Json &doc, const char *path) { return doc.at(Json::json_pointer(path)).get<bool>(); }

void require(bool ok, const std::string &what)
{
  if (!ok)
  {
    throw ConfigError(what);
  }
}

int bounded_int(const Json &doc, const char *path, long long lo, long long hi)
{
  const long long v = integer(doc, path);
  require(v >= lo && v <= hi, std::string(path) + " must lie in [" + std::to_string(lo) + ", " +
                                  std::to_string(hi) + "]");
  return static_cast<int>(v);
}

double positive(const Json &doc, const char *path)
{
  const double v = number(doc, path);
  require(std::isfinite(v) && v > 0.0, std::string(path) + " must be positive");
  return v;
}

double non_negative(const Json &doc, const char *path)
{
  const double v = number(doc, path);
  require(std::isfinite(v) && v >= 0.0, std::string(path) + " must be non-negative");
  return v;
}

ModelKind model_kind(const std::string &s, const char *path)
{
  if (s == "halfwave")
  {
    return ModelKind::HalfWave;
  }
  if (s == "wave")
  {
    return ModelKind::Wave;
  }
  throw ConfigError(std::string(path) + " must be halfwave or wave");
}

ApproximationFunction approximation(const std::string &family, double alpha)
{
  require(std::isfinite(alpha), "/approximation/alpha must be finite");
  try
  {
    if (family == "power")
    {
      return ApproximationFunction::power(alpha);
    }
    if (family == "logdamped")
    {
      return ApproximationFunction::log_damped(alpha);
    }
    if (family == "logpower")
    {
      return ApproximationFunction::log_power(alpha);
    }
    if (family == "constant")
    {
      return ApproximationFunction::constant();
    }
  }
  catch (const DomainError &e)
  {
    throw ConfigError(std::string("/approximation: ") + e.what());
  }
  throw ConfigError("/approximation/family must be power, logdamped, logpower or constant");
}

std::vector<double> frequency_vector(const Json &v, const char *path)
{
  auto w = v.get<std::vector<double>>();
  require(!w.empty(), std::string(path) + " must not be empty");
  for (double x : w)
  {
    require(std::isfinite(x), std::string(path) + " entries must be finite");
  }
  return w;
}

}  // namespace

Json default_config()
{
  Json doc = Json::object();
  for (const auto &e : entries())
  {
    doc[Json::json_pointer(e.path)] = e.value;
  }
  return doc;
}

std::string reference_page()
{
  std::ostringstream os;
  os << "# Configuration reference\n\n"
        "Generated by `kamreduce --reference`. A config file is a JSON object holding any subset of\n"
        "these keys; a run manifest is accepted as well and contributes its `config` member.\n"
        "Unknown keys are rejected.\n\n"
        "| key | type | default | meaning |\n|---|---|---|---|\n";
  for (const auto &e : entries())
  {
    std::string key = e.path + 1;
    std::replace(key.begin(), key.end(), '/', '.');
    os << "| `" << key << "` | " << kind_name(e.kind) << " | `" << e.value.dump() << "` | " << e.meaning << " |\n";
  }
  return os.str();
}

Json merge_config(const Json &defaults, const Json &user)
{
  Json out = defaults;
  const Json &src = user.is_object() && user.contains("config") && user.contains("command") ? user["config"] : user;
  merge_into(out, src, "");
  return out;
}

Json read_config_file(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw IoError("cannot read config " + path.string());
  }
  try
  {
    return Json::parse(in);
  }
  catch (const Json::parse_error &e)
  {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
}

ExperimentConfig parse_config(const Json &doc)
{
  ExperimentConfig c;
  c.resolved = doc;
  require(integer(doc, "/seed") >= 0, "/seed must be non-negative");
  c.seed = doc.at("seed").get<std::uint64_t>();
  c.threads = bounded_int(doc, "/threads", 1, 256);
  c.af = approximation(string(doc, "/approximation/family"), number(doc, "/approximation/alpha"));
  require(validate_af(c.af, 1e6, 4096).monotone, "/approximation: Delta is not non-decreasing for this alpha");

  auto &m = c.model;
  m.kind = model_kind(string(doc, "/model/kind"), "/model/kind");
  m.mass = non_negative(doc, "/model/mass");
  m.eps = non_negative(doc, "/model/eps");
  m.J = bounded_int(doc, "/model/J", 2, 4096);
  m.omega = frequency_vector(doc.at(Json::json_pointer("/model/omega")), "/model/omega");
  require(m.kind == ModelKind::Wave || m.omega.size() == 1, "/model/omega: the half-wave model has n = 1");
  m.potential.kind = string(doc, "/model/potential/kind");
  require(m.potential.kind == "single-cosine" || m.potential.kind == "geometric" ||
              m.potential.kind == "random-analytic",
          "/model/potential/kind must be single-cosine, geometric or random-analytic");
  m.potential.c = non_negative(doc, "/model/potential/c");
  m.potential.a = positive(doc, "/model/potential/a");
  m.potential.p = non_negative(doc, "/model/potential/p");
  m.potential.degree = bounded_int(doc, "/model/potential/degree", 1, 4096);
  m.potential.radius = bounded_int(doc, "/model/potential/radius", 0, 64);
  m.an = {positive(doc, "/model/analyticity/r"), positive(doc, "/model/analyticity/s"),
          non_negative(doc, "/model/analyticity/a"), non_negative(doc, "/model/analyticity/p")};

  auto &s = c.schedule;
  s.af = c.af;
  s.gamma0 = positive(doc, "/schedule/gamma0");
  s.rho0 = positive(doc, "/schedule/rho0");
  s.r0 = positive(doc, "/schedule/r0");
  s.s0 = positive(doc, "/schedule/s0");
  s.sigma_total = positive(doc, "/schedule/sigma_total");
  require(6.0 * s.sigma_total < s.r0, "/schedule/sigma_total: 6 sigma_total must stay below r0");
  s.C_star = positive(doc, "/schedule/C_star");
  s.K0 = bounded_int(doc, "/schedule/K0", 1, 1024);
  s.K_cap = bounded_int(doc, "/schedule/K_cap", 1, 1024);
  s.nu_max = bounded_int(doc, "/schedule/nu_max", 1, 64);
  s.strict_gate = boolean(doc, "/schedule/strict_gate");
  s.T = opt_number(doc, "/schedule/T");
  require(!s.T || (std::isfinite(*s.T) && *s.T > 0.0), "/schedule/T must be positive");

  auto &r = c.reduce;
  r.stop_tol = positive(doc, "/reduce/stop_tol");
  r.flow_tol = positive(doc, "/reduce/flow_tol");
  r.gate_constant = opt_number(doc, "/reduce/gate_constant");
  require(!r.gate_constant || *r.gate_constant > 0.0, "/reduce/gate_constant must be positive");
  r.enforce_gate = boolean(doc, "/reduce/enforce_gate");
  r.scan_divisors = boolean(doc, "/reduce/scan_divisors");
  r.A2 = positive(doc, "/reduce/A2");

  auto &f = c.frequency;
  for (const auto &w : doc.at(Json::json_pointer("/frequency/omega_list")))
  {
    f.omega_list.push_back(frequency_vector(w, "/frequency/omega_list"));
    require(f.omega_list.back().size() == f.omega_list.front().size(),
            "/frequency/omega_list: all vectors need the same dimension");
  }
  f.gamma = positive(doc, "/frequency/gamma");
  f.K = bounded_int(doc, "/frequency/K", 1, 1024);
  f.J = bounded_int(doc, "/frequency/J", 1, 1 << 16);
  f.A2 = opt_number(doc, "/frequency/A2");
  require(!f.A2 || *f.A2 > 0.0, "/frequency/A2 must be positive");

  auto &ms = c.measure;
  ms.gamma_list = doc.at(Json::json_pointer("/measure/gamma_list")).get<std::vector<double>>();
  for (double g : ms.gamma_list)
  {
    require(std::isfinite(g) && g > 0.0, "/measure/gamma_list entries must be positive");
  }
  ms.grid = bounded_int(doc, "/measure/grid", 1, 100000000);
  ms.K = bounded_int(doc, "/measure/K", 1, 1024);
  ms.J = bounded_int(doc, "/measure/J", 1, 1 << 16);
  ms.dim = bounded_int(doc, "/measure/dim", 1, 3);
  ms.spectrum = model_kind(string(doc, "/measure/spectrum"), "/measure/spectrum");
  ms.A2 = opt_number(doc, "/measure/A2");
  require(!ms.A2 || *ms.A2 > 0.0, "/measure/A2 must be positive");

  auto &v = c.verify;
  v.T = positive(doc, "/verify/T");
  v.samples = bounded_int(doc, "/verify/samples", 1, 10000000);
  v.dt_factor = positive(doc, "/verify/dt_factor");
  require(v.dt_factor <= 0.1, "/verify/dt_factor must not exceed 0.1");
  v.richardson = boolean(doc, "/verify/richardson");
  if (const auto &cf = doc.at(Json::json_pointer("/verify/chain_file")); !cf.is_null())
  {
    v.chain_file = cf.get<std::string>();
  }
  v.tolerance = non_negative(doc, "/verify/tolerance");
  v.probes = bounded_int(doc, "/verify/probes", 0, 1024);
  v.interpolation_tol = positive(doc, "/verify/interpolation_tol");

  auto &st = c.selftest;
  st.instances = bounded_int(doc, "/selftest/instances", 1, 1000000);
  st.tolerance_scale = non_negative(doc, "/selftest/tolerance_scale");
  st.only = doc.at(Json::json_pointer("/selftest/only")).get<std::vector<std::string>>();
  return c;
}

}  // namespace kamreduce::cli
