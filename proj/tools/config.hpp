// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kamreduce/approxfn.hpp"
#include "kamreduce/hamrep.hpp"
#include "kamreduce/kamloop.hpp"
#include "kamreduce/models.hpp"

namespace kamreduce::cli
{

using Json = nlohmann::ordered_json;

struct PotentialConfig
{
  std::string kind;  // single-cosine, geometric, random-analytic
  double c = 1.0;
  double a = 0.25;
  double p = 1.0;
  int degree = 8;
  int radius = 3;
};

struct ModelConfig
{
  ModelKind kind = ModelKind::HalfWave;
  double mass = 1.0;
  double eps = 1e-3;
  int J = 32;
  std::vector<double> omega;
  PotentialConfig potential;
  Analyticity an;
};

struct ReduceConfig
{
  double stop_tol = 1e-12;
  double flow_tol = 1e-12;
  std::optional<double> gate_constant;
  bool enforce_gate = false;
  bool scan_divisors = true;
  double A2 = 1.0;
};

struct FrequencyConfig
{
  std::vector<std::vector<double>> omega_list;
  double gamma = 0.1;
  int K = 8;
  int J = 32;
  std::optional<double> A2;
};

struct MeasureConfig
{
  std::vector<double> gamma_list;
  int grid = 100000;
  int K = 8;
  int J = 32;
  int dim = 1;
  ModelKind spectrum = ModelKind::Wave;
  std::optional<double> A2;
};

struct VerifyConfig
{
  double T = 100.0;
  int samples = 1000;
  double dt_factor = 0.02;
  bool richardson = true;
  std::optional<std::string> chain_file;
  double tolerance = 1e-4;
  int probes = 8;
  double interpolation_tol = 1e-10;
};

struct SelftestConfig
{
  int instances = 100;
  double tolerance_scale = 1.0;
  std::vector<std::string> only;  // empty runs the whole suite
};

struct ExperimentConfig
{
  Json resolved;  // defaults merged with the user file, after flag overrides
  std::uint64_t seed = 1;
  int threads = 1;
  ApproximationFunction af = ApproximationFunction::power(0.5);
  ModelConfig model;
  ScheduleParams schedule;
  ReduceConfig reduce;
  FrequencyConfig frequency;
  MeasureConfig measure;
  VerifyConfig verify;
  SelftestConfig selftest;
};

Json default_config();

// Markdown table of every key with its default and meaning.
std::string reference_page();

// Recursive merge onto the defaults. A file holding a run manifest contributes its "config"
// member. Unknown keys, type mismatches and out-of-range values throw ConfigError; an
// unreadable file throws IoError.
Json merge_config(const Json &defaults, const Json &user);
Json read_config_file(const std::filesystem::path &path);

// Validates and converts a fully merged document.
ExperimentConfig parse_config(const Json &doc);

}  // namespace kamreduce::cli
