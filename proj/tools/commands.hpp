// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <ostream>
#include <vector>

#include "config.hpp"
#include "kamreduce/flow.hpp"
#include "kamreduce/kamloop.hpp"
#include "kamreduce/models.hpp"

namespace kamreduce::cli
{

// Exit codes.
inline constexpr int EXIT_OK = 0;
inline constexpr int EXIT_PROPERTY = 1;  // property failure or any other library error
inline constexpr int EXIT_RESONANCE = 2;
inline constexpr int EXIT_CONFIG = 3;
inline constexpr int EXIT_IO = 4;

struct RunContext
{
  ExperimentConfig cfg;
  std::filesystem::path out = ".";
  std::ostream *log = nullptr;  // human-readable summary; may be null
};

// Every command writes its files into ctx.out, each once and atomically, plus manifest.json.
int cmd_check_frequency(const RunContext &ctx);
int cmd_reduce(const RunContext &ctx);
int cmd_measure(const RunContext &ctx);
int cmd_verify(const RunContext &ctx);
int cmd_selftest(const RunContext &ctx);
void list_properties(std::ostream &os);

// Shared with the acceptance harness.
NormalForm model_spectrum(ModelKind kind, double mass, int J, std::size_t dim);
ModelHamiltonian build_model(const ExperimentConfig &cfg, Potential *potential = nullptr);
KamSchedule build_schedule_for(const ExperimentConfig &cfg, const ModelHamiltonian &model);
ReduceOptions reduce_options(const ExperimentConfig &cfg);

// z_j = e^{-2 a j} j^{-p} e^{i phi_j} with seeded phases.
std::vector<cplx> seeded_initial_data(const Analyticity &an, int J, std::uint64_t seed);

// chain.json: grid, normal form N_inf, final [P] and every generator as sparse triplets.
std::string chain_to_json(const ReduceResult &res, const AngleGrid &grid, double flow_tol);
struct LoadedChain
{
  NormalForm N;
  std::vector<SymplecticMap> chain;
  double P_final = 0.0;
};
// Rebuilds the maps from their generators. Throws IoError on an unreadable or malformed file.
LoadedChain load_chain(const std::filesystem::path &path);

}  // namespace kamreduce::cli
