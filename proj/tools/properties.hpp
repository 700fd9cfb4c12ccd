// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace kamreduce::cli
{

// Each instance yields a value checked against bound * scale; worst is the largest value.
struct PropertyResult
{
  std::string name;
  double worst = -std::numeric_limits<double>::infinity();
  double bound = 0.0;
  int instances = 0;
  int violations = 0;
  bool pass() const { return instances > 0 && violations == 0; }
};

class Tally
{
public:
  Tally(std::string name, double bound) : r_{std::move(name), -std::numeric_limits<double>::infinity(), bound}
  {
  }
  void add(double value);
  PropertyResult result() const { return r_; }

private:
  PropertyResult r_;
};

struct Property
{
  std::string name;
  std::string description;
  std::function<PropertyResult(std::mt19937_64 &rng, int instances, double scale)> run;
};

const std::vector<Property> &property_suite();
const Property &find_property(const std::string &name);

// Seeded from (seed, name) so that results do not depend on which other properties run.
PropertyResult run_property(const Property &p, std::uint64_t seed, int instances, double scale = 1.0);

}  // namespace kamreduce::cli
