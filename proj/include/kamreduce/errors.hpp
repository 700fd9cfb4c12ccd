// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kamreduce
{

// Base of all library failures; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error
{
public:
  using Error::Error;
};

class IoError : public Error
{
public:
  using Error::Error;
};

class DomainError : public Error
{
public:
  using Error::Error;
};

class OverflowError : public Error
{
public:
  using Error::Error;
};

class InfeasibleScheduleError : public Error
{
public:
  using Error::Error;
};

class SummabilityError : public Error
{
public:
  using Error::Error;
};

class FlowDomainError : public Error
{
public:
  using Error::Error;
};

class LieDivergence : public Error
{
public:
  using Error::Error;
};

class NumericalError : public Error
{
public:
  using Error::Error;
};

// A divisor below the admissible threshold: the frequency must be excluded.
class DivisorViolation : public Error
{
public:
  DivisorViolation(std::vector<int> k, int i, int j, double value, double threshold);

  const std::vector<int> &mode() const { return k_; }
  int row() const { return i_; }
  int col() const { return j_; }
  double value() const { return value_; }
  double threshold() const { return threshold_; }

private:
  std::vector<int> k_;
  int i_, j_;
  double value_, threshold_;
};

}  // namespace kamreduce
