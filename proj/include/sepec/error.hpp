#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sepec {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  DimensionError(const std::string& what, std::size_t expected, std::size_t got)
      : Error(what + ": expected dimension " + std::to_string(expected) + ", got " +
              std::to_string(got)),
        expected_(expected),
        got_(got) {}

  std::size_t expected() const noexcept { return expected_; }
  std::size_t got() const noexcept { return got_; }

 private:
  std::size_t expected_;
  std::size_t got_;
};

// Positivity/coverage violation tied to one arm.
class SupportError : public Error {
 public:
  SupportError(const std::string& what, std::size_t arm)
      : Error(what + " (arm " + std::to_string(arm) + ")"), arm_(arm) {}

  std::size_t arm() const noexcept { return arm_; }

 private:
  std::size_t arm_;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

// Raised when an iterative solver runs out of budget. Carries the best iterate.
class BudgetExhausted : public Error {
 public:
  BudgetExhausted(const std::string& what, Eigen::VectorXd best, double residual,
                  std::size_t cuts)
      : Error(what), best_(std::move(best)), residual_(residual), cuts_(cuts) {}

  const Eigen::VectorXd& best() const noexcept { return best_; }
  double residual() const noexcept { return residual_; }
  std::size_t cuts() const noexcept { return cuts_; }

 private:
  Eigen::VectorXd best_;
  double residual_;
  std::size_t cuts_;
};

}  // namespace sepec
