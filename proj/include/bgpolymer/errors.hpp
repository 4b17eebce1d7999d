#pragma once

#include <stdexcept>
#include <string>

namespace bgpolymer {

/// Invalid distribution or model parameters (non-positive shapes, mu <= lambda, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point lies outside the set on which an operation is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A map or Jacobian breaks down: r2 + b*r1 = 0, or L(s, y) = 0.
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Non-finite value produced during a lattice sweep.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, long site_i, long site_j)
      : std::runtime_error(what + " at site (" + std::to_string(site_i) + "," +
                           std::to_string(site_j) + ")"),
        site_i_(site_i),
        site_j_(site_j) {}

  long site_i() const noexcept { return site_i_; }
  long site_j() const noexcept { return site_j_; }

 private:
  long site_i_;
  long site_j_;
};

}  // namespace bgpolymer
