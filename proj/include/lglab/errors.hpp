#ifndef LGLAB_ERRORS_HPP
#define LGLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lglab {

class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class domain_error : public error {
public:
  using error::error;
};

/// Malformed or inconsistent input value.
class validation_error : public error {
public:
  using error::error;
};

/// A quadrature or series evaluation could not reach its accuracy target.
class accuracy_error : public error {
public:
  using error::error;
};

class no_convergence_error : public error {
public:
  using error::error;
};

/// A point that must lie in the closure of the droplet exterior lies inside it.
class interior_point_error : public domain_error {
public:
  using domain_error::domain_error;
};

class coincident_points_error : public domain_error {
public:
  using domain_error::domain_error;
};

/// Importance-sampling estimate whose effective sample size is too small.
class unreliable_estimate_error : public error {
public:
  using error::error;
};

class io_error : public error {
public:
  using error::error;
};

} // namespace lglab

#endif
