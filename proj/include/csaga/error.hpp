#ifndef CSAGA_ERROR_HPP
#define CSAGA_ERROR_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace csaga {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  DimensionError(std::size_t expected, std::size_t actual)
      : Error("dimension mismatch: expected " + std::to_string(expected) +
              ", got " + std::to_string(actual)),
        expected_(expected),
        actual_(actual) {}

  std::size_t expected() const noexcept { return expected_; }
  std::size_t actual() const noexcept { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NotStronglyConvexError : public Error {
 public:
  explicit NotStronglyConvexError(double mu)
      : Error("not strongly convex (mu = " + std::to_string(mu) + ")"), mu_(mu) {}

  double mu() const noexcept { return mu_; }

 private:
  double mu_;
};

/// Raised when an iterate becomes non-finite or blows past the divergence
/// threshold. `iteration()` is the step index k that produced it.
class DivergenceError : public Error {
 public:
  explicit DivergenceError(std::uint64_t k)
      : Error("iterate diverged at step " + std::to_string(k)), k_(k) {}

  std::uint64_t iteration() const noexcept { return k_; }

 private:
  std::uint64_t k_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(std::uint64_t iterations, double grad_norm)
      : Error("reference solve did not converge after " +
              std::to_string(iterations) + " iterations (|grad f| = " +
              std::to_string(grad_norm) + ")"),
        grad_norm_(grad_norm) {}

  double last_gradient_norm() const noexcept { return grad_norm_; }

 private:
  double grad_norm_;
};

}  // namespace csaga

#endif  // CSAGA_ERROR_HPP
