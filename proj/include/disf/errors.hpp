#pragma once

#include <stdexcept>
#include <string>

namespace disf {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or degenerate input (empty surfaces, bad dimensions, parse errors).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class ParseError : public InvalidInput {
 public:
  ParseError(const std::string& what, std::size_t line)
      : InvalidInput(what + " (line " + std::to_string(line) + ")"),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Failures raised while planning. The CLI maps these to exit code 3.
class PlannerError : public Error {
 public:
  using Error::Error;
};

class NoCorrespondence : public PlannerError {
 public:
  NoCorrespondence() : PlannerError("no correspondence") {}
  explicit NoCorrespondence(const std::string& detail)
      : PlannerError("no correspondence: " + detail) {}
};

class RankDeficient : public PlannerError {
 public:
  RankDeficient(const std::string& stage, double condition)
      : PlannerError("rank-deficient normal equations in " + stage +
                     " (condition estimate " + std::to_string(condition) +
                     ")"),
        stage_(stage) {}

  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

class DegenerateAperture : public PlannerError {
 public:
  DegenerateAperture()
      : PlannerError(
            "degenerate aperture: object normals orthogonal to the "
            "fingertip pointing vector") {}
};

// Wraps a stage error with the DISF/VISF iteration it occurred in.
class IterationError : public PlannerError {
 public:
  IterationError(int iteration, const std::string& what)
      : PlannerError("iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}

  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

}  // namespace disf
