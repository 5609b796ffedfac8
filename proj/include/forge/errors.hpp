#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace forge {

// Evaluation hit a point outside an elementary function's domain, or a jet
// component became non-finite. `point` is filled in by whichever layer knows
// the coordinates (expression evaluator, grid loop).
struct DomainError : std::runtime_error {
  std::string fn;
  double value = 0.0;
  std::vector<double> point;

  DomainError(std::string fn_, double value_, const std::string& what_)
      : std::runtime_error(what_), fn(std::move(fn_)), value(value_) {}
};

struct ParseError : std::runtime_error {
  int line = 1;
  int col = 1;
  ParseError(const std::string& what_, int line_, int col_)
      : std::runtime_error(what_), line(line_), col(col_) {}
};

struct SingularMetricError : std::runtime_error {
  std::vector<double> point;
  SingularMetricError(const std::string& what_, std::vector<double> point_)
      : std::runtime_error(what_), point(std::move(point_)) {}
};

}  // namespace forge
