#pragma once

#include <stdexcept>
#include <string>

namespace gomopt {

// Parameter combination fails a well-posedness condition.
class validation_error : public std::runtime_error {
  public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// Iterative scheme did not reach its tolerance.
class convergence_error : public std::runtime_error {
  public:
    explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

// Input file or config could not be parsed.
class parse_error : public std::runtime_error {
  public:
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gomopt
