#pragma once

#include <stdexcept>
#include <string>

namespace peergraph {

// Base class for every failure the library reports. Messages are single-line
// so the CLI can print them verbatim as its diagnostic.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace peergraph
