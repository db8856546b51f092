#pragma once

#include <stdexcept>
#include <string>

namespace mixscope {

/// Malformed or inconsistent input data (ingestion, record parsing).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An analysis precondition failed or an analysis could not complete.
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mixscope
