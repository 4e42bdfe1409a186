#pragma once

#include <stdexcept>
#include <string>

namespace topostat {

// Malformed or inconsistent input data (files, configs, dimensions).
class InvalidInput : public std::runtime_error {
 public:
  explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};

// A request the pipeline cannot serve, e.g. asking for 1-dimensional
// homology of a filtration that was built without 2-simplices.
class UnsupportedRequest : public std::runtime_error {
 public:
  explicit UnsupportedRequest(const std::string& what) : std::runtime_error(what) {}
};

// Embeddings produced under different bases or domain maps are not
// comparable; mixing them is refused rather than silently coerced.
class IncompatibleEmbedding : public std::runtime_error {
 public:
  explicit IncompatibleEmbedding(const std::string& what) : std::runtime_error(what) {}
};

// A diagram point left the reference domain after standardization,
// which signals a stale or mismatched domain map.
class DomainViolation : public std::runtime_error {
 public:
  explicit DomainViolation(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace topostat
