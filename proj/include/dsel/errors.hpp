#pragma once

#include <stdexcept>
#include <string>

namespace dsel {

// Threshold so extreme that every tail probability underflows. The model
// assumes a large applicant pool, so such inputs are rejected instead of
// propagating 0/0.
class degenerate_threshold_error : public std::domain_error {
 public:
  explicit degenerate_threshold_error(const std::string& msg)
      : std::domain_error(msg) {}
};

class solver_error : public std::runtime_error {
 public:
  explicit solver_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Conditioning event too rare for rejection sampling to leave a usable
// subsample.
class insufficient_conditioning_error : public std::runtime_error {
 public:
  explicit insufficient_conditioning_error(const std::string& msg)
      : std::runtime_error(msg) {}
};

}  // namespace dsel
