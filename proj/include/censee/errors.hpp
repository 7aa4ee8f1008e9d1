#pragma once

#include <stdexcept>
#include <string>

namespace censee {

// Every failure carries the pipeline stage it came from so the CLI can emit
// a machine-readable error report.
class Error : public std::runtime_error {
 public:
  Error(std::string stage, const std::string& message)
      : std::runtime_error(message), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace censee
