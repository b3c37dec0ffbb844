#pragma once

#include <stdexcept>
#include <string>

namespace harvestrl {

// A caller broke a documented precondition.
class ContractViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

// A configuration value is out of range or inconsistent. `key()` names the
// offending entry in `section.key` form when one applies.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message),
        key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

private:
  std::string key_;
};

// Malformed config syntax (as opposed to a well-formed but invalid value).
class ConfigParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// An external trace file (activity or solar) could not be used.
class IngestionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A reward function produced something the learner cannot consume.
class RewardError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace harvestrl
