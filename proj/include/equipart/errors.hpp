#pragma once

#include <stdexcept>
#include <string>

namespace equipart {

struct InvalidParams : std::invalid_argument {
  explicit InvalidParams(const std::string& what) : std::invalid_argument(what) {}
};

struct CoincidentGenerators : std::runtime_error {
  explicit CoincidentGenerators(const std::string& what) : std::runtime_error(what) {}
};

struct ZeroMassRegion : std::runtime_error {
  explicit ZeroMassRegion(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyCell : std::runtime_error {
  int index;
  explicit EmptyCell(int i)
      : std::runtime_error("cell " + std::to_string(i) + " has vanishing measure"), index(i) {}
};

struct StepFailed : std::runtime_error {
  explicit StepFailed(const std::string& what) : std::runtime_error(what) {}
};

struct InitFailed : std::runtime_error {
  explicit InitFailed(const std::string& what) : std::runtime_error(what) {}
};

struct UnsupportedDensity : std::runtime_error {
  explicit UnsupportedDensity(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace equipart
