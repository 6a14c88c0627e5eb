#ifndef MINEDYN_TESTS_SUPPORT_HPP
#define MINEDYN_TESTS_SUPPORT_HPP

#include <fstream>
#include <string>

#include "minedyn/controller.hpp"
#include "minedyn/model.hpp"

namespace testsup {

// Bistable benchmark used throughout the tests: participation thresholds at
// R = 25 and R = 50, interior equilibrium exactly 0.25 at R = 40.
inline minedyn::ModelParams baseline_params() { return {2, 2, 100.0}; }

// High gain with the switch just above the interior equilibrium: the nominal
// reward comes back early, full participation arrives late.
inline minedyn::ControllerSpec narrow_spec() {
  return {40.0, 0.26, 56.8125, 0.005};
}

// Low gain with the boost active over the whole unit interval: the reverse
// trade-off.
inline minedyn::ControllerSpec wide_spec() { return {40.0, 1.0, 10.1, 0.75}; }

// Writes a throwaway input file into the test working directory.
inline std::string write_temp(const std::string& name,
                              const std::string& body) {
  const std::string path = "minedyn_test_" + name;
  std::ofstream out(path, std::ios::binary);
  out << body;
  return path;
}

}  // namespace testsup

#endif
