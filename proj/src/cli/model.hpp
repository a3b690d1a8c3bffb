#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "thermoform/cli.hpp"
#include "thermoform/nonlinear.hpp"

namespace thermoform::cli {

// Library objects built from a validated config.
struct Model {
  Sft sft;
  std::map<std::string, Potential> potentials;
  std::optional<NonlinearFunctional> functional;
};

/// Throws ValidationError for anything the schema alone cannot catch.
Model build_model(const RunConfig& config);

NonlinearFunctional make_functional(const FunctionalSpec& spec, int dimension);

/// Potential names the command reads.
std::vector<std::string> role_names(const RunConfig& config);

}  // namespace thermoform::cli
