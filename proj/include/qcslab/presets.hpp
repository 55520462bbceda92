#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qcslab/harness.hpp"

namespace qcslab {

struct PresetInfo {
  std::string name;
  std::string description;
};

std::vector<PresetInfo> preset_list();

/// Experiment configuration for a named preset; nullopt for unknown names and
/// for "fig1", which is a bound evaluation rather than a sweep.
std::optional<ExperimentConfig> preset_config(std::string_view name);

}  // namespace qcslab
