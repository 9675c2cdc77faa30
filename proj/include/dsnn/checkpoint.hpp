#pragma once

#include <string>

#include "dsnn/hierarchy.hpp"
#include "json.hpp"

namespace dsnn {

// Versioned JSON checkpoint of the trained pair: weights, homeostatic
// thresholds, neuron metadata, habituation state, label maps and the module
// configs needed to run them. format_version currently 1.
nlohmann::json checkpoint_to_json(const PhaseOneModel& phase1, const PhaseTwoModel& phase2);

struct CheckpointPair {
  PhaseOneModel phase1;
  PhaseTwoModel phase2;
};

CheckpointPair checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const std::string& path, const PhaseOneModel& phase1,
                     const PhaseTwoModel& phase2);
CheckpointPair load_checkpoint(const std::string& path);

}  // namespace dsnn
