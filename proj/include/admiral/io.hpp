#pragma once

#include <string>
#include <vector>

#include "admiral/qtable.hpp"

namespace admiral {

/// Q-table persistence. Versioned text: a header naming the agent, action
/// sizes and state count, then one line per state with the joint-action
/// values as C99 hex floats (bit-exact for all finite doubles).
void save_qtable(const JointQTable& table, const std::string& path);
JointQTable load_qtable(const std::string& path);

/// Network weight persistence: layer sizes followed by the flat parameter
/// array, same hex-float encoding.
void save_weights(const std::vector<int>& layer_sizes, const std::vector<double>& params,
                  const std::string& path);
void load_weights(const std::string& path, std::vector<int>& layer_sizes,
                  std::vector<double>& params);

}  // namespace admiral
