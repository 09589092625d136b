#pragma once

#include <string>
#include <vector>

#include "btconv/prepares.hpp"

namespace btconv {

// Graphviz renderings. Output depends only on the inputs, so it can be
// compared byte for byte.
std::string tree_dot(const BTModel& m);
std::string prepares_dot(const BTModel& m, const PreparesGraph& g);
// Classes as boxed clusters; members of the analysis set drawn bold.
std::string condensed_dot(const BTModel& m, const PreparesGraph& g, const Condensation& c,
                          const std::vector<std::size_t>& analysis_classes);
std::string behavior_dot(const BTModel& m, const BehaviorGraph& b);

}  // namespace btconv
