#ifndef FFR_PRESETS_HPP
#define FFR_PRESETS_HPP

#include <string>
#include <vector>

#include "ffr/gridsim.hpp"

namespace ffr::presets {

/// Named experiment presets shipped with the toolkit:
///   n5_hydro_only        five-area system, reserves from hydro alone
///   n5_wind_hydro        hydro reserves plus 2000 MW of wind on buses 2/4
///   n5_sensitivity_50pct same with half the wind capacity
///   dvpp_step            two-unit wind/hydro plant, open-loop 0.5 Hz step
///   turbine_step         single turbine, +20% reference step at 8 m/s
std::vector<std::string> names();
bool exists(const std::string& name);
gridsim::Scenario get(const std::string& name);

}  // namespace ffr::presets

#endif
