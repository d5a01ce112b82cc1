#ifndef FFR_SCENARIO_IO_HPP
#define FFR_SCENARIO_IO_HPP

#include <filesystem>
#include <string>

#include <json.hpp>

#include "ffr/gridsim.hpp"

namespace ffr::scenario_io {

/// Parses a scenario document. The schema is strict: unknown keys are
/// rejected with their JSON path. A top-level "preset" key starts from that
/// preset and overlays the remaining fields. `base_dir` anchors relative
/// wind-trace paths.
gridsim::Scenario from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");

nlohmann::json to_json(const gridsim::Scenario& sc);

gridsim::Scenario load_file(const std::filesystem::path& path);

/// Input-document error with a JSON-path diagnostic.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ffr::scenario_io

#endif
