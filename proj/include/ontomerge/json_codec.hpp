#pragma once
// JSON representations used by the HTTP service (schemas in docs/http-api.md).

#include "ontomerge/advisor.hpp"
#include "ontomerge/error.hpp"

#include <nlohmann/json.hpp>

namespace ontomerge::codec {

using nlohmann::json;

json to_json(const FrameId& id);
json to_json(const Ontology& ontology);
json to_json(const Operation& op);
json to_json(const Explanation& explanation);
json to_json(const Suggestion& suggestion);
json to_json(const Conflict& conflict);
json to_json(const AppliedRecord& record);

/// Accepts the one-line text form or an object {"op": <operation name>, <field>: <value>, ...}.
/// Throws script-syntax.
Operation operation_from_json(const json& value);

json error_json(ErrorCode code, std::string_view message);

} // namespace ontomerge::codec
