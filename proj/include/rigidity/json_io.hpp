#pragma once

#include <string>

#include "rigidity/framework.hpp"

namespace rigidity {

// Schema: {"dimension": d, "vertices": [[x,y,...], ...], "edges": [[i,j], ...],
//          "labels": [...], "pinned": [...]} with 1-based edge and coordinate
// indices; labels and pinned are optional. Round-trips binary64 exactly.
// Throws std::invalid_argument with a field-level message on schema errors.
Framework framework_from_json(const std::string& text);
std::string framework_to_json(const Framework& f);

}  // namespace rigidity
