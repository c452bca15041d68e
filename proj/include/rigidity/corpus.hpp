#pragma once

#include <string>
#include <vector>

#include "rigidity/framework.hpp"

namespace rigidity {

// Built-in example frameworks. Coordinates are exact where rational and
// closed-form where algebraic.
std::vector<std::string> corpus_names();

// Throws unknown_name_error for names not in corpus_names().
Framework corpus_framework(const std::string& name);

}  // namespace rigidity
