#pragma once

#include <string>
#include <string_view>

#include "castl/constraints/constraint.hpp"

namespace castl::constraints {

/// Reads the flat JSON constraint schema:
///
///   [
///     {"type": "implication", "action": ["pick-up", "block0", "table0"],
///      "condition": [["on", "block4", "block5"]]},
///     {"type": "global", "condition": [["not", "on_table", "block0", "table1"]]}
///   ]
///
/// `condition` is a conjunction of literal arrays; a leading "not" negates the literal.
/// For implications the condition is the blocked-while expression. A bare `...` ellipsis
/// entry and trailing commas are tolerated. Returns the set before attribute resolution.
ConstraintSet read_constraint_json(std::string_view text);

/// read_constraint_json() followed by resolve_attributes().
ConstraintSet parse_constraint_json(std::string_view text, const GroundedTask& task);

/// Serialises a resolved set. Throws castl::Error when a constraint is not a literal
/// conjunction (the schema cannot express it) or when eventuals are present.
std::string write_constraint_json(const ConstraintSet& resolved);

}  // namespace castl::constraints
