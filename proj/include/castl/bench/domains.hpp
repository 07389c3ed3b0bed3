#pragma once

#include <string>
#include <string_view>

#include "castl/constraints/render.hpp"

namespace castl::bench {

enum class Domain { HC, KT, BW };

std::string to_string(Domain d);
/// Accepts "hc", "kt", "bw" (any case) and the long names.
Domain parse_domain_name(std::string_view name);

/// PDDL source of the built-in domain.
std::string_view domain_pddl(Domain d);

/// English templates for every predicate and action of the built-in domain.
const constraints::PhraseBook& phrases(Domain d);

}  // namespace castl::bench
