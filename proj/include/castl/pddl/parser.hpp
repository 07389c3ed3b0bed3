#pragma once

#include <string>
#include <string_view>

#include "castl/pddl/model.hpp"

namespace castl::pddl {

/// Parses a domain in the supported subset (`:strips :typing :negative-preconditions
/// :equality` plus disjunctive and quantified preconditions). Identifiers are
/// case-insensitive and normalised to lower case.
///
/// Errors (lexical, unknown requirement, undeclared type, unbound variable, unknown
/// predicate, arity mismatch) are reported as ParseError with the source location.
DomainModel parse_domain(std::string_view text);

/// Parses a problem against an already parsed domain.
SceneDescription parse_problem(std::string_view text, const DomainModel& domain);

std::string print_domain(const DomainModel& domain);
std::string print_problem(const SceneDescription& scene);

/// Renders a schema- or ground-level expression in PDDL syntax.
std::string print_pddl_expr(const Expr& e);

/// Loads a whole file into a string; throws castl::Error if it cannot be read.
std::string read_file(const std::string& path);

}  // namespace castl::pddl
