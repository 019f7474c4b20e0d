#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "lpmod/frontend/ast.hpp"
#include "lpmod/frontend/lexer.hpp"

namespace lpmod::frontend {

/// Parses a whole file. Throws lpmod::Error ("syntax", "duplicate-module")
/// at the first offending token.
SourceUnit parse_unit(const std::vector<Token>& tokens, const std::string& path = {});

/// tokenize + parse_unit.
SourceUnit parse_source(std::string_view text, const std::string& path = {});

/// Parses a rule body on its own, e.g. a query goal `Reach(x), x : State`.
RawBody parse_body_text(std::string_view text, const std::string& path = {});

/// Canonical source form. Re-parsing the output yields an equal unit.
std::string print_unit(const SourceUnit& unit);
std::string print_module(const RawModuleDecl& decl);
std::string print_expr(const RawExpr& e);
std::string print_body(const RawBody& b);
std::string print_type(const RawTypeExpr& t);

}  // namespace lpmod::frontend
