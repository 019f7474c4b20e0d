#include "lpmod/modsys/compiled.hpp"

#include <sstream>

namespace lpmod {

namespace {

void add_unique(std::vector<std::string>& out, const std::string& v) {
  for (const auto& x : out)
    if (x == v) return;
  out.push_back(v);
}

std::string join_terms(const std::vector<Term>& ts) {
  std::string out;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) out += ", ";
    out += ts[i].str();
  }
  return out;
}

std::string join_literals(const Conjunction& c) {
  std::string out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out += ", ";
    out += c[i].str();
  }
  return out;
}

}  // namespace

Expr Expr::of(Term t) {
  Expr e;
  e.term = std::move(t);
  return e;
}

void Expr::collect_variables(std::vector<std::string>& out) const {
  switch (kind) {
    case Kind::Term:
      term.collect_variables(out);
      return;
    case Kind::Binary:
      for (const auto& a : args) a.collect_variables(out);
      return;
    case Kind::Count:
      return;
  }
}

std::string Expr::str() const {
  switch (kind) {
    case Kind::Term:
      return term.str();
    case Kind::Binary:
      return "(" + args[0].str() + " " + op + " " + args[1].str() + ")";
    case Kind::Count:
      return "count(" + comp->str() + ")";
  }
  return {};
}

std::vector<std::string> Literal::visible_variables() const {
  std::vector<std::string> out;
  switch (kind) {
    case Kind::Atom:
    case Kind::Member:
      pattern.collect_variables(out);
      break;
    case Kind::Compare:
      lhs.collect_variables(out);
      rhs.collect_variables(out);
      break;
    case Kind::TypeTest:
      lhs.collect_variables(out);
      break;
    case Kind::No:
      break;
    case Kind::Project:
      add_unique(out, source);
      pattern.collect_variables(out);
      break;
  }
  return out;
}

std::string Literal::str() const {
  switch (kind) {
    case Kind::Atom:
      return pattern.str();
    case Kind::Member:
      return pattern.str() + " is " + type.str();
    case Kind::Compare:
      return lhs.str() + " " + op + " " + rhs.str();
    case Kind::TypeTest:
      return lhs.str() + " : " + type.str();
    case Kind::No:
      return "no " + comp->str();
    case Kind::Project:
      return pattern.str() + " = " + source + "#" + ctor.str() + "[" + std::to_string(index) + "]";
  }
  return {};
}

std::string Comprehension::str() const {
  std::string out = "{ " + join_terms(heads) + " | ";
  for (std::size_t d = 0; d < disjuncts.size(); ++d) {
    if (d) out += "; ";
    out += join_literals(disjuncts[d]);
  }
  return out + " }";
}

std::string CompiledRule::str() const {
  if (body.empty()) return head.str() + ".";
  return head.str() + " :- " + join_literals(body) + ".";
}

std::string_view clause_kind_name(ClauseInfo::Kind k) {
  switch (k) {
    case ClauseInfo::Kind::Conforms:
      return "conforms";
    case ClauseInfo::Kind::Requires:
      return "requires";
    case ClauseInfo::Kind::Ensures:
      return "ensures";
  }
  return "clause";
}

}  // namespace lpmod
