#include <sstream>

#include "lpmod/frontend/parser.hpp"
#include "lpmod/types/term.hpp"

namespace lpmod::frontend {

namespace {

std::string join_exprs(const std::vector<RawExpr>& es) {
  std::string out;
  for (std::size_t i = 0; i < es.size(); ++i) {
    if (i) out += ", ";
    out += print_expr(es[i]);
  }
  return out;
}

std::string print_comprehension(const RawComprehension& c) {
  return "{ " + join_exprs(c.heads) + " | " + print_body(c.body) + " }";
}

std::string print_literal(const RawLiteral& l) {
  switch (l.kind) {
    case RawLiteral::Kind::Atom:
      return print_expr(l.lhs);
    case RawLiteral::Kind::NoSet:
      return "no " + print_comprehension(*l.comp);
    case RawLiteral::Kind::NoAtom:
      return "no " + print_expr(l.lhs);
    case RawLiteral::Kind::Compare:
      return print_expr(l.lhs) + " " + l.op + " " + print_expr(l.rhs);
    case RawLiteral::Kind::TypeTest:
      return print_expr(l.lhs) + " : " + print_type(l.type);
    case RawLiteral::Kind::Member:
      return print_expr(l.lhs) + " is " + print_type(l.type);
  }
  return {};
}

std::string print_field(const RawField& f) {
  std::string out;
  if (f.name) out += *f.name + ": ";
  if (f.any) out += "any ";
  return out + print_type(f.type);
}

std::string print_import_target(const Import& im) {
  return im.prefix ? *im.prefix + "::" + im.target : im.target;
}

std::string print_item(const RawItem& item) {
  std::ostringstream os;
  std::visit(
      [&](const auto& it) {
        using T = std::decay_t<decltype(it)>;
        if constexpr (std::is_same_v<T, TypeDecl>) {
          os << it.name << " ::= ";
          if (it.form == TypeDecl::Form::Union) {
            os << print_type(it.union_type);
          } else {
            if (it.marker == TypeDecl::Marker::New) os << "new ";
            if (it.marker == TypeDecl::Marker::Fun) os << "fun ";
            os << "(";
            for (std::size_t i = 0; i < it.fields.size(); ++i) {
              if (i) os << (it.arrow && *it.arrow == i ? " -> " : ", ");
              os << print_field(it.fields[i]);
            }
            os << ")";
          }
          os << ".";
        } else if constexpr (std::is_same_v<T, RawRule>) {
          os << join_exprs(it.heads) << " :- " << print_body(it.body) << ".";
        } else if constexpr (std::is_same_v<T, RawClause>) {
          static const char* names[] = {"conforms", "requires", "ensures"};
          os << names[static_cast<int>(it.kind)] << " " << print_body(it.body) << ".";
        } else if constexpr (std::is_same_v<T, RawFact>) {
          os << print_expr(it.term) << ".";
        } else if constexpr (std::is_same_v<T, SymConstDef>) {
          os << it.name << " is " << print_expr(it.term) << ".";
        } else if constexpr (std::is_same_v<T, PipelineEq>) {
          for (std::size_t i = 0; i < it.lhs.size(); ++i) os << (i ? ", " : "") << it.lhs[i];
          os << " = " << it.callee << "(";
          for (std::size_t i = 0; i < it.args.size(); ++i) os << (i ? ", " : "") << it.args[i];
          os << ").";
        }
      },
      item);
  return os.str();
}

}  // namespace

std::string print_expr(const RawExpr& e) {
  switch (e.kind) {
    case RawExpr::Kind::Integer:
    case RawExpr::Kind::Name:
      return e.text;
    case RawExpr::Kind::Wildcard:
      return "_";
    case RawExpr::Kind::String:
      return quote_string(e.text);
    case RawExpr::Kind::Apply:
      return e.text + "(" + join_exprs(e.args) + ")";
    case RawExpr::Kind::Count:
      return "count(" + print_comprehension(*e.comp) + ")";
    case RawExpr::Kind::Binary:
      return "(" + print_expr(e.args[0]) + " " + e.op + " " + print_expr(e.args[1]) + ")";
  }
  return {};
}

std::string print_type(const RawTypeExpr& t) {
  std::string out;
  for (std::size_t i = 0; i < t.atoms.size(); ++i) {
    if (i) out += " + ";
    const RawTypeAtom& a = t.atoms[i];
    if (a.kind == RawTypeAtom::Kind::Name) {
      out += a.name;
    } else {
      out += "{ " + join_exprs(a.constants) + " }";
    }
  }
  return out;
}

std::string print_body(const RawBody& b) {
  std::string out;
  for (std::size_t d = 0; d < b.disjuncts.size(); ++d) {
    if (d) out += "; ";
    for (std::size_t i = 0; i < b.disjuncts[d].size(); ++i) {
      if (i) out += ", ";
      out += print_literal(b.disjuncts[d][i]);
    }
  }
  return out;
}

std::string print_module(const RawModuleDecl& d) {
  std::ostringstream os;
  using M = Import::Mode;
  auto imports_of = [&](M mode) {
    std::vector<std::string> out;
    for (const Import& im : d.imports)
      if (im.mode == mode) out.push_back(print_import_target(im));
    return out;
  };
  auto list = [&](const std::vector<std::string>& xs) {
    for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? ", " : "") << xs[i];
  };

  switch (d.kind) {
    case RawModuleDecl::Kind::Domain: {
      os << "domain " << d.name;
      // consecutive runs keep the written order of includes/extends groups
      std::size_t i = 0;
      while (i < d.imports.size()) {
        M mode = d.imports[i].mode;
        os << (mode == M::Extends ? " extends " : " includes ");
        std::size_t j = i;
        for (; j < d.imports.size() && d.imports[j].mode == mode; ++j)
          os << (j > i ? ", " : "") << print_import_target(d.imports[j]);
        i = j;
      }
      break;
    }
    case RawModuleDecl::Kind::Model: {
      os << "model " << d.name << " of ";
      list(imports_of(M::Of));
      auto inc = imports_of(M::Includes);
      if (!inc.empty()) {
        os << " includes ";
        list(inc);
      }
      break;
    }
    case RawModuleDecl::Kind::Transform:
    case RawModuleDecl::Kind::TransformSystem:
      os << (d.kind == RawModuleDecl::Kind::Transform ? "transform " : "transform system ") << d.name << " (";
      list(imports_of(M::Input));
      os << ") returns (";
      list(imports_of(M::Output));
      os << ")";
      break;
  }
  os << " {\n";
  for (const RawItem& it : d.body) os << "  " << print_item(it) << "\n";
  os << "}\n";
  return os.str();
}

std::string print_unit(const SourceUnit& unit) {
  std::string out;
  for (std::size_t i = 0; i < unit.decls.size(); ++i) {
    if (i) out += "\n";
    out += print_module(unit.decls[i]);
  }
  return out;
}

}  // namespace lpmod::frontend
