#include "lpmod/types/term.hpp"

#include <sstream>

#include "lpmod/diagnostics.hpp"

namespace lpmod {

std::string RelabelingSpec::str() const {
  auto side = [](const Qualifiers& q) { return q.empty() ? std::string("ε") : join_qualifiers(q); };
  return "ρ[" + side(from) + "→" + side(to) + "]";
}

Term::Term() : Term(integer(0)) {}

Term Term::integer(BigInt value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Integer;
  n->integer = std::move(value);
  return Term(std::move(n));
}

Term Term::string(std::string value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::String;
  n->text = std::move(value);
  return Term(std::move(n));
}

Term Term::constant(QualName name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->name = std::move(name);
  return Term(std::move(n));
}

Term Term::apply(QualName ctor, std::vector<Term> args) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Apply;
  n->name = std::move(ctor);
  for (const auto& a : args) n->ground = n->ground && a.is_ground();
  n->args = std::move(args);
  return Term(std::move(n));
}

Term Term::variable(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->ground = false;
  n->text = std::move(name);
  return Term(std::move(n));
}

Term Term::wildcard() {
  static const Term w = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Wildcard;
    n->ground = false;
    return Term(std::move(n));
  }();
  return w;
}

Term Term::accessor(std::string var, std::string field) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Accessor;
  n->ground = false;
  n->text = std::move(var);
  n->field = std::move(field);
  return Term(std::move(n));
}

Term Term::relabel(RelabelingSpec spec, Term inner) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Relabel;
  n->ground = false;
  n->spec = std::move(spec);
  n->args.push_back(std::move(inner));
  return Term(std::move(n));
}

std::string Term::index_key() const {
  switch (kind()) {
    case Kind::Integer:
      return "#int";
    case Kind::String:
      return "#str";
    case Kind::Constant:
    case Kind::Apply:
      return name().str();
    default:
      return "#open";
  }
}

void Term::collect_variables(std::vector<std::string>& out) const {
  switch (kind()) {
    case Kind::Variable:
    case Kind::Accessor:
      for (const auto& v : out)
        if (v == text()) return;
      out.push_back(text());
      return;
    case Kind::Apply:
    case Kind::Relabel:
      for (const auto& a : args()) a.collect_variables(out);
      return;
    default:
      return;
  }
}

std::string quote_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        out += c;
    }
  }
  out += '"';
  return out;
}

std::string Term::str() const {
  std::ostringstream os;
  os << *this;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Integer:
      return os << t.int_value();
    case Term::Kind::String:
      return os << quote_string(t.text());
    case Term::Kind::Constant:
      return os << t.name().str();
    case Term::Kind::Apply: {
      os << t.name().str() << '(';
      for (std::size_t i = 0; i < t.args().size(); ++i) {
        if (i) os << ", ";
        os << t.args()[i];
      }
      return os << ')';
    }
    case Term::Kind::Variable:
      return os << t.text();
    case Term::Kind::Wildcard:
      return os << '_';
    case Term::Kind::Accessor:
      return os << t.text() << '.' << t.field();
    case Term::Kind::Relabel:
      return os << t.relabeling().str() << '(' << t.inner() << ')';
  }
  return os;
}

namespace {

int kind_rank(Term::Kind k) {
  switch (k) {
    case Term::Kind::Integer:
      return 0;
    case Term::Kind::String:
      return 1;
    case Term::Kind::Constant:
      return 2;
    case Term::Kind::Apply:
      return 3;
    case Term::Kind::Variable:
      return 4;
    case Term::Kind::Wildcard:
      return 5;
    case Term::Kind::Accessor:
      return 6;
    case Term::Kind::Relabel:
      return 7;
  }
  return 8;
}

}  // namespace

std::strong_ordering term_order(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = kind_rank(a.kind()) <=> kind_rank(b.kind()); c != 0) return c;
  switch (a.kind()) {
    case Term::Kind::Integer:
      if (a.int_value() < b.int_value()) return std::strong_ordering::less;
      if (b.int_value() < a.int_value()) return std::strong_ordering::greater;
      return std::strong_ordering::equal;
    case Term::Kind::String:
    case Term::Kind::Variable:
      return a.text() <=> b.text();
    case Term::Kind::Constant:
      return a.name() <=> b.name();
    case Term::Kind::Apply: {
      if (auto c = a.name() <=> b.name(); c != 0) return c;
      const auto& xs = a.args();
      const auto& ys = b.args();
      for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i)
        if (auto c = term_order(xs[i], ys[i]); c != 0) return c;
      return xs.size() <=> ys.size();
    }
    case Term::Kind::Wildcard:
      return std::strong_ordering::equal;
    case Term::Kind::Accessor:
      if (auto c = a.text() <=> b.text(); c != 0) return c;
      return a.field() <=> b.field();
    case Term::Kind::Relabel:
      if (auto c = a.relabeling() <=> b.relabeling(); c != 0) return c;
      return term_order(a.inner(), b.inner());
  }
  return std::strong_ordering::equal;
}

bool operator==(const Term& a, const Term& b) { return term_order(a, b) == 0; }
std::strong_ordering operator<=>(const Term& a, const Term& b) { return term_order(a, b); }

Term relabel_term(const RelabelingSpec& rho, const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Integer:
    case Term::Kind::String:
    case Term::Kind::Constant:
      return t;
    case Term::Kind::Apply: {
      if (!t.name().starts_with(rho.from))
        throw Error(code::kEvaluation, "relabeling " + rho.str() + " does not apply to constructor " +
                                           t.name().str());
      std::vector<Term> args;
      args.reserve(t.args().size());
      for (const auto& a : t.args()) args.push_back(relabel_term(rho, a));
      return Term::apply(t.name().reprefixed(rho.from, rho.to), std::move(args));
    }
    default:
      throw Error(code::kEvaluation, "relabeling applied to open term " + t.str());
  }
}

Term substitute(const Term& t, const Binding& b) {
  switch (t.kind()) {
    case Term::Kind::Variable: {
      auto it = b.find(t.text());
      return it == b.end() ? t : it->second;
    }
    case Term::Kind::Apply: {
      if (t.is_ground()) return t;
      std::vector<Term> args;
      args.reserve(t.args().size());
      for (const auto& a : t.args()) args.push_back(substitute(a, b));
      return Term::apply(t.name(), std::move(args));
    }
    case Term::Kind::Relabel: {
      Term inner = substitute(t.inner(), b);
      if (inner.is_ground()) return relabel_term(t.relabeling(), inner);
      return Term::relabel(t.relabeling(), std::move(inner));
    }
    default:
      return t;
  }
}

}  // namespace lpmod
