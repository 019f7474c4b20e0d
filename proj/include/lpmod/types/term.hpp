#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "lpmod/types/qual_name.hpp"

namespace lpmod {

using BigInt = boost::multiprecision::cpp_int;

/// Relabeling function rho_{from -> to}: swaps the qualifier prefix `from`
/// for `to` on every non-constant constructor of a term.
struct RelabelingSpec {
  Qualifiers from;
  Qualifiers to;

  bool is_identity() const { return from == to; }
  std::string str() const;
  friend bool operator==(const RelabelingSpec&, const RelabelingSpec&) = default;
  friend auto operator<=>(const RelabelingSpec&, const RelabelingSpec&) = default;
};

/// Immutable first-order term. Copies share structure.
///
/// Ground terms are built from integers, strings, user constants (nullary
/// constructors such as NOP or TRUE) and constructor applications. Open
/// terms additionally contain variables, wildcards, accessors `x.field`,
/// and inferred relabelings (only in compiled rule heads).
class Term {
 public:
  enum class Kind : std::uint8_t {
    Integer,
    String,
    Constant,
    Apply,
    Variable,
    Wildcard,
    Accessor,
    Relabel,
  };

  Term();  // integer 0

  static Term integer(BigInt value);
  static Term integer(long long value) { return integer(BigInt(value)); }
  static Term string(std::string value);
  static Term constant(QualName name);
  static Term apply(QualName ctor, std::vector<Term> args);
  static Term variable(std::string name);
  static Term wildcard();
  static Term accessor(std::string var, std::string field);
  static Term relabel(RelabelingSpec spec, Term inner);

  static Term boolean(bool b) { return constant(QualName(b ? "TRUE" : "FALSE")); }

  Kind kind() const { return node_->kind; }
  bool is_ground() const { return node_->ground; }

  const BigInt& int_value() const { return node_->integer; }
  /// String payload, variable name, or accessor base variable.
  const std::string& text() const { return node_->text; }
  const std::string& field() const { return node_->field; }
  /// Constant or constructor name.
  const QualName& name() const { return node_->name; }
  const std::vector<Term>& args() const { return node_->args; }
  const RelabelingSpec& relabeling() const { return node_->spec; }
  const Term& inner() const { return node_->args.front(); }

  /// Outer symbol used to index facts: ctor/constant name, or "#int"/"#str".
  std::string index_key() const;

  void collect_variables(std::vector<std::string>& out) const;

  /// Model-syntax rendering; strings are quoted and escaped.
  std::string str() const;

  friend bool operator==(const Term& a, const Term& b);
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);
  friend std::strong_ordering term_order(const Term& a, const Term& b);

 private:
  struct Node {
    Kind kind = Kind::Integer;
    bool ground = true;
    BigInt integer;
    std::string text;
    std::string field;
    QualName name;
    std::vector<Term> args;
    RelabelingSpec spec;
  };
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  std::shared_ptr<const Node> node_;
};

/// Deterministic total order: integers < strings < user constants <
/// applications; applications by qualified name, then arguments
/// lexicographically. Open terms sort after all ground terms.
std::strong_ordering term_order(const Term& a, const Term& b);

std::ostream& operator<<(std::ostream& os, const Term& t);

std::string quote_string(const std::string& s);

/// Recursive prefix replacement on a ground term. Integers, strings and
/// constants are fixed points. Throws lpmod::Error when a constructor does
/// not carry the `from` prefix.
Term relabel_term(const RelabelingSpec& rho, const Term& t);

using Binding = std::map<std::string, Term>;

/// Replaces variables bound in `b`; unbound variables are left in place.
Term substitute(const Term& t, const Binding& b);

}  // namespace lpmod
