#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lpmod/types/term.hpp"

namespace lpmod {

/// Closed integer interval; a missing bound is infinite.
struct IntRange {
  std::optional<BigInt> lo;
  std::optional<BigInt> hi;

  bool contains(const BigInt& v) const;
  bool covers(const IntRange& other) const;
  friend bool operator==(const IntRange&, const IntRange&) = default;
};

/// The full declared extension of a constructor.
struct CtorExt {
  QualName name;
  friend bool operator==(const CtorExt&, const CtorExt&) = default;
};
struct ConstSet {
  std::vector<Term> values;
  friend bool operator==(const ConstSet&, const ConstSet&) = default;
};
struct AllStrings {
  friend bool operator==(const AllStrings&, const AllStrings&) = default;
};
/// Every term (the denotation of a variable).
struct AnyTerm {
  friend bool operator==(const AnyTerm&, const AnyTerm&) = default;
};

using TypeAtom = std::variant<CtorExt, ConstSet, IntRange, AllStrings, AnyTerm>;

/// A denotation: a union of atoms kept in normal form.
///
/// Normal form: integer content (including integer constants) is a sorted
/// list of disjoint, non-adjacent ranges; remaining constants are
/// deduplicated; string constants vanish under AllStrings; AnyTerm absorbs
/// everything. Two denotations are equal iff their normal forms are equal.
class TypeExpr {
 public:
  TypeExpr() = default;  // empty

  static TypeExpr from_atoms(std::span<const TypeAtom> atoms);
  static TypeExpr any_term();
  static TypeExpr integers();
  static TypeExpr strings();
  static TypeExpr booleans();
  static TypeExpr ctor(QualName name);
  static TypeExpr constant(Term value);
  static TypeExpr range(std::optional<BigInt> lo, std::optional<BigInt> hi);

  std::vector<TypeAtom> atoms() const;

  bool is_any() const { return any_; }
  bool is_empty() const;
  const std::set<QualName>& ctors() const { return ctors_; }
  const std::set<Term>& constants() const { return constants_; }
  const std::vector<IntRange>& int_ranges() const { return ranges_; }
  bool all_strings() const { return all_strings_; }

  TypeExpr unite(const TypeExpr& other) const;
  TypeExpr intersect(const TypeExpr& other) const;

  /// Shallow membership: applications are checked by constructor name only.
  bool admits(const Term& ground) const;

  std::string str() const;

  friend bool operator==(const TypeExpr&, const TypeExpr&) = default;

 private:
  void normalize();

  bool any_ = false;
  bool all_strings_ = false;
  std::set<QualName> ctors_;
  std::set<Term> constants_;
  std::vector<IntRange> ranges_;
};

/// denotation(a) ⊆ denotation(b). Constructor extensions are contained only
/// in denotations naming the same constructor.
bool is_subtype(const TypeExpr& a, const TypeExpr& b);
bool type_equal(const TypeExpr& a, const TypeExpr& b);

/// Pointwise prefix swap. Throws lpmod::Error when a constructor lacks the
/// `from` prefix.
TypeExpr relabel_type(const RelabelingSpec& rho, const TypeExpr& a);
/// Whether every constructor in `a` carries the `from` prefix.
bool relabel_applies(const RelabelingSpec& rho, const TypeExpr& a);

/// Source of constructor signatures for deep membership tests.
class TypeEnv {
 public:
  virtual ~TypeEnv() = default;
  /// Argument types of constructor `name`, or nullptr if it is not one.
  virtual const std::vector<TypeExpr>* ctor_arg_types(const QualName& name) const = 0;
};

/// Deep membership: an application is a member of CtorExt(F) when its
/// constructor is F and every argument belongs to F's declared argument type.
bool is_member(const Term& ground, const TypeExpr& type, const TypeEnv& env);

}  // namespace lpmod
