#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lpmod/diagnostics.hpp"

namespace lpmod::frontend {

/// Shared immutable box with deep equality, for recursive syntax nodes.
template <class T>
class Box {
 public:
  Box() = default;
  explicit Box(T value) : ptr_(std::make_shared<const T>(std::move(value))) {}

  explicit operator bool() const { return ptr_ != nullptr; }
  const T& operator*() const { return *ptr_; }
  const T* operator->() const { return ptr_.get(); }

  friend bool operator==(const Box& a, const Box& b) {
    if (!a.ptr_ || !b.ptr_) return !a.ptr_ && !b.ptr_;
    return *a.ptr_ == *b.ptr_;
  }

 private:
  std::shared_ptr<const T> ptr_;
};

struct RawComprehension;

/// Term or arithmetic expression as written.
struct RawExpr {
  enum class Kind { Integer, String, Name, Apply, Wildcard, Count, Binary };

  Kind kind = Kind::Name;
  /// Integer digits, string payload, or the (possibly dotted) name.
  std::string text;
  std::vector<RawExpr> args;  // Apply arguments or Binary operands
  char op = 0;                // Binary: + - * /
  Box<RawComprehension> comp;  // Count
  Span span;

  friend bool operator==(const RawExpr&, const RawExpr&) = default;
};

struct RawTypeAtom {
  enum class Kind { Name, ConstSet };
  Kind kind = Kind::Name;
  std::string name;
  std::vector<RawExpr> constants;
  Span span;

  friend bool operator==(const RawTypeAtom&, const RawTypeAtom&) = default;
};

/// `T1 + T2 + { c1, ..., cn }`
struct RawTypeExpr {
  std::vector<RawTypeAtom> atoms;
  friend bool operator==(const RawTypeExpr&, const RawTypeExpr&) = default;
};

struct RawLiteral {
  enum class Kind {
    Atom,      // F(...) or a nullary constant
    NoSet,     // no { heads | body }
    NoAtom,    // no F(...)
    Compare,   // lhs op rhs
    TypeTest,  // lhs : type
    Member,    // lhs is type
  };
  Kind kind = Kind::Atom;
  RawExpr lhs;
  RawExpr rhs;
  std::string op;  // = != < <= > >=
  RawTypeExpr type;
  Box<RawComprehension> comp;
  Span span;

  friend bool operator==(const RawLiteral&, const RawLiteral&) = default;
};

/// Disjunction (`;`) of conjunctions (`,`).
struct RawBody {
  std::vector<std::vector<RawLiteral>> disjuncts;
  friend bool operator==(const RawBody&, const RawBody&) = default;
};

struct RawComprehension {
  std::vector<RawExpr> heads;
  RawBody body;
  friend bool operator==(const RawComprehension&, const RawComprehension&) = default;
};

struct RawField {
  std::optional<std::string> name;
  bool any = false;
  RawTypeExpr type;
  Span span;
  friend bool operator==(const RawField&, const RawField&) = default;
};

struct TypeDecl {
  enum class Form { Ctor, Union };
  enum class Marker { None, New, Fun };
  std::string name;
  Form form = Form::Ctor;
  Marker marker = Marker::None;
  std::vector<RawField> fields;
  /// For `fun`: number of fields before `->`.
  std::optional<std::size_t> arrow;
  RawTypeExpr union_type;
  Span span;
  friend bool operator==(const TypeDecl&, const TypeDecl&) = default;
};

struct RawRule {
  std::vector<RawExpr> heads;
  RawBody body;
  Span span;
  friend bool operator==(const RawRule&, const RawRule&) = default;
};

struct RawClause {
  enum class Kind { Conforms, Requires, Ensures };
  Kind kind = Kind::Conforms;
  RawBody body;
  Span span;
  friend bool operator==(const RawClause&, const RawClause&) = default;
};

struct RawFact {
  RawExpr term;
  Span span;
  friend bool operator==(const RawFact&, const RawFact&) = default;
};

/// `c is F(...)`
struct SymConstDef {
  std::string name;
  RawExpr term;
  Span span;
  friend bool operator==(const SymConstDef&, const SymConstDef&) = default;
};

/// `v1, ..., vk = T(a1, ..., an)`
struct PipelineEq {
  std::vector<std::string> lhs;
  std::string callee;
  std::vector<std::string> args;
  Span span;
  friend bool operator==(const PipelineEq&, const PipelineEq&) = default;
};

using RawItem = std::variant<TypeDecl, RawRule, RawClause, RawFact, SymConstDef, PipelineEq>;

struct Import {
  enum class Mode { Includes, Extends, Of, Input, Output };
  Mode mode = Mode::Includes;
  std::optional<std::string> prefix;
  std::string target;
  Span span;
  friend bool operator==(const Import&, const Import&) = default;
};

struct RawModuleDecl {
  enum class Kind { Domain, Model, Transform, TransformSystem };
  Kind kind = Kind::Domain;
  std::string name;
  std::vector<Import> imports;
  std::vector<RawItem> body;
  std::string path;
  Span span;
  friend bool operator==(const RawModuleDecl& a, const RawModuleDecl& b) {
    return a.kind == b.kind && a.name == b.name && a.imports == b.imports && a.body == b.body;
  }
};

std::string_view module_kind_name(RawModuleDecl::Kind k);

struct SourceUnit {
  std::string path;
  std::vector<RawModuleDecl> decls;
  friend bool operator==(const SourceUnit& a, const SourceUnit& b) { return a.decls == b.decls; }
};

}  // namespace lpmod::frontend
