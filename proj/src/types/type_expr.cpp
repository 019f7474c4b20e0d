#include "lpmod/types/type_expr.hpp"

#include <algorithm>
#include <sstream>

#include "lpmod/diagnostics.hpp"

namespace lpmod {

namespace {

// Ordering on optional lower bounds where nullopt is -infinity.
bool lo_less(const std::optional<BigInt>& a, const std::optional<BigInt>& b) {
  if (!a) return b.has_value();
  if (!b) return false;
  return *a < *b;
}

// hi(a) + 1 >= lo(b): the ranges overlap or touch.
bool touches(const IntRange& a, const IntRange& b) {
  if (!a.hi || !b.lo) return true;
  return *a.hi + 1 >= *b.lo;
}

std::optional<BigInt> max_hi(const std::optional<BigInt>& a, const std::optional<BigInt>& b) {
  if (!a || !b) return std::nullopt;
  return *a < *b ? b : a;
}

std::optional<BigInt> max_lo(const std::optional<BigInt>& a, const std::optional<BigInt>& b) {
  if (!a) return b;
  if (!b) return a;
  return *a < *b ? b : a;
}

std::optional<BigInt> min_hi(const std::optional<BigInt>& a, const std::optional<BigInt>& b) {
  if (!a) return b;
  if (!b) return a;
  return *a < *b ? a : b;
}

bool nonempty(const IntRange& r) { return !r.lo || !r.hi || *r.lo <= *r.hi; }

}  // namespace

bool IntRange::contains(const BigInt& v) const {
  return (!lo || *lo <= v) && (!hi || v <= *hi);
}

bool IntRange::covers(const IntRange& o) const {
  bool lo_ok = !lo || (o.lo && *lo <= *o.lo);
  bool hi_ok = !hi || (o.hi && *o.hi <= *hi);
  return lo_ok && hi_ok;
}

TypeExpr TypeExpr::from_atoms(std::span<const TypeAtom> atoms) {
  TypeExpr t;
  for (const auto& atom : atoms) {
    std::visit(
        [&](const auto& a) {
          using A = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<A, CtorExt>) {
            t.ctors_.insert(a.name);
          } else if constexpr (std::is_same_v<A, ConstSet>) {
            for (const auto& v : a.values) {
              if (v.kind() == Term::Kind::Integer)
                t.ranges_.push_back(IntRange{v.int_value(), v.int_value()});
              else
                t.constants_.insert(v);
            }
          } else if constexpr (std::is_same_v<A, IntRange>) {
            if (nonempty(a)) t.ranges_.push_back(a);
          } else if constexpr (std::is_same_v<A, AllStrings>) {
            t.all_strings_ = true;
          } else {
            t.any_ = true;
          }
        },
        atom);
  }
  t.normalize();
  return t;
}

void TypeExpr::normalize() {
  if (any_) {
    all_strings_ = false;
    ctors_.clear();
    constants_.clear();
    ranges_.clear();
    return;
  }
  if (all_strings_) {
    for (auto it = constants_.begin(); it != constants_.end();) {
      if (it->kind() == Term::Kind::String)
        it = constants_.erase(it);
      else
        ++it;
    }
  }
  std::sort(ranges_.begin(), ranges_.end(),
            [](const IntRange& a, const IntRange& b) { return lo_less(a.lo, b.lo); });
  std::vector<IntRange> merged;
  for (const auto& r : ranges_) {
    if (!merged.empty() && touches(merged.back(), r))
      merged.back().hi = max_hi(merged.back().hi, r.hi);
    else
      merged.push_back(r);
  }
  ranges_ = std::move(merged);
}

TypeExpr TypeExpr::any_term() {
  TypeExpr t;
  t.any_ = true;
  return t;
}

TypeExpr TypeExpr::integers() { return range(std::nullopt, std::nullopt); }

TypeExpr TypeExpr::strings() {
  TypeExpr t;
  t.all_strings_ = true;
  return t;
}

TypeExpr TypeExpr::booleans() {
  TypeExpr t;
  t.constants_.insert(Term::boolean(true));
  t.constants_.insert(Term::boolean(false));
  return t;
}

TypeExpr TypeExpr::ctor(QualName name) {
  TypeExpr t;
  t.ctors_.insert(std::move(name));
  return t;
}

TypeExpr TypeExpr::constant(Term value) {
  TypeAtom a = ConstSet{{std::move(value)}};
  return from_atoms(std::span(&a, 1));
}

TypeExpr TypeExpr::range(std::optional<BigInt> lo, std::optional<BigInt> hi) {
  TypeAtom a = IntRange{std::move(lo), std::move(hi)};
  return from_atoms(std::span(&a, 1));
}

std::vector<TypeAtom> TypeExpr::atoms() const {
  std::vector<TypeAtom> out;
  if (any_) {
    out.emplace_back(AnyTerm{});
    return out;
  }
  for (const auto& c : ctors_) out.emplace_back(CtorExt{c});
  if (!constants_.empty()) out.emplace_back(ConstSet{{constants_.begin(), constants_.end()}});
  for (const auto& r : ranges_) out.emplace_back(r);
  if (all_strings_) out.emplace_back(AllStrings{});
  return out;
}

bool TypeExpr::is_empty() const {
  return !any_ && !all_strings_ && ctors_.empty() && constants_.empty() && ranges_.empty();
}

TypeExpr TypeExpr::unite(const TypeExpr& other) const {
  auto a = atoms();
  auto b = other.atoms();
  a.insert(a.end(), b.begin(), b.end());
  return from_atoms(a);
}

TypeExpr TypeExpr::intersect(const TypeExpr& o) const {
  if (any_) return o;
  if (o.any_) return *this;
  TypeExpr t;
  for (const auto& c : ctors_)
    if (o.ctors_.count(c)) t.ctors_.insert(c);
  for (const auto& c : constants_)
    if (o.admits(c)) t.constants_.insert(c);
  for (const auto& c : o.constants_)
    if (admits(c)) t.constants_.insert(c);
  t.all_strings_ = all_strings_ && o.all_strings_;
  for (const auto& r : ranges_) {
    for (const auto& s : o.ranges_) {
      IntRange i{max_lo(r.lo, s.lo), min_hi(r.hi, s.hi)};
      if (nonempty(i)) t.ranges_.push_back(i);
    }
  }
  t.normalize();
  return t;
}

bool TypeExpr::admits(const Term& v) const {
  if (any_) return true;
  switch (v.kind()) {
    case Term::Kind::Integer:
      return std::any_of(ranges_.begin(), ranges_.end(),
                         [&](const IntRange& r) { return r.contains(v.int_value()); });
    case Term::Kind::String:
      return all_strings_ || constants_.count(v) > 0;
    case Term::Kind::Constant:
      return constants_.count(v) > 0;
    case Term::Kind::Apply:
      return ctors_.count(v.name()) > 0;
    default:
      return false;
  }
}

std::string TypeExpr::str() const {
  if (any_) return "Any";
  std::vector<std::string> parts;
  for (const auto& c : ctors_) parts.push_back(c.str());
  if (!constants_.empty()) {
    std::string s = "{";
    bool first = true;
    for (const auto& c : constants_) {
      if (!first) s += ", ";
      s += c.str();
      first = false;
    }
    parts.push_back(s + "}");
  }
  for (const auto& r : ranges_) {
    std::ostringstream os;
    if (!r.lo && !r.hi)
      os << "Integer";
    else if (r.lo && r.hi && *r.lo == *r.hi)
      os << '{' << *r.lo << '}';
    else
      os << (r.lo ? r.lo->str() : std::string("-inf")) << ".." << (r.hi ? r.hi->str() : std::string("inf"));
    parts.push_back(os.str());
  }
  if (all_strings_) parts.push_back("String");
  if (parts.empty()) return "{}";
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += " + ";
    out += parts[i];
  }
  return out;
}

bool is_subtype(const TypeExpr& a, const TypeExpr& b) {
  if (b.is_any()) return true;
  if (a.is_any()) return false;
  for (const auto& c : a.ctors())
    if (!b.ctors().count(c)) return false;
  for (const auto& c : a.constants())
    if (!b.admits(c)) return false;
  if (a.all_strings() && !b.all_strings()) return false;
  for (const auto& r : a.int_ranges()) {
    bool covered = std::any_of(b.int_ranges().begin(), b.int_ranges().end(),
                               [&](const IntRange& s) { return s.covers(r); });
    if (!covered) return false;
  }
  return true;
}

bool type_equal(const TypeExpr& a, const TypeExpr& b) { return is_subtype(a, b) && is_subtype(b, a); }

bool relabel_applies(const RelabelingSpec& rho, const TypeExpr& a) {
  return std::all_of(a.ctors().begin(), a.ctors().end(),
                     [&](const QualName& c) { return c.starts_with(rho.from); });
}

TypeExpr relabel_type(const RelabelingSpec& rho, const TypeExpr& a) {
  std::vector<TypeAtom> out;
  for (auto& atom : a.atoms()) {
    if (auto* c = std::get_if<CtorExt>(&atom)) {
      if (!c->name.starts_with(rho.from))
        throw Error(code::kType, "relabeling " + rho.str() + " does not apply to " + c->name.str());
      out.emplace_back(CtorExt{c->name.reprefixed(rho.from, rho.to)});
    } else {
      out.push_back(std::move(atom));
    }
  }
  return TypeExpr::from_atoms(out);
}

bool is_member(const Term& v, const TypeExpr& type, const TypeEnv& env) {
  if (!type.admits(v)) return false;
  if (type.is_any() || v.kind() != Term::Kind::Apply) return true;
  const auto* args = env.ctor_arg_types(v.name());
  if (!args || args->size() != v.args().size()) return false;
  for (std::size_t i = 0; i < args->size(); ++i)
    if (!is_member(v.args()[i], (*args)[i], env)) return false;
  return true;
}

}  // namespace lpmod
