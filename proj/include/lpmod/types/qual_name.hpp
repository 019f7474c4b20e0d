#pragma once

#include <compare>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lpmod {

/// Sequence of atomic qualifiers. The `.` operator is free and associative,
/// so a flat vector is the canonical representation.
using Qualifiers = std::vector<std::string>;

std::string join_qualifiers(std::span<const std::string> qs);

struct QualName {
  Qualifiers qualifiers;
  std::string base;

  QualName() = default;
  explicit QualName(std::string b) : base(std::move(b)) {}
  QualName(Qualifiers q, std::string b) : qualifiers(std::move(q)), base(std::move(b)) {}

  /// Splits `a.b.c` into qualifiers {a, b} and base c.
  static QualName parse(std::string_view dotted);

  bool is_qualified() const { return !qualifiers.empty(); }
  std::string str() const;

  bool starts_with(std::span<const std::string> prefix) const;
  QualName prefixed(std::span<const std::string> prefix) const;
  /// Replaces the leading `from` qualifiers with `to`. Caller checks starts_with.
  QualName reprefixed(std::span<const std::string> from, std::span<const std::string> to) const;

  friend bool operator==(const QualName&, const QualName&) = default;
  /// Ordered by the dotted spelling.
  friend std::strong_ordering operator<=>(const QualName& a, const QualName& b);
};

Qualifiers concat(std::span<const std::string> a, std::span<const std::string> b);

}  // namespace lpmod
