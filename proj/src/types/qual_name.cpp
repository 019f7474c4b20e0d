#include "lpmod/types/qual_name.hpp"

#include <algorithm>

namespace lpmod {

std::string join_qualifiers(std::span<const std::string> qs) {
  std::string out;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    if (i) out += '.';
    out += qs[i];
  }
  return out;
}

QualName QualName::parse(std::string_view dotted) {
  QualName q;
  std::size_t start = 0;
  while (true) {
    auto dot = dotted.find('.', start);
    if (dot == std::string_view::npos) {
      q.base = std::string(dotted.substr(start));
      return q;
    }
    q.qualifiers.emplace_back(dotted.substr(start, dot - start));
    start = dot + 1;
  }
}

std::string QualName::str() const {
  std::string out;
  for (const auto& q : qualifiers) {
    out += q;
    out += '.';
  }
  out += base;
  return out;
}

bool QualName::starts_with(std::span<const std::string> prefix) const {
  if (prefix.size() > qualifiers.size()) return false;
  return std::equal(prefix.begin(), prefix.end(), qualifiers.begin());
}

QualName QualName::prefixed(std::span<const std::string> prefix) const {
  return QualName(concat(prefix, qualifiers), base);
}

QualName QualName::reprefixed(std::span<const std::string> from,
                              std::span<const std::string> to) const {
  Qualifiers rest(qualifiers.begin() + static_cast<std::ptrdiff_t>(from.size()), qualifiers.end());
  return QualName(concat(to, rest), base);
}

namespace {

// Walks the dotted spelling of a name without materializing it.
class SpellingCursor {
 public:
  explicit SpellingCursor(const QualName& q) : q_(q) { skip_empty(); }

  bool done() const { return part_ > q_.qualifiers.size(); }
  char get() const {
    const std::string& p = current();
    return pos_ < p.size() ? p[pos_] : '.';
  }
  void next() {
    const std::string& p = current();
    if (pos_ < p.size()) {
      ++pos_;
      if (pos_ == p.size() && part_ == q_.qualifiers.size()) ++part_;
    } else {
      ++part_;
      pos_ = 0;
    }
    skip_empty();
  }

 private:
  const std::string& current() const {
    return part_ < q_.qualifiers.size() ? q_.qualifiers[part_] : q_.base;
  }
  void skip_empty() {
    if (part_ == q_.qualifiers.size() && q_.base.empty() && pos_ == 0) ++part_;
  }

  const QualName& q_;
  std::size_t part_ = 0;
  std::size_t pos_ = 0;
};

}  // namespace

std::strong_ordering operator<=>(const QualName& a, const QualName& b) {
  SpellingCursor x(a), y(b);
  while (!x.done() && !y.done()) {
    char cx = x.get(), cy = y.get();
    if (cx != cy) return static_cast<unsigned char>(cx) <=> static_cast<unsigned char>(cy);
    x.next();
    y.next();
  }
  if (x.done() && y.done()) return std::strong_ordering::equal;
  return x.done() ? std::strong_ordering::less : std::strong_ordering::greater;
}

Qualifiers concat(std::span<const std::string> a, std::span<const std::string> b) {
  Qualifiers out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace lpmod
