#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lpmod {

/// Position of a construct in its source text. Spans never take part in
/// structural equality of syntax trees, so the comparison is always true.
struct Span {
  int line = 0;
  int col = 0;
  int length = 0;

  friend bool operator==(const Span&, const Span&) { return true; }
};

enum class Severity { Error, Warning, Note };

/// Stable diagnostic codes. The string form is part of the JSON interface.
namespace code {
inline constexpr const char* kLex = "lex";
inline constexpr const char* kSyntax = "syntax";
inline constexpr const char* kDuplicateModule = "duplicate-module";
inline constexpr const char* kUnknownModule = "unknown-module";
inline constexpr const char* kImportCycle = "import-cycle";
inline constexpr const char* kComposeConflict = "compose-conflict";
inline constexpr const char* kUnresolved = "unresolved-name";
inline constexpr const char* kKindClash = "kind-clash";
inline constexpr const char* kArity = "arity";
inline constexpr const char* kType = "type-error";
inline constexpr const char* kRewriteNone = "rewrite-none";
inline constexpr const char* kRewriteAmbiguous = "rewrite-ambiguous";
inline constexpr const char* kAccessor = "accessor";
inline constexpr const char* kUnsafe = "unsafe-rule";
inline constexpr const char* kStratify = "stratification";
inline constexpr const char* kSymConstCycle = "symconst-cycle";
inline constexpr const char* kSymConstUndefined = "symconst-undefined";
inline constexpr const char* kFact = "bad-fact";
inline constexpr const char* kFun = "fun-decl";
inline constexpr const char* kSignature = "signature";
inline constexpr const char* kPipeline = "pipeline";
inline constexpr const char* kDomainMismatch = "domain-mismatch";
inline constexpr const char* kResourceLimit = "resource-limit";
inline constexpr const char* kEvaluation = "evaluation";
inline constexpr const char* kExtraction = "extraction";
inline constexpr const char* kRename = "rename-collision";
inline constexpr const char* kNoModules = "no-modules";
inline constexpr const char* kRequires = "requires-violation";
inline constexpr const char* kEnsures = "ensures-violation";
}  // namespace code

struct Diagnostic {
  std::string path;
  int line = 0;
  int col = 0;
  Severity severity = Severity::Error;
  std::string code;
  std::string message;
};

std::string_view severity_name(Severity s);

/// `file:line:col: error: message`
std::string format_diagnostic(const Diagnostic& d);

/// Base of every error the engine reports to users.
class Error : public std::runtime_error {
 public:
  explicit Error(Diagnostic d);
  Error(std::string code, std::string message);
  Error(std::string code, std::string message, std::string path, Span span = {});

  const Diagnostic& diagnostic() const { return diag_; }
  const std::string& code() const { return diag_.code; }

 private:
  Diagnostic diag_;
};

}  // namespace lpmod
