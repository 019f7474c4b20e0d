#include "lpmod/diagnostics.hpp"

#include <sstream>

namespace lpmod {

std::string_view severity_name(Severity s) {
  switch (s) {
    case Severity::Error:
      return "error";
    case Severity::Warning:
      return "warning";
    case Severity::Note:
      return "note";
  }
  return "error";
}

std::string format_diagnostic(const Diagnostic& d) {
  std::ostringstream os;
  if (!d.path.empty() || d.line > 0)
    os << (d.path.empty() ? "<input>" : d.path) << ':' << d.line << ':' << d.col << ": ";
  os << severity_name(d.severity) << ": " << d.message;
  return os.str();
}

Error::Error(Diagnostic d) : std::runtime_error(format_diagnostic(d)), diag_(std::move(d)) {}

Error::Error(std::string code, std::string message)
    : Error(Diagnostic{"", 0, 0, Severity::Error, std::move(code), std::move(message)}) {}

Error::Error(std::string code, std::string message, std::string path, Span span)
    : Error(Diagnostic{std::move(path), span.line, span.col, Severity::Error, std::move(code),
                       std::move(message)}) {}

}  // namespace lpmod
