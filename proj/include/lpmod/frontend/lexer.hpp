#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "lpmod/diagnostics.hpp"

namespace lpmod::frontend {

enum class Tok {
  Ident,     // possibly dotted: in.Reach, left.DetFSMWithActions
  Integer,   // optional leading minus
  String,    // text holds the unescaped payload
  Wildcard,  // _
  Keyword,   // text holds the keyword
  Define,    // ::=
  Rename,    // ::
  If,        // :-
  Colon,     // :
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Semi,
  Dot,
  Bar,
  Plus,
  Minus,
  Star,
  Slash,
  Arrow,  // ->
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  Span span;

  bool is_keyword(std::string_view kw) const { return kind == Tok::Keyword && text == kw; }
};

std::string_view token_name(Tok k);
bool is_keyword(std::string_view word);

/// Splits source text into tokens. Comments (`//` to end of line) are
/// dropped; no End sentinel is appended. Throws lpmod::Error with code
/// "lex" on illegal input.
std::vector<Token> tokenize(std::string_view text, const std::string& path = {});

}  // namespace lpmod::frontend
