#include "lpmod/frontend/lexer.hpp"

#include <array>
#include <cctype>

namespace lpmod::frontend {

namespace {

constexpr std::array<std::string_view, 17> kKeywords = {
    "new",      "fun",      "no",     "is",        "count",  "conforms", "requires", "ensures",  "any",
    "domain",   "model",    "transform", "system", "of",     "includes", "extends",  "returns",
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
 public:
  Lexer(std::string_view text, const std::string& path) : text_(text), path_(path) {}

  std::vector<Token> run() {
    while (true) {
      skip_space_and_comments();
      if (pos_ >= text_.size()) break;
      lex_one();
    }
    return std::move(out_);
  }

 private:
  char peek(std::size_t k = 0) const { return pos_ + k < text_.size() ? text_[pos_ + k] : '\0'; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space_and_comments() {
    while (pos_ < text_.size()) {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < text_.size() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string& msg, Span at) const { throw Error(code::kLex, msg, path_, at); }

  bool previous_is_operand() const {
    if (out_.empty()) return false;
    switch (out_.back().kind) {
      case Tok::Ident:
      case Tok::Integer:
      case Tok::String:
      case Tok::Wildcard:
      case Tok::RParen:
        return true;
      default:
        return false;
    }
  }

  void emit(Tok kind, std::string text, Span start) {
    start.length = static_cast<int>(pos_ - start_pos_);
    out_.push_back(Token{kind, std::move(text), start});
  }

  void lex_one() {
    Span start{line_, col_, 0};
    start_pos_ = pos_;
    char c = peek();

    if (ident_start(c)) {
      std::string word;
      while (true) {
        while (ident_char(peek())) {
          word += peek();
          advance();
        }
        while (peek() == '\'') {
          word += '\'';
          advance();
        }
        if (peek() == '.' && ident_start(peek(1))) {
          word += '.';
          advance();
          continue;
        }
        break;
      }
      if (word == "_") return emit(Tok::Wildcard, word, start);
      if (is_keyword(word)) return emit(Tok::Keyword, word, start);
      return emit(Tok::Ident, word, start);
    }

    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && std::isdigit(static_cast<unsigned char>(peek(1))) && !previous_is_operand())) {
      std::string digits;
      if (c == '-') {
        digits += '-';
        advance();
      }
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        digits += peek();
        advance();
      }
      if (ident_start(peek())) fail("illegal character '" + std::string(1, peek()) + "' in number", {line_, col_, 1});
      return emit(Tok::Integer, digits, start);
    }

    if (c == '"') {
      advance();
      std::string value;
      while (true) {
        if (pos_ >= text_.size() || peek() == '\n') fail("unterminated string literal", start);
        char d = peek();
        if (d == '"') {
          advance();
          break;
        }
        if (d == '\\') {
          advance();
          if (pos_ >= text_.size()) fail("unterminated string literal", start);
          char e = peek();
          switch (e) {
            case 'n':
              value += '\n';
              break;
            case 't':
              value += '\t';
              break;
            case '"':
            case '\\':
              value += e;
              break;
            default:
              fail(std::string("unknown escape '\\") + e + "'", {line_, col_, 1});
          }
          advance();
          continue;
        }
        value += d;
        advance();
      }
      return emit(Tok::String, value, start);
    }

    auto two = [&](char a, char b) { return c == a && peek(1) == b; };
    auto take = [&](int n, Tok kind) {
      std::string t(text_.substr(pos_, static_cast<std::size_t>(n)));
      for (int i = 0; i < n; ++i) advance();
      emit(kind, t, start);
    };

    if (c == ':' && peek(1) == ':' && peek(2) == '=') return take(3, Tok::Define);
    if (two(':', ':')) return take(2, Tok::Rename);
    if (two(':', '-')) return take(2, Tok::If);
    if (two('-', '>')) return take(2, Tok::Arrow);
    if (two('!', '=')) return take(2, Tok::Ne);
    if (two('<', '=')) return take(2, Tok::Le);
    if (two('>', '=')) return take(2, Tok::Ge);
    switch (c) {
      case ':':
        return take(1, Tok::Colon);
      case '(':
        return take(1, Tok::LParen);
      case ')':
        return take(1, Tok::RParen);
      case '{':
        return take(1, Tok::LBrace);
      case '}':
        return take(1, Tok::RBrace);
      case ',':
        return take(1, Tok::Comma);
      case ';':
        return take(1, Tok::Semi);
      case '.':
        return take(1, Tok::Dot);
      case '|':
        return take(1, Tok::Bar);
      case '+':
        return take(1, Tok::Plus);
      case '-':
        return take(1, Tok::Minus);
      case '*':
        return take(1, Tok::Star);
      case '/':
        return take(1, Tok::Slash);
      case '=':
        return take(1, Tok::Eq);
      case '<':
        return take(1, Tok::Lt);
      case '>':
        return take(1, Tok::Gt);
      default:
        break;
    }
    std::string shown = (static_cast<unsigned char>(c) < 0x80) ? std::string(1, c) : std::string("non-ASCII byte");
    fail("illegal character '" + shown + "'", {line_, col_, 1});
  }

  std::string_view text_;
  const std::string& path_;
  std::size_t pos_ = 0;
  std::size_t start_pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  std::vector<Token> out_;
};

}  // namespace

bool is_keyword(std::string_view word) {
  for (auto kw : kKeywords)
    if (kw == word) return true;
  return false;
}

std::string_view token_name(Tok k) {
  switch (k) {
    case Tok::Ident:
      return "identifier";
    case Tok::Integer:
      return "integer";
    case Tok::String:
      return "string";
    case Tok::Wildcard:
      return "'_'";
    case Tok::Keyword:
      return "keyword";
    case Tok::Define:
      return "'::='";
    case Tok::Rename:
      return "'::'";
    case Tok::If:
      return "':-'";
    case Tok::Colon:
      return "':'";
    case Tok::LParen:
      return "'('";
    case Tok::RParen:
      return "')'";
    case Tok::LBrace:
      return "'{'";
    case Tok::RBrace:
      return "'}'";
    case Tok::Comma:
      return "','";
    case Tok::Semi:
      return "';'";
    case Tok::Dot:
      return "'.'";
    case Tok::Bar:
      return "'|'";
    case Tok::Plus:
      return "'+'";
    case Tok::Minus:
      return "'-'";
    case Tok::Star:
      return "'*'";
    case Tok::Slash:
      return "'/'";
    case Tok::Arrow:
      return "'->'";
    case Tok::Eq:
      return "'='";
    case Tok::Ne:
      return "'!='";
    case Tok::Lt:
      return "'<'";
    case Tok::Le:
      return "'<='";
    case Tok::Gt:
      return "'>'";
    case Tok::Ge:
      return "'>='";
    case Tok::End:
      return "end of input";
  }
  return "?";
}

std::vector<Token> tokenize(std::string_view text, const std::string& path) { return Lexer(text, path).run(); }

}  // namespace lpmod::frontend
