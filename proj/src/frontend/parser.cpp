#include "lpmod/frontend/parser.hpp"

#include <set>
#include <utility>

namespace lpmod::frontend {

std::string_view module_kind_name(RawModuleDecl::Kind k) {
  switch (k) {
    case RawModuleDecl::Kind::Domain:
      return "domain";
    case RawModuleDecl::Kind::Model:
      return "model";
    case RawModuleDecl::Kind::Transform:
      return "transform";
    case RawModuleDecl::Kind::TransformSystem:
      return "transform system";
  }
  return "module";
}

namespace {

class Parser {
 public:
  Parser(const std::vector<Token>& tokens, const std::string& path) : toks_(tokens), path_(path) {
    end_.kind = Tok::End;
    if (!toks_.empty()) {
      end_.span = toks_.back().span;
      end_.span.col += toks_.back().span.length;
      end_.span.length = 0;
    } else {
      end_.span = {1, 1, 0};
    }
  }

  SourceUnit unit() {
    SourceUnit u;
    u.path = path_;
    std::set<std::pair<RawModuleDecl::Kind, std::string>> seen;
    while (!at(Tok::End)) {
      RawModuleDecl d = module();
      if (!seen.insert({d.kind, d.name}).second)
        throw Error(code::kDuplicateModule,
                    "duplicate " + std::string(module_kind_name(d.kind)) + " name '" + d.name + "'", path_, d.span);
      u.decls.push_back(std::move(d));
    }
    return u;
  }

  RawBody standalone_body() {
    RawBody b = body();
    accept(Tok::Dot);
    if (!at(Tok::End)) error("end of goal");
    return b;
  }

 private:
  const Token& cur() const { return pos_ < toks_.size() ? toks_[pos_] : end_; }
  const Token& ahead(std::size_t k) const { return pos_ + k < toks_.size() ? toks_[pos_ + k] : end_; }
  bool at(Tok k) const { return cur().kind == k; }
  bool at_kw(std::string_view kw) const { return cur().is_keyword(kw); }

  Token take() {
    Token t = cur();
    if (pos_ < toks_.size()) ++pos_;
    return t;
  }

  bool accept(Tok k) {
    if (!at(k)) return false;
    take();
    return true;
  }

  bool accept_kw(std::string_view kw) {
    if (!at_kw(kw)) return false;
    take();
    return true;
  }

  [[noreturn]] void error(std::string_view expected) const {
    const Token& t = cur();
    std::string found = t.kind == Tok::End ? std::string("end of input") : "'" + t.text + "'";
    throw Error(code::kSyntax, "expected " + std::string(expected) + ", found " + found, path_, t.span);
  }

  Token expect(Tok k) {
    if (!at(k)) error(token_name(k));
    return take();
  }

  void expect_kw(std::string_view kw) {
    if (!at_kw(kw)) error("'" + std::string(kw) + "'");
    take();
  }

  std::string simple_ident(std::string_view what) {
    if (!at(Tok::Ident) || cur().text.find('.') != std::string::npos) error(what);
    return take().text;
  }

  // ---- modules --------------------------------------------------------

  RawModuleDecl module() {
    RawModuleDecl d;
    d.path = path_;
    d.span = cur().span;
    if (accept_kw("domain")) {
      d.kind = RawModuleDecl::Kind::Domain;
      d.name = simple_ident("domain name");
      while (true) {
        if (accept_kw("includes"))
          import_list(d.imports, Import::Mode::Includes);
        else if (accept_kw("extends"))
          import_list(d.imports, Import::Mode::Extends);
        else
          break;
      }
      d.body = items(/*model=*/false);
    } else if (accept_kw("model")) {
      d.kind = RawModuleDecl::Kind::Model;
      d.name = simple_ident("model name");
      expect_kw("of");
      Import of;
      of.mode = Import::Mode::Of;
      of.span = cur().span;
      of.target = simple_ident("domain name");
      d.imports.push_back(of);
      if (accept_kw("includes")) import_list(d.imports, Import::Mode::Includes);
      d.body = items(/*model=*/true);
    } else if (accept_kw("transform")) {
      bool system = accept_kw("system");
      d.kind = system ? RawModuleDecl::Kind::TransformSystem : RawModuleDecl::Kind::Transform;
      d.name = simple_ident(system ? "transform system name" : "transform name");
      signature(d.imports, Import::Mode::Input);
      expect_kw("returns");
      signature(d.imports, Import::Mode::Output);
      d.body = system ? equations() : items(/*model=*/false);
    } else {
      error("'domain', 'model' or 'transform'");
    }
    return d;
  }

  void import_list(std::vector<Import>& out, Import::Mode mode) {
    do {
      Import im;
      im.mode = mode;
      im.span = cur().span;
      std::string first = simple_ident("module name");
      if (accept(Tok::Rename)) {
        im.prefix = first;
        im.target = simple_ident("module name");
      } else {
        im.target = first;
      }
      out.push_back(im);
    } while (accept(Tok::Comma));
  }

  void signature(std::vector<Import>& out, Import::Mode mode) {
    expect(Tok::LParen);
    do {
      Import im;
      im.mode = mode;
      im.span = cur().span;
      im.prefix = simple_ident("signature label");
      expect(Tok::Rename);
      im.target = simple_ident("domain name");
      out.push_back(im);
    } while (accept(Tok::Comma));
    expect(Tok::RParen);
  }

  std::vector<RawItem> items(bool model) {
    expect(Tok::LBrace);
    std::vector<RawItem> out;
    while (!accept(Tok::RBrace)) {
      if (at(Tok::End)) error("'}'");
      out.push_back(model ? model_item() : item());
    }
    return out;
  }

  std::vector<RawItem> equations() {
    expect(Tok::LBrace);
    std::vector<RawItem> out;
    while (!accept(Tok::RBrace)) {
      PipelineEq eq;
      eq.span = cur().span;
      do eq.lhs.push_back(simple_ident("pipeline variable"));
      while (accept(Tok::Comma));
      expect(Tok::Eq);
      eq.callee = simple_ident("transform name");
      expect(Tok::LParen);
      if (!at(Tok::RParen)) {
        do eq.args.push_back(simple_ident("pipeline argument"));
        while (accept(Tok::Comma));
      }
      expect(Tok::RParen);
      expect(Tok::Dot);
      out.emplace_back(std::move(eq));
    }
    return out;
  }

  RawItem item() {
    Span start = cur().span;
    for (auto [kw, kind] : {std::pair{"conforms", RawClause::Kind::Conforms},
                            std::pair{"requires", RawClause::Kind::Requires},
                            std::pair{"ensures", RawClause::Kind::Ensures}}) {
      if (accept_kw(kw)) {
        RawClause c;
        c.kind = kind;
        c.span = start;
        c.body = body();
        expect(Tok::Dot);
        return c;
      }
    }
    if (at(Tok::Ident) && ahead(1).kind == Tok::Define) return type_decl();

    RawRule r;
    r.span = start;
    do r.heads.push_back(expr());
    while (accept(Tok::Comma));
    expect(Tok::If);
    r.body = body();
    expect(Tok::Dot);
    return r;
  }

  RawItem model_item() {
    Span start = cur().span;
    if (at(Tok::Ident) && ahead(1).is_keyword("is")) {
      SymConstDef s;
      s.span = start;
      s.name = simple_ident("symbolic constant name");
      expect_kw("is");
      s.term = expr();
      expect(Tok::Dot);
      return s;
    }
    RawFact f;
    f.span = start;
    f.term = expr();
    expect(Tok::Dot);
    return f;
  }

  // ---- type declarations ---------------------------------------------

  RawItem type_decl() {
    TypeDecl t;
    t.span = cur().span;
    t.name = simple_ident("type name");
    expect(Tok::Define);
    if (accept_kw("new")) {
      t.marker = TypeDecl::Marker::New;
    } else if (accept_kw("fun")) {
      t.marker = TypeDecl::Marker::Fun;
    }
    if (t.marker != TypeDecl::Marker::None || at(Tok::LParen)) {
      t.form = TypeDecl::Form::Ctor;
      expect(Tok::LParen);
      while (true) {
        t.fields.push_back(field());
        if (accept(Tok::Comma)) continue;
        if (at(Tok::Arrow)) {
          if (t.arrow) error("',' or ')'");
          take();
          t.arrow = t.fields.size();
          continue;
        }
        break;
      }
      expect(Tok::RParen);
    } else {
      t.form = TypeDecl::Form::Union;
      t.union_type = type_expr();
    }
    expect(Tok::Dot);
    return t;
  }

  RawField field() {
    RawField f;
    f.span = cur().span;
    if (at(Tok::Ident) && ahead(1).kind == Tok::Colon) {
      f.name = simple_ident("field name");
      take();
    }
    f.any = accept_kw("any");
    f.type = type_expr();
    return f;
  }

  RawTypeExpr type_expr() {
    RawTypeExpr t;
    do t.atoms.push_back(type_atom());
    while (accept(Tok::Plus));
    return t;
  }

  RawTypeAtom type_atom() {
    RawTypeAtom a;
    a.span = cur().span;
    if (accept(Tok::LBrace)) {
      a.kind = RawTypeAtom::Kind::ConstSet;
      do {
        RawExpr c;
        c.span = cur().span;
        if (at(Tok::Integer)) {
          c.kind = RawExpr::Kind::Integer;
        } else if (at(Tok::String)) {
          c.kind = RawExpr::Kind::String;
        } else if (at(Tok::Ident)) {
          c.kind = RawExpr::Kind::Name;
        } else {
          error("constant");
        }
        c.text = take().text;
        a.constants.push_back(std::move(c));
      } while (accept(Tok::Comma));
      expect(Tok::RBrace);
      return a;
    }
    if (!at(Tok::Ident)) error("type name or '{'");
    a.kind = RawTypeAtom::Kind::Name;
    a.name = take().text;
    return a;
  }

  // ---- bodies ---------------------------------------------------------

  RawBody body() {
    RawBody b;
    do {
      std::vector<RawLiteral> conj;
      do conj.push_back(literal());
      while (accept(Tok::Comma));
      b.disjuncts.push_back(std::move(conj));
    } while (accept(Tok::Semi));
    return b;
  }

  RawLiteral literal() {
    RawLiteral l;
    l.span = cur().span;
    if (accept_kw("no")) {
      if (at(Tok::LBrace)) {
        l.kind = RawLiteral::Kind::NoSet;
        l.comp = Box<RawComprehension>(comprehension());
      } else {
        l.kind = RawLiteral::Kind::NoAtom;
        l.lhs = expr();
        require_atom(l.lhs);
      }
      return l;
    }
    l.lhs = expr();
    static const std::pair<Tok, const char*> rel[] = {{Tok::Eq, "="}, {Tok::Ne, "!="}, {Tok::Lt, "<"},
                                                      {Tok::Le, "<="}, {Tok::Gt, ">"},  {Tok::Ge, ">="}};
    for (auto [tok, spelling] : rel) {
      if (accept(tok)) {
        l.kind = RawLiteral::Kind::Compare;
        l.op = spelling;
        l.rhs = expr();
        return l;
      }
    }
    if (accept(Tok::Colon)) {
      l.kind = RawLiteral::Kind::TypeTest;
      l.type = type_expr();
      return l;
    }
    if (accept_kw("is")) {
      l.kind = RawLiteral::Kind::Member;
      l.type = type_expr();
      return l;
    }
    l.kind = RawLiteral::Kind::Atom;
    require_atom(l.lhs);
    return l;
  }

  void require_atom(const RawExpr& e) const {
    if (e.kind != RawExpr::Kind::Apply && e.kind != RawExpr::Kind::Name)
      throw Error(code::kSyntax, "expected an atom, found an expression", path_, e.span);
  }

  RawComprehension comprehension() {
    expect(Tok::LBrace);
    RawComprehension c;
    do c.heads.push_back(expr());
    while (accept(Tok::Comma));
    expect(Tok::Bar);
    c.body = body();
    expect(Tok::RBrace);
    return c;
  }

  RawExpr expr() { return additive(); }

  RawExpr additive() {
    RawExpr lhs = multiplicative();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      char op = take().kind == Tok::Plus ? '+' : '-';
      lhs = binary(op, std::move(lhs), multiplicative());
    }
    return lhs;
  }

  RawExpr multiplicative() {
    RawExpr lhs = primary();
    while (at(Tok::Star) || at(Tok::Slash)) {
      char op = take().kind == Tok::Star ? '*' : '/';
      lhs = binary(op, std::move(lhs), primary());
    }
    return lhs;
  }

  static RawExpr binary(char op, RawExpr a, RawExpr b) {
    RawExpr e;
    e.kind = RawExpr::Kind::Binary;
    e.op = op;
    e.span = a.span;
    e.args.push_back(std::move(a));
    e.args.push_back(std::move(b));
    return e;
  }

  RawExpr primary() {
    RawExpr e;
    e.span = cur().span;
    if (at(Tok::Integer)) {
      e.kind = RawExpr::Kind::Integer;
      e.text = take().text;
    } else if (at(Tok::String)) {
      e.kind = RawExpr::Kind::String;
      e.text = take().text;
    } else if (accept(Tok::Wildcard)) {
      e.kind = RawExpr::Kind::Wildcard;
      e.text = "_";
    } else if (accept_kw("count")) {
      e.kind = RawExpr::Kind::Count;
      expect(Tok::LParen);
      e.comp = Box<RawComprehension>(comprehension());
      expect(Tok::RParen);
    } else if (at(Tok::Ident)) {
      e.text = take().text;
      if (accept(Tok::LParen)) {
        e.kind = RawExpr::Kind::Apply;
        do e.args.push_back(expr());
        while (accept(Tok::Comma));
        expect(Tok::RParen);
      } else {
        e.kind = RawExpr::Kind::Name;
      }
    } else if (accept(Tok::LParen)) {
      e = expr();
      expect(Tok::RParen);
    } else {
      error("term");
    }
    return e;
  }

  const std::vector<Token>& toks_;
  const std::string& path_;
  std::size_t pos_ = 0;
  Token end_;
};

}  // namespace

SourceUnit parse_unit(const std::vector<Token>& tokens, const std::string& path) {
  return Parser(tokens, path).unit();
}

SourceUnit parse_source(std::string_view text, const std::string& path) {
  return parse_unit(tokenize(text, path), path);
}

RawBody parse_body_text(std::string_view text, const std::string& path) {
  auto toks = tokenize(text, path);
  return Parser(toks, path).standalone_body();
}

}  // namespace lpmod::frontend
