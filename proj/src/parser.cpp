#include "symloc/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace symloc {

namespace {

// --- lexer ------------------------------------------------------------------

enum class Tok {
  Ident, Int,
  KwMop, KwType, KwPred, KwFunc, KwConst, KwVar, KwConstraint, KwMinimize,
  KwMaximize, KwForall, KwExists, KwExists1, KwIn, KwSum, KwCount, KwReachable,
  LBrace, RBrace, LParen, RParen, Semi, Comma, Colon, Bar, Amp, Bang,
  Arrow, DotDot, Eq, Ne, Lt, Le, Gt, Ge, Implies, Iff, Plus, Minus,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  long long value = 0;
  SourceSpan span;
};

const std::map<std::string, Tok, std::less<>> kKeywords = {
    {"mop", Tok::KwMop},           {"type", Tok::KwType},
    {"pred", Tok::KwPred},         {"func", Tok::KwFunc},
    {"const", Tok::KwConst},       {"var", Tok::KwVar},
    {"constraint", Tok::KwConstraint}, {"minimize", Tok::KwMinimize},
    {"maximize", Tok::KwMaximize}, {"forall", Tok::KwForall},
    {"exists", Tok::KwExists},     {"exists1", Tok::KwExists1},
    {"in", Tok::KwIn},             {"sum", Tok::KwSum},
    {"count", Tok::KwCount},       {"reachable", Tok::KwReachable},
};

struct Lexer {
  const std::string& src;
  const std::string& file;
  std::size_t pos = 0;
  int line = 1, col = 1;
  std::vector<Token> tokens;
  std::vector<ParseDiagnostic> diagnostics;

  char cur() const { return pos < src.size() ? src[pos] : '\0'; }
  char ahead() const { return pos + 1 < src.size() ? src[pos + 1] : '\0'; }

  void advance() {
    if (cur() == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  SourceSpan here(int length) const { return {file, line, col, length}; }

  void push(Tok kind, std::string text, SourceSpan span, long long value = 0) {
    tokens.push_back({kind, std::move(text), value, std::move(span)});
  }

  void run() {
    while (pos < src.size()) {
      char c = cur();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
        continue;
      }
      if (c == '/' && ahead() == '/') {
        while (pos < src.size() && cur() != '\n') advance();
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        SourceSpan span = here(0);
        std::string word;
        while (std::isalnum(static_cast<unsigned char>(cur())) || cur() == '_') {
          word += cur();
          advance();
        }
        span.length = static_cast<int>(word.size());
        auto kw = kKeywords.find(word);
        push(kw == kKeywords.end() ? Tok::Ident : kw->second, std::move(word), span);
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        SourceSpan span = here(0);
        std::string digits;
        while (std::isdigit(static_cast<unsigned char>(cur()))) {
          digits += cur();
          advance();
        }
        span.length = static_cast<int>(digits.size());
        long long value = 0;
        try {
          value = std::stoll(digits);
        } catch (const std::exception&) {
          diagnostics.push_back({span, ParseDiagnostic::Severity::Error,
                                 "integer literal out of range"});
        }
        push(Tok::Int, std::move(digits), span, value);
        continue;
      }
      SourceSpan span = here(1);
      auto two = [&](char a, char b) { return c == a && ahead() == b; };
      if (two('<', '=') && pos + 2 < src.size() && src[pos + 2] == '>') {
        span.length = 3;
        advance(); advance(); advance();
        push(Tok::Iff, "<=>", span);
      } else if (two('-', '>')) {
        span.length = 2; advance(); advance(); push(Tok::Arrow, "->", span);
      } else if (two('.', '.')) {
        span.length = 2; advance(); advance(); push(Tok::DotDot, "..", span);
      } else if (two('!', '=')) {
        span.length = 2; advance(); advance(); push(Tok::Ne, "!=", span);
      } else if (two('<', '=')) {
        span.length = 2; advance(); advance(); push(Tok::Le, "<=", span);
      } else if (two('>', '=')) {
        span.length = 2; advance(); advance(); push(Tok::Ge, ">=", span);
      } else if (two('=', '>')) {
        span.length = 2; advance(); advance(); push(Tok::Implies, "=>", span);
      } else {
        advance();
        switch (c) {
          case '{': push(Tok::LBrace, "{", span); break;
          case '}': push(Tok::RBrace, "}", span); break;
          case '(': push(Tok::LParen, "(", span); break;
          case ')': push(Tok::RParen, ")", span); break;
          case ';': push(Tok::Semi, ";", span); break;
          case ',': push(Tok::Comma, ",", span); break;
          case ':': push(Tok::Colon, ":", span); break;
          case '|': push(Tok::Bar, "|", span); break;
          case '&': push(Tok::Amp, "&", span); break;
          case '!': push(Tok::Bang, "!", span); break;
          case '=': push(Tok::Eq, "=", span); break;
          case '<': push(Tok::Lt, "<", span); break;
          case '>': push(Tok::Gt, ">", span); break;
          case '+': push(Tok::Plus, "+", span); break;
          case '-': push(Tok::Minus, "-", span); break;
          default:
            diagnostics.push_back({span, ParseDiagnostic::Severity::Error,
                                   std::string("unexpected character '") + c + "'"});
        }
      }
    }
    push(Tok::End, "", here(0));
  }
};

// --- raw declarations (syntax phase) ----------------------------------------

struct ElemRef {
  bool is_int = false;
  long long value = 0;
  std::string label;
  SourceSpan span;
};

struct DataEntry {
  std::vector<ElemRef> tuple;
  bool parenthesized = false;
  std::optional<ElemRef> result;  // set when written with '->'
};

struct DataRaw {
  std::string name;
  SourceSpan span;
  std::vector<DataEntry> entries;
};

struct ObjectiveRaw {
  Sense sense;
  TermPtr term;
  SourceSpan span;
};

struct RawModel {
  std::string name;
  std::vector<TypeDecl> types;
  std::vector<SymbolDecl> symbols;
  std::vector<FormulaPtr> constraints;
  std::vector<ObjectiveRaw> objectives;
  std::vector<DataRaw> data;
};

struct ParseAbort {};

struct Parser {
  const std::vector<Token>& tokens;
  std::vector<ParseDiagnostic>& diagnostics;
  std::size_t pos = 0;

  const Token& peek(int off = 0) const {
    std::size_t i = pos + off;
    return i < tokens.size() ? tokens[i] : tokens.back();
  }
  bool at(Tok k) const { return peek().kind == k; }
  Token take() { return tokens[std::min(pos++, tokens.size() - 1)]; }
  bool accept(Tok k) {
    if (!at(k)) return false;
    ++pos;
    return true;
  }

  [[noreturn]] void fail(const std::string& message) {
    diagnostics.push_back({peek().span, ParseDiagnostic::Severity::Error, message});
    throw ParseAbort{};
  }

  Token expect(Tok k, const std::string& what) {
    if (!at(k)) fail("expected " + what);
    return take();
  }

  std::string expect_ident(const std::string& what) {
    if (!at(Tok::Ident)) fail("expected " + what);
    return take().text;
  }

  void sync_to_semi() {
    int depth = 0;
    while (!at(Tok::End)) {
      Tok k = peek().kind;
      if (k == Tok::LBrace || k == Tok::LParen) ++depth;
      if (k == Tok::RBrace || k == Tok::RParen) {
        if (depth == 0 && k == Tok::RBrace) return;  // end of model body
        --depth;
      }
      if (k == Tok::Semi && depth <= 0) {
        take();
        return;
      }
      take();
    }
  }

  RawModel parse_file() {
    RawModel model;
    if (!at(Tok::KwMop)) {
      diagnostics.push_back({peek().span, ParseDiagnostic::Severity::Error,
                             "expected 'mop'"});
      return model;
    }
    take();
    try {
      model.name = expect_ident("model name");
      expect(Tok::LBrace, "'{'");
    } catch (const ParseAbort&) {
      return model;
    }
    while (!at(Tok::RBrace) && !at(Tok::End)) {
      try {
        parse_decl(model);
      } catch (const ParseAbort&) {
        sync_to_semi();
      }
    }
    if (!accept(Tok::RBrace))
      diagnostics.push_back({peek().span, ParseDiagnostic::Severity::Error,
                             "expected '}'"});
    return model;
  }

  void parse_decl(RawModel& model) {
    switch (peek().kind) {
      case Tok::KwType: return parse_type_decl(model);
      case Tok::KwVar:
      case Tok::KwPred:
      case Tok::KwFunc:
      case Tok::KwConst: return parse_symbol_decl(model);
      case Tok::KwConstraint: {
        take();
        model.constraints.push_back(parse_formula());
        expect(Tok::Semi, "';'");
        return;
      }
      case Tok::KwMinimize:
      case Tok::KwMaximize: {
        Token kw = take();
        TermPtr t = parse_term();
        expect(Tok::Semi, "';'");
        model.objectives.push_back({kw.kind == Tok::KwMinimize ? Sense::Minimize
                                                               : Sense::Maximize,
                                    std::move(t), kw.span});
        return;
      }
      case Tok::Ident: {
        if (peek(1).kind == Tok::Eq) return parse_data(model);
        fail("expected declaration");
      }
      default:
        fail("expected declaration");
    }
  }

  void parse_type_decl(RawModel& model) {
    take();  // 'type'
    TypeDecl decl;
    decl.span = peek().span;
    decl.name = expect_ident("type name");
    if (accept(Tok::Eq)) {
      if (at(Tok::LBrace)) {
        take();
        if (!at(Tok::RBrace)) {
          decl.labels.push_back(expect_ident("element label"));
          while (accept(Tok::Comma)) decl.labels.push_back(expect_ident("element label"));
        }
        expect(Tok::RBrace, "'}'");
      } else {
        decl.is_interval = true;
        decl.lo = parse_signed_int();
        expect(Tok::DotDot, "'..'");
        decl.hi = parse_signed_int();
      }
    } else {
      decl.labels.clear();  // domain supplied later as instance data
    }
    expect(Tok::Semi, "';'");
    model.types.push_back(std::move(decl));
  }

  long long parse_signed_int() {
    bool neg = accept(Tok::Minus);
    Token t = expect(Tok::Int, "integer");
    return neg ? -t.value : t.value;
  }

  void parse_symbol_decl(RawModel& model) {
    SymbolDecl decl;
    decl.binding = accept(Tok::KwVar) ? Binding::Var : Binding::Interpreted;
    switch (peek().kind) {
      case Tok::KwPred: decl.kind = SymbolKind::Predicate; break;
      case Tok::KwFunc: decl.kind = SymbolKind::Function; break;
      case Tok::KwConst: decl.kind = SymbolKind::Constant; break;
      default: fail("expected 'pred', 'func' or 'const'");
    }
    take();
    decl.span = peek().span;
    decl.name = expect_ident("symbol name");
    expect(Tok::LParen, "'('");
    if (!at(Tok::RParen)) {
      decl.arg_types.push_back(expect_ident("type name"));
      while (accept(Tok::Comma)) decl.arg_types.push_back(expect_ident("type name"));
    }
    expect(Tok::RParen, "')'");
    if (accept(Tok::Arrow)) {
      decl.result_type = expect_ident("result type");
      if (decl.kind == SymbolKind::Predicate)
        fail("a predicate cannot have a result type");
    } else if (decl.kind != SymbolKind::Predicate) {
      fail("expected '->' and a result type");
    }
    if (decl.kind == SymbolKind::Constant && !decl.arg_types.empty())
      fail("a constant takes no arguments");
    expect(Tok::Semi, "';'");
    model.symbols.push_back(std::move(decl));
  }

  ElemRef parse_elem_ref() {
    ElemRef e;
    e.span = peek().span;
    if (at(Tok::Ident)) {
      e.label = take().text;
    } else if (at(Tok::Int) || at(Tok::Minus)) {
      e.is_int = true;
      e.value = parse_signed_int();
    } else {
      fail("expected element");
    }
    return e;
  }

  void parse_data(RawModel& model) {
    DataRaw data;
    data.span = peek().span;
    data.name = expect_ident("name");
    expect(Tok::Eq, "'='");
    expect(Tok::LBrace, "'{'");
    if (!at(Tok::RBrace)) {
      data.entries.push_back(parse_data_entry());
      while (accept(Tok::Comma)) data.entries.push_back(parse_data_entry());
    }
    expect(Tok::RBrace, "'}'");
    expect(Tok::Semi, "';'");
    model.data.push_back(std::move(data));
  }

  DataEntry parse_data_entry() {
    DataEntry entry;
    if (accept(Tok::LParen)) {
      entry.parenthesized = true;
      if (!at(Tok::RParen)) {
        entry.tuple.push_back(parse_elem_ref());
        while (accept(Tok::Comma)) entry.tuple.push_back(parse_elem_ref());
      }
      expect(Tok::RParen, "')'");
    } else {
      entry.tuple.push_back(parse_elem_ref());
    }
    if (accept(Tok::Arrow)) entry.result = parse_elem_ref();
    return entry;
  }

  // --- formulas -------------------------------------------------------------

  FormulaPtr parse_formula() { return parse_iff(); }

  FormulaPtr parse_iff() {
    FormulaPtr lhs = parse_implies();
    while (at(Tok::Iff)) {
      SourceSpan span = take().span;
      FormulaPtr rhs = parse_implies();
      lhs = f_connective(FormulaNode::Kind::Iff, {std::move(lhs), std::move(rhs)}, span);
    }
    return lhs;
  }

  FormulaPtr parse_implies() {
    FormulaPtr lhs = parse_or();
    if (at(Tok::Implies)) {
      SourceSpan span = take().span;
      FormulaPtr rhs = parse_implies();  // right associative
      return f_connective(FormulaNode::Kind::Implies, {std::move(lhs), std::move(rhs)}, span);
    }
    return lhs;
  }

  FormulaPtr parse_or() {
    FormulaPtr lhs = parse_and();
    while (at(Tok::Bar)) {
      SourceSpan span = take().span;
      FormulaPtr rhs = parse_and();
      lhs = f_connective(FormulaNode::Kind::Or, {std::move(lhs), std::move(rhs)}, span);
    }
    return lhs;
  }

  FormulaPtr parse_and() {
    FormulaPtr lhs = parse_unary();
    while (at(Tok::Amp)) {
      SourceSpan span = take().span;
      FormulaPtr rhs = parse_unary();
      lhs = f_connective(FormulaNode::Kind::And, {std::move(lhs), std::move(rhs)}, span);
    }
    return lhs;
  }

  FormulaPtr parse_unary() {
    if (at(Tok::Bang)) {
      SourceSpan span = take().span;
      return f_not(parse_unary(), span);
    }
    if (at(Tok::KwForall) || at(Tok::KwExists) || at(Tok::KwExists1)) {
      Token kw = take();
      Binder binder;
      binder.var = expect_ident("variable name");
      expect(Tok::KwIn, "'in'");
      binder.type = expect_ident("type name");
      expect(Tok::Colon, "':'");
      FormulaPtr body = parse_formula();  // quantifier body extends maximally
      FormulaNode::Kind kind = kw.kind == Tok::KwForall   ? FormulaNode::Kind::Forall
                               : kw.kind == Tok::KwExists ? FormulaNode::Kind::Exists
                                                          : FormulaNode::Kind::Exists1;
      return f_quant(kind, std::move(binder), std::move(body), kw.span);
    }
    return parse_atom();
  }

  static bool is_term_follow(Tok k) {
    switch (k) {
      case Tok::Eq: case Tok::Ne: case Tok::Lt: case Tok::Le:
      case Tok::Gt: case Tok::Ge: case Tok::Plus: case Tok::Minus:
        return true;
      default:
        return false;
    }
  }

  FormulaPtr parse_atom() {
    if (at(Tok::KwReachable)) {
      Token kw = take();
      expect(Tok::LParen, "'('");
      TermPtr start = parse_term();
      expect(Tok::Comma, "','");
      std::string rel = expect_ident("relation symbol");
      expect(Tok::Comma, "','");
      std::string cover = expect_ident("type name");
      expect(Tok::RParen, "')'");
      return f_reachable(std::move(start), std::move(rel), std::move(cover), kw.span);
    }
    if (at(Tok::LParen)) {
      // Could open a grouped formula or a grouped term; try the formula
      // reading first and fall back on the term path.
      std::size_t save_pos = pos;
      std::size_t save_diags = diagnostics.size();
      take();
      try {
        FormulaPtr inner = parse_formula();
        expect(Tok::RParen, "')'");
        if (!is_term_follow(peek().kind)) return inner;
      } catch (const ParseAbort&) {
      }
      pos = save_pos;
      diagnostics.resize(save_diags);
    }
    SourceSpan span = peek().span;
    TermPtr lhs = parse_term();
    CompareOp op;
    switch (peek().kind) {
      case Tok::Eq: op = CompareOp::Eq; break;
      case Tok::Ne: op = CompareOp::Ne; break;
      case Tok::Lt: op = CompareOp::Lt; break;
      case Tok::Le: op = CompareOp::Le; break;
      case Tok::Gt: op = CompareOp::Gt; break;
      case Tok::Ge: op = CompareOp::Ge; break;
      default: {
        if (lhs->kind == TermNode::Kind::Apply)
          return f_pred(lhs->name, lhs->args, lhs->span);
        diagnostics.push_back({span, ParseDiagnostic::Severity::Error,
                               "expected formula, found term"});
        throw ParseAbort{};
      }
    }
    SourceSpan op_span = take().span;
    TermPtr rhs = parse_term();
    return f_compare(op, std::move(lhs), std::move(rhs), op_span);
  }

  // --- terms ----------------------------------------------------------------

  TermPtr parse_term() {
    TermPtr lhs = parse_primary_term();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      Token op = take();
      TermPtr rhs = parse_primary_term();
      lhs = op.kind == Tok::Plus ? t_add(std::move(lhs), std::move(rhs), op.span)
                                 : t_sub(std::move(lhs), std::move(rhs), op.span);
    }
    return lhs;
  }

  TermPtr parse_primary_term() {
    if (at(Tok::Int)) {
      Token t = take();
      return t_int(t.value, t.span);
    }
    if (at(Tok::LParen)) {
      take();
      TermPtr inner = parse_term();
      expect(Tok::RParen, "')'");
      return inner;
    }
    if (at(Tok::KwSum)) return parse_sum();
    if (at(Tok::KwCount)) return parse_count();
    if (at(Tok::Ident)) {
      Token name = take();
      if (accept(Tok::LParen)) {
        std::vector<TermPtr> args;
        if (!at(Tok::RParen)) {
          args.push_back(parse_term());
          while (accept(Tok::Comma)) args.push_back(parse_term());
        }
        expect(Tok::RParen, "')'");
        return t_apply(name.text, std::move(args), name.span);
      }
      // Variable, constant or element literal; resolved later.
      return t_var(name.text, name.span);
    }
    fail("expected term");
  }

  TermPtr parse_sum() {
    Token kw = take();
    expect(Tok::LBrace, "'{'");
    TermPtr body = parse_term();
    expect(Tok::Bar, "'|'");
    std::vector<Binder> binders;
    FormulaPtr guard;
    binders.push_back(parse_binder());
    while (accept(Tok::Comma)) {
      if (at(Tok::Ident) && peek(1).kind == Tok::KwIn) {
        binders.push_back(parse_binder());
      } else {
        guard = parse_formula();
        break;
      }
    }
    expect(Tok::RBrace, "'}'");
    return t_sum(std::move(body), std::move(binders), std::move(guard), kw.span);
  }

  TermPtr parse_count() {
    Token kw = take();
    expect(Tok::LBrace, "'{'");
    Binder binder = parse_binder();
    expect(Tok::Bar, "'|'");
    FormulaPtr guard = parse_formula();
    expect(Tok::RBrace, "'}'");
    return t_count(std::move(binder), std::move(guard), kw.span);
  }

  Binder parse_binder() {
    Binder b;
    b.var = expect_ident("variable name");
    expect(Tok::KwIn, "'in'");
    b.type = expect_ident("type name");
    return b;
  }
};

// --- resolution (identifiers -> variables / constants / elements) -----------

struct Resolver {
  const Mop& mop;
  std::vector<ParseDiagnostic>& diagnostics;
  std::vector<std::string> scope;

  void error(const SourceSpan& span, const std::string& message) {
    diagnostics.push_back({span, ParseDiagnostic::Severity::Error, message});
  }

  bool bound(const std::string& name) const {
    return std::find(scope.begin(), scope.end(), name) != scope.end();
  }

  TermPtr resolve_term(const TermPtr& t) {
    switch (t->kind) {
      case TermNode::Kind::Variable: {
        if (bound(t->name)) return t;
        if (auto s = mop.symbol_id(t->name)) {
          const SymbolDecl& decl = mop.symbol(*s);
          if (!decl.arg_types.empty()) {
            error(t->span, "symbol '" + t->name + "' expects " +
                               std::to_string(decl.arg_types.size()) + " argument(s)");
            return t;
          }
          return t_apply(t->name, {}, t->span);
        }
        if (mop.structure.elements.find_label(t->name))
          return t_elem(t->name, t->span);
        error(t->span, "unknown identifier '" + t->name + "'");
        return t;
      }
      case TermNode::Kind::Element:
      case TermNode::Kind::IntLit:
        return t;
      case TermNode::Kind::Apply: {
        std::vector<TermPtr> args;
        for (const auto& a : t->args) args.push_back(resolve_term(a));
        return t_apply(t->name, std::move(args), t->span);
      }
      case TermNode::Kind::Add:
      case TermNode::Kind::Sub: {
        TermPtr lhs = resolve_term(t->args[0]);
        TermPtr rhs = resolve_term(t->args[1]);
        return t->kind == TermNode::Kind::Add ? t_add(std::move(lhs), std::move(rhs), t->span)
                                              : t_sub(std::move(lhs), std::move(rhs), t->span);
      }
      case TermNode::Kind::SumAgg: {
        for (const auto& b : t->binders) scope.push_back(b.var);
        TermPtr body = resolve_term(t->args[0]);
        FormulaPtr guard = t->guard ? resolve_formula(t->guard) : nullptr;
        scope.resize(scope.size() - t->binders.size());
        return t_sum(std::move(body), t->binders, std::move(guard), t->span);
      }
      case TermNode::Kind::CountAgg: {
        scope.push_back(t->binders[0].var);
        FormulaPtr guard = resolve_formula(t->guard);
        scope.pop_back();
        return t_count(t->binders[0], std::move(guard), t->span);
      }
    }
    return t;
  }

  FormulaPtr resolve_formula(const FormulaPtr& f) {
    switch (f->kind) {
      case FormulaNode::Kind::Forall:
      case FormulaNode::Kind::Exists:
      case FormulaNode::Kind::Exists1: {
        scope.push_back(f->binder.var);
        FormulaPtr body = resolve_formula(f->children[0]);
        scope.pop_back();
        return f_quant(f->kind, f->binder, std::move(body), f->span);
      }
      case FormulaNode::Kind::And:
      case FormulaNode::Kind::Or:
      case FormulaNode::Kind::Implies:
      case FormulaNode::Kind::Iff: {
        std::vector<FormulaPtr> children;
        for (const auto& c : f->children) children.push_back(resolve_formula(c));
        return f_connective(f->kind, std::move(children), f->span);
      }
      case FormulaNode::Kind::Not:
        return f_not(resolve_formula(f->children[0]), f->span);
      case FormulaNode::Kind::Compare:
        return f_compare(f->op, resolve_term(f->terms[0]), resolve_term(f->terms[1]),
                         f->span);
      case FormulaNode::Kind::PredApply: {
        std::vector<TermPtr> args;
        for (const auto& a : f->terms) args.push_back(resolve_term(a));
        return f_pred(f->symbol, std::move(args), f->span);
      }
      case FormulaNode::Kind::Reachable:
        return f_reachable(resolve_term(f->terms[0]), f->symbol, f->cover_type, f->span);
    }
    return f;
  }
};

// Resolves an element reference against a type's domain.
std::optional<ElemId> resolve_in_type(const Mop& mop, TypeId t, const ElemRef& ref) {
  const ElementTable& elems = mop.structure.elements;
  std::optional<ElemId> id =
      ref.is_int ? elems.find_int(ref.value) : elems.find_label(ref.label);
  if (!id || !mop.type_contains(t, *id)) return std::nullopt;
  return id;
}

std::string elem_ref_text(const ElemRef& ref) {
  return ref.is_int ? std::to_string(ref.value) : ref.label;
}

}  // namespace

// --- parse_model ------------------------------------------------------------

ParseResult parse_model(const std::string& text, const std::string& filename) {
  ParseResult result;
  Lexer lexer{text, filename};
  lexer.run();
  result.diagnostics = std::move(lexer.diagnostics);
  if (!result.diagnostics.empty()) return result;

  Parser parser{lexer.tokens, result.diagnostics};
  RawModel raw = parser.parse_file();
  if (!result.diagnostics.empty()) return result;

  Mop mop;
  mop.name = raw.name;
  auto error = [&](const SourceSpan& span, const std::string& message) {
    result.diagnostics.push_back({span, ParseDiagnostic::Severity::Error, message});
  };

  // Vocabulary; duplicate names are reported here so later stages can rely on
  // unambiguous lookups.
  std::map<std::string, std::size_t> type_by_name;
  std::set<std::string> names;
  for (auto& t : raw.types) {
    if (!names.insert(t.name).second) {
      error(t.span, "duplicate declaration of '" + t.name + "'");
      continue;
    }
    if (t.name == "int") error(t.span, "'int' is a reserved type name");
    type_by_name[t.name] = mop.vocabulary.types.size();
    mop.vocabulary.types.push_back(t);
  }
  for (auto& s : raw.symbols) {
    if (!names.insert(s.name).second) {
      error(s.span, "duplicate declaration of '" + s.name + "'");
      continue;
    }
    mop.vocabulary.symbols.push_back(s);
  }

  // Split instance data into late type domains and symbol tables.
  std::vector<const DataRaw*> symbol_data;
  for (const auto& d : raw.data) {
    auto it = type_by_name.find(d.name);
    if (it == type_by_name.end()) {
      symbol_data.push_back(&d);
      continue;
    }
    TypeDecl& decl = mop.vocabulary.types[it->second];
    if (decl.is_interval || !decl.labels.empty()) {
      error(d.span, "type '" + d.name + "' already has a domain");
      continue;
    }
    for (const auto& e : d.entries) {
      if (e.parenthesized || e.result || e.tuple.size() != 1 || e.tuple[0].is_int) {
        error(d.span, "domain of type '" + d.name + "' must be a list of element labels");
        break;
      }
      decl.labels.push_back(e.tuple[0].label);
    }
  }
  for (const auto& t : mop.vocabulary.types) {
    if (!t.is_interval && t.labels.empty())
      error(t.span, "type '" + t.name + "' has no domain");
    if (t.is_interval && t.lo > t.hi)
      error(t.span, "type '" + t.name + "' has an empty interval");
  }
  if (!result.diagnostics.empty()) return result;

  // Global element universe and per-type domains.
  mop.structure.type_domains.resize(mop.vocabulary.types.size());
  for (std::size_t i = 0; i < mop.vocabulary.types.size(); ++i) {
    const TypeDecl& t = mop.vocabulary.types[i];
    auto& dom = mop.structure.type_domains[i];
    std::set<std::string> seen;
    if (t.is_interval) {
      for (long long v = t.lo; v <= t.hi; ++v)
        dom.push_back(mop.structure.elements.intern_int(v));
    } else {
      for (const auto& label : t.labels) {
        if (!seen.insert(label).second) {
          error(t.span, "duplicate element '" + label + "' in type '" + t.name + "'");
          continue;
        }
        dom.push_back(mop.structure.elements.intern_label(label));
      }
    }
  }
  mop.structure.tables.resize(mop.vocabulary.symbols.size());
  mop.finalize();

  // Symbol tables.
  for (const DataRaw* d : symbol_data) {
    auto sym = mop.symbol_id(d->name);
    if (!sym) {
      error(d->span, "unknown identifier '" + d->name + "'");
      continue;
    }
    const SymbolDecl& decl = mop.symbol(*sym);
    const SymbolInfo& info = mop.info(*sym);
    if (decl.binding == Binding::Var) {
      error(d->span, "var symbol '" + decl.name + "' must not be given a table");
      continue;
    }
    if (info.table_size == 0) continue;  // signature failed to resolve; validate reports
    Table table;
    table.entries.assign(info.table_size,
                         decl.kind == SymbolKind::Predicate ? 0 : kUnsetEntry);
    for (const auto& e : d->entries) {
      bool is_func = decl.is_function_like();
      if (is_func && !e.result) {
        error(d->span, "entries for function '" + decl.name + "' need '-> value'");
        break;
      }
      if (!is_func && e.result) {
        error(d->span, "entries for predicate '" + decl.name + "' cannot map to a value");
        break;
      }
      if (e.tuple.size() != decl.arg_types.size() &&
          !(e.tuple.empty() && decl.arg_types.empty())) {
        error(e.tuple.empty() ? d->span : e.tuple[0].span,
              "entry arity does not match '" + decl.name + "'");
        continue;
      }
      std::size_t idx = 0;
      bool tuple_ok = true;
      for (std::size_t i = 0; i < e.tuple.size(); ++i) {
        auto id = resolve_in_type(mop, info.arg_ids[i], e.tuple[i]);
        if (!id) {
          error(e.tuple[i].span, "unknown element '" + elem_ref_text(e.tuple[i]) +
                                     "' for type '" + mop.type(info.arg_ids[i]).name + "'");
          tuple_ok = false;
          break;
        }
        idx += static_cast<std::size_t>(mop.domain_index(info.arg_ids[i], *id)) *
               info.strides[i];
      }
      if (!tuple_ok) continue;
      if (!is_func) {
        table.entries[idx] = 1;
        continue;
      }
      long long value;
      if (info.result_id == kTypeInt) {
        if (!e.result->is_int) {
          error(e.result->span, "function '" + decl.name + "' maps to int values");
          continue;
        }
        value = e.result->value;
      } else {
        auto id = resolve_in_type(mop, info.result_id, *e.result);
        if (!id) {
          error(e.result->span, "unknown element '" + elem_ref_text(*e.result) +
                                    "' for type '" + mop.type(info.result_id).name + "'");
          continue;
        }
        value = *id;
      }
      if (table.entries[idx] != kUnsetEntry && table.entries[idx] != value) {
        error(e.result->span, "duplicate table entry for '" + decl.name + "'");
        continue;
      }
      table.entries[idx] = value;
    }
    mop.structure.tables[*sym] = std::move(table);
  }

  // Theory and objective with identifier resolution.
  Resolver resolver{mop, result.diagnostics, {}};
  for (const auto& c : raw.constraints) mop.theory.push_back(resolver.resolve_formula(c));
  if (raw.objectives.empty()) {
    error({filename, 1, 1, 0}, "model declares no objective");
  } else if (raw.objectives.size() > 1) {
    error(raw.objectives[1].span, "conflicting objective declarations");
  } else {
    mop.sense = raw.objectives[0].sense;
    mop.objective_user = resolver.resolve_term(raw.objectives[0].term);
    mop.objective = mop.sense == Sense::Minimize
                        ? mop.objective_user
                        : t_sub(t_int(0), mop.objective_user);
  }
  if (!result.diagnostics.empty()) return result;

  ValidationReport vr = validate(mop);
  for (const auto& d : vr.diagnostics) {
    SourceSpan span = d.span.value_or(SourceSpan{filename, 1, 1, 0});
    if (span.file.empty()) span.file = filename;
    result.diagnostics.push_back({span, ParseDiagnostic::Severity::Error, d.message});
  }
  if (!result.diagnostics.empty()) return result;

  result.mop = std::move(mop);
  return result;
}

// --- format_model -----------------------------------------------------------

namespace {

int formula_prec(const FormulaNode& f) {
  switch (f.kind) {
    case FormulaNode::Kind::Forall:
    case FormulaNode::Kind::Exists:
    case FormulaNode::Kind::Exists1: return 0;
    case FormulaNode::Kind::Iff: return 1;
    case FormulaNode::Kind::Implies: return 2;
    case FormulaNode::Kind::Or: return 3;
    case FormulaNode::Kind::And: return 4;
    case FormulaNode::Kind::Not: return 5;
    default: return 6;
  }
}

const char* compare_text(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "=";
}

void print_term(std::ostream& os, const TermPtr& t, bool nested = false);

void print_formula(std::ostream& os, const FormulaPtr& f, int min_prec) {
  int prec = formula_prec(*f);
  bool parens = prec < min_prec;
  if (parens) os << "(";
  switch (f->kind) {
    case FormulaNode::Kind::Forall:
    case FormulaNode::Kind::Exists:
    case FormulaNode::Kind::Exists1: {
      const char* kw = f->kind == FormulaNode::Kind::Forall   ? "forall"
                       : f->kind == FormulaNode::Kind::Exists ? "exists"
                                                              : "exists1";
      os << kw << " " << f->binder.var << " in " << f->binder.type << ": ";
      print_formula(os, f->children[0], 0);
      break;
    }
    case FormulaNode::Kind::Iff:
    case FormulaNode::Kind::Or:
    case FormulaNode::Kind::And: {
      const char* op = f->kind == FormulaNode::Kind::Iff ? " <=> "
                       : f->kind == FormulaNode::Kind::Or ? " | " : " & ";
      print_formula(os, f->children[0], prec);
      os << op;
      print_formula(os, f->children[1], prec + 1);
      break;
    }
    case FormulaNode::Kind::Implies:
      print_formula(os, f->children[0], prec + 1);
      os << " => ";
      print_formula(os, f->children[1], prec);
      break;
    case FormulaNode::Kind::Not:
      os << "!";
      print_formula(os, f->children[0], prec + 1);
      break;
    case FormulaNode::Kind::Compare:
      print_term(os, f->terms[0]);
      os << " " << compare_text(f->op) << " ";
      print_term(os, f->terms[1]);
      break;
    case FormulaNode::Kind::PredApply: {
      os << f->symbol << "(";
      for (std::size_t i = 0; i < f->terms.size(); ++i) {
        if (i) os << ", ";
        print_term(os, f->terms[i]);
      }
      os << ")";
      break;
    }
    case FormulaNode::Kind::Reachable:
      os << "reachable(";
      print_term(os, f->terms[0]);
      os << ", " << f->symbol << ", " << f->cover_type << ")";
      break;
  }
  if (parens) os << ")";
}

void print_term(std::ostream& os, const TermPtr& t, bool nested) {
  switch (t->kind) {
    case TermNode::Kind::Variable:
    case TermNode::Kind::Element:
      os << t->name;
      break;
    case TermNode::Kind::IntLit:
      os << t->value;
      break;
    case TermNode::Kind::Apply:
      os << t->name;
      if (!t->args.empty()) {
        os << "(";
        for (std::size_t i = 0; i < t->args.size(); ++i) {
          if (i) os << ", ";
          print_term(os, t->args[i]);
        }
        os << ")";
      }
      break;
    case TermNode::Kind::Add:
    case TermNode::Kind::Sub: {
      if (nested) os << "(";
      print_term(os, t->args[0]);
      os << (t->kind == TermNode::Kind::Add ? " + " : " - ");
      print_term(os, t->args[1], true);
      if (nested) os << ")";
      break;
    }
    case TermNode::Kind::SumAgg: {
      os << "sum { ";
      print_term(os, t->args[0]);
      os << " | ";
      for (std::size_t i = 0; i < t->binders.size(); ++i) {
        if (i) os << ", ";
        os << t->binders[i].var << " in " << t->binders[i].type;
      }
      if (t->guard) {
        os << ", ";
        print_formula(os, t->guard, 0);
      }
      os << " }";
      break;
    }
    case TermNode::Kind::CountAgg:
      os << "count { " << t->binders[0].var << " in " << t->binders[0].type << " | ";
      print_formula(os, t->guard, 0);
      os << " }";
      break;
  }
}

void print_tuple(std::ostream& os, const Mop& mop, SymbolId s, std::size_t flat) {
  const SymbolInfo& info = mop.info(s);
  os << "(";
  for (std::size_t i = 0; i < info.arg_ids.size(); ++i) {
    if (i) os << ",";
    std::size_t idx = (flat / info.strides[i]) % mop.domain(info.arg_ids[i]).size();
    os << mop.structure.elements.display(mop.domain(info.arg_ids[i])[idx]);
  }
  os << ")";
}

}  // namespace

std::string format_model(const Mop& mop) {
  std::ostringstream os;
  os << "mop " << mop.name << " {\n";
  for (const auto& t : mop.vocabulary.types) {
    os << "  type " << t.name << " = ";
    if (t.is_interval) {
      os << t.lo << " .. " << t.hi;
    } else {
      os << "{ ";
      for (std::size_t i = 0; i < t.labels.size(); ++i) {
        if (i) os << ", ";
        os << t.labels[i];
      }
      os << " }";
    }
    os << ";\n";
  }
  for (const auto& s : mop.vocabulary.symbols) {
    os << "  ";
    if (s.binding == Binding::Var) os << "var ";
    os << (s.kind == SymbolKind::Predicate ? "pred"
           : s.kind == SymbolKind::Function ? "func" : "const");
    os << " " << s.name << "(";
    for (std::size_t i = 0; i < s.arg_types.size(); ++i) {
      if (i) os << ", ";
      os << s.arg_types[i];
    }
    os << ")";
    if (s.is_function_like()) os << " -> " << s.result_type;
    os << ";\n";
  }
  for (const auto& f : mop.theory) {
    os << "  constraint ";
    print_formula(os, f, 0);
    os << ";\n";
  }
  os << (mop.sense == Sense::Minimize ? "  minimize " : "  maximize ");
  print_term(os, mop.objective_user);
  os << ";\n";
  for (std::size_t s = 0; s < mop.vocabulary.symbols.size(); ++s) {
    const auto& table = mop.structure.tables[s];
    if (!table) continue;
    const SymbolDecl& decl = mop.vocabulary.symbols[s];
    const SymbolInfo& info = mop.info(static_cast<SymbolId>(s));
    os << "  " << decl.name << " = {";
    bool first = true;
    int per_line = 0;
    for (std::size_t i = 0; i < table->entries.size(); ++i) {
      long long v = table->entries[i];
      if (decl.kind == SymbolKind::Predicate && v == 0) continue;
      if (!first) os << ",";
      if (per_line == 0) os << "\n   ";
      os << " ";
      first = false;
      print_tuple(os, mop, static_cast<SymbolId>(s), i);
      if (decl.is_function_like()) {
        os << " -> ";
        if (info.result_id == kTypeInt)
          os << v;
        else
          os << mop.structure.elements.display(static_cast<ElemId>(v));
      }
      per_line = (per_line + 1) % 8;
    }
    os << (first ? "};\n" : "\n  };\n");
  }
  os << "}\n";
  return os.str();
}

// --- assignment JSON --------------------------------------------------------

nlohmann::ordered_json assignment_to_json(const Mop& mop, const Assignment& a) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  const ElementTable& elems = mop.structure.elements;
  for (SymbolId s : mop.var_symbols()) {
    const SymbolDecl& decl = mop.symbol(s);
    const SymbolInfo& info = mop.info(s);
    const Table& table = a.tables[mop.var_ordinal(s)];
    if (decl.kind == SymbolKind::Predicate) {
      auto rows = nlohmann::ordered_json::array();
      for (std::size_t i = 0; i < table.entries.size(); ++i) {
        if (!table.entries[i]) continue;
        auto tuple = nlohmann::ordered_json::array();
        for (std::size_t p = 0; p < info.arg_ids.size(); ++p) {
          std::size_t idx = (i / info.strides[p]) % mop.domain(info.arg_ids[p]).size();
          tuple.push_back(elems.display(mop.domain(info.arg_ids[p])[idx]));
        }
        rows.push_back(std::move(tuple));
      }
      out[decl.name] = std::move(rows);
    } else {
      auto map = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < table.entries.size(); ++i) {
        std::string key;
        for (std::size_t p = 0; p < info.arg_ids.size(); ++p) {
          if (p) key += ",";
          std::size_t idx = (i / info.strides[p]) % mop.domain(info.arg_ids[p]).size();
          key += elems.display(mop.domain(info.arg_ids[p])[idx]);
        }
        map[key] = elems.display(static_cast<ElemId>(table.entries[i]));
      }
      out[decl.name] = std::move(map);
    }
  }
  return out;
}

std::string write_assignment(const Mop& mop, const Assignment& a) {
  return assignment_to_json(mop, a).dump(2);
}

namespace {

// Accepts a label or the decimal form of an integer element.
std::optional<ElemId> resolve_label_text(const Mop& mop, const std::string& text) {
  if (auto id = mop.structure.elements.find_label(text)) return id;
  if (!text.empty() &&
      (std::isdigit(static_cast<unsigned char>(text[0])) || text[0] == '-')) {
    try {
      return mop.structure.elements.find_int(std::stoll(text));
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::vector<std::string> split_key(const std::string& key) {
  std::vector<std::string> parts;
  if (key.empty()) return parts;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = key.find(',', start);
    parts.push_back(key.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return parts;
}

}  // namespace

AssignmentReadResult read_assignment(const std::string& json_text, const Mop& mop) {
  AssignmentReadResult result;
  nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
  if (doc.is_discarded()) {
    result.error = "assignment is not valid JSON";
    return result;
  }
  if (!doc.is_object()) {
    result.error = "assignment must be a JSON object keyed by var symbol";
    return result;
  }
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    auto s = mop.symbol_id(it.key());
    if (!s || !mop.is_var(*s)) {
      result.error = "unknown var symbol '" + it.key() + "'";
      return result;
    }
  }

  Assignment a = first_assignment(mop);
  for (SymbolId s : mop.var_symbols()) {
    const SymbolDecl& decl = mop.symbol(s);
    const SymbolInfo& info = mop.info(s);
    if (!doc.contains(decl.name)) {
      result.error = "missing var symbol '" + decl.name + "'";
      return result;
    }
    const nlohmann::json& entry = doc[decl.name];
    Table& table = a.tables[mop.var_ordinal(s)];
    if (decl.kind == SymbolKind::Predicate) {
      if (!entry.is_array()) {
        result.error = "'" + decl.name + "' must be an array of tuples";
        return result;
      }
      table.entries.assign(info.table_size, 0);
      for (const auto& tuple : entry) {
        if (!tuple.is_array() || tuple.size() != info.arg_ids.size()) {
          result.error = "tuple of wrong arity for '" + decl.name + "'";
          return result;
        }
        std::size_t idx = 0;
        for (std::size_t p = 0; p < info.arg_ids.size(); ++p) {
          if (!tuple[p].is_string()) {
            result.error = "tuple elements must be strings for '" + decl.name + "'";
            return result;
          }
          auto id = resolve_label_text(mop, tuple[p].get<std::string>());
          if (!id || !mop.type_contains(info.arg_ids[p], *id)) {
            result.error = "unknown element '" + tuple[p].get<std::string>() + "' for '" +
                           decl.name + "'";
            return result;
          }
          idx += static_cast<std::size_t>(mop.domain_index(info.arg_ids[p], *id)) *
                 info.strides[p];
        }
        table.entries[idx] = 1;
      }
    } else {
      if (!entry.is_object()) {
        result.error = "'" + decl.name + "' must map argument tuples to values";
        return result;
      }
      table.entries.assign(info.table_size, kUnsetEntry);
      for (auto it = entry.begin(); it != entry.end(); ++it) {
        std::vector<std::string> parts = split_key(it.key());
        if (parts.size() != info.arg_ids.size()) {
          result.error = "key '" + it.key() + "' has wrong arity for '" + decl.name + "'";
          return result;
        }
        std::size_t idx = 0;
        for (std::size_t p = 0; p < parts.size(); ++p) {
          auto id = resolve_label_text(mop, parts[p]);
          if (!id || !mop.type_contains(info.arg_ids[p], *id)) {
            result.error = "unknown element '" + parts[p] + "' for '" + decl.name + "'";
            return result;
          }
          idx += static_cast<std::size_t>(mop.domain_index(info.arg_ids[p], *id)) *
                 info.strides[p];
        }
        if (!it.value().is_string()) {
          result.error = "values must be strings for '" + decl.name + "'";
          return result;
        }
        auto rid = resolve_label_text(mop, it.value().get<std::string>());
        if (!rid || !mop.type_contains(info.result_id, *rid)) {
          result.error = "unknown element '" + it.value().get<std::string>() + "' for '" +
                         decl.name + "'";
          return result;
        }
        table.entries[idx] = *rid;
      }
      for (long long v : table.entries) {
        if (v == kUnsetEntry) {
          result.error = "partial function table for '" + decl.name + "'";
          return result;
        }
      }
    }
  }
  result.assignment = std::move(a);
  return result;
}

std::string format_diagnostic(const ParseDiagnostic& d) {
  std::ostringstream os;
  os << d.span.file << ":" << d.span.line << ":" << d.span.column << ": "
     << (d.severity == ParseDiagnostic::Severity::Error ? "error" : "warning") << ": "
     << d.message;
  return os.str();
}

}  // namespace symloc
