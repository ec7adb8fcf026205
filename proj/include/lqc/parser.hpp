#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lqc/ast.hpp"
#include "lqc/constraint.hpp"
#include "lqc/diag.hpp"
#include "lqc/lexer.hpp"

namespace lqc {

// Builtin type-constructor arities and argument kinds. UArray is a synonym
// expanded at parse time (UArray a n = PArray (AtomRef a) n).
inline const std::map<std::string, std::vector<Kind>>& tycon_table() {
  static const std::map<std::string, std::vector<Kind>> t = {
      {"Int", {}},
      {"Bool", {}},
      {"Unit", {}},
      {"Ur", {Kind::Star}},
      {"Pair", {Kind::Star, Kind::Star}},
      {"AtomRef", {Kind::Star, Kind::Loc}},
      {"PArray", {Kind::LocToStar, Kind::Loc}},
  };
  return t;
}

// Constraint atoms and their argument kinds. RW is a synonym expanded at
// parse time: RW n = (Read n, Write n).
inline const std::map<std::string, std::vector<Kind>>& atom_table() {
  static const std::map<std::string, std::vector<Kind>> t = {
      {"Read", {Kind::Loc}},
      {"Write", {Kind::Loc}},
      {"Slices", {Kind::Loc, Kind::Loc, Kind::Loc}},
      {"Linearly", {}},
      {"C", {}},
  };
  return t;
}

inline const std::set<std::string>& infix_ops() {
  static const std::set<std::string> ops = {"+", "-", "*", "<", "<=", ">", ">=", "=="};
  return ops;
}

class Parser {
 public:
  explicit Parser(const std::string& src) : toks_(Lexer(src).run()) {}

  SurfaceProgram parse_program() {
    SurfaceProgram p;
    while (!at_eof()) p.bindings.push_back(parse_decl());
    return p;
  }

  Scheme parse_scheme_only() {
    Scheme s = parse_scheme();
    expect_eof();
    return s;
  }

  TypeRef parse_type_only() {
    TypeRef t = parse_type();
    expect_eof();
    return t;
  }

  ExprRef parse_expr_only() {
    ExprRef e = parse_expr();
    expect_eof();
    return e;
  }

 private:
  // --- token plumbing ---
  const Token& peek(size_t n = 0) const {
    size_t i = pos_ + n;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool at_eof() const { return peek().k == Token::K::Eof; }
  bool is_sym(const std::string& s, size_t n = 0) const {
    return peek(n).k == Token::K::Sym && peek(n).text == s;
  }
  bool is_kw(const std::string& s, size_t n = 0) const {
    return peek(n).k == Token::K::Keyword && peek(n).text == s;
  }
  void eat_sym(const std::string& s) {
    if (!is_sym(s)) fail(ErrClass::ParseError, peek().loc, "expected '" + s + "', found '" + peek().text + "'");
    next();
  }
  void eat_kw(const std::string& s) {
    if (!is_kw(s)) fail(ErrClass::ParseError, peek().loc, "expected '" + s + "', found '" + peek().text + "'");
    next();
  }
  std::string eat_ident() {
    if (peek().k != Token::K::Ident)
      fail(ErrClass::ParseError, peek().loc, "expected identifier, found '" + peek().text + "'");
    return next().text;
  }
  std::string eat_ctor() {
    if (peek().k != Token::K::CtorIdent)
      fail(ErrClass::ParseError, peek().loc, "expected constructor, found '" + peek().text + "'");
    return next().text;
  }
  void expect_eof() {
    if (!at_eof()) fail(ErrClass::ParseError, peek().loc, "unexpected '" + peek().text + "'");
  }

  // --- declarations ---
  TopBinding parse_decl() {
    SourceLoc loc = peek().loc;
    std::string name = eat_ident();
    std::optional<Scheme> sig;
    if (is_sym("::")) {
      next();
      sig = parse_scheme();
      eat_sym(";");
      SourceLoc dloc = peek().loc;
      std::string name2 = eat_ident();
      if (name2 != name)
        fail(ErrClass::ParseError, dloc, "signature for '" + name + "' followed by definition of '" + name2 + "'");
    }
    std::vector<std::string> params;
    while (peek().k == Token::K::Ident) params.push_back(next().text);
    eat_sym("=");
    ExprRef body = parse_expr();
    eat_sym(";");
    return TopBinding{name, std::move(sig), std::move(params), std::move(body), loc};
  }

  // --- schemes, constraint specs, types ---
  Scheme parse_scheme() {
    Scheme s;
    if (is_kw("forall")) {
      next();
      while (peek().k == Token::K::Ident) s.binders.push_back(TyBinder{next().text, Kind::Star});
      eat_sym(".");
    }
    size_t save = pos_;
    auto pre = try_parse_assumption_prefix();
    if (pre) {
      s.assumptions = std::move(*pre);
    } else {
      pos_ = save;
    }
    s.body = parse_type();
    infer_kinds(s);
    return s;
  }

  // "cspec =o" or "cspec =>": returns the atoms with multiplicities, or
  // nullopt if the lookahead does not commit to an assumption prefix.
  std::optional<std::vector<SigAtom>> try_parse_assumption_prefix() {
    std::vector<SigAtom> atoms;
    if (is_sym("(")) {
      size_t save = pos_;
      next();
      if (!try_parse_cspec_list(atoms)) {
        pos_ = save;
        return std::nullopt;
      }
      if (!is_sym(")")) {
        pos_ = save;
        return std::nullopt;
      }
      next();
    } else if (peek().k == Token::K::CtorIdent || is_kw("many")) {
      size_t save = pos_;
      if (!try_parse_atomspec(atoms)) {
        pos_ = save;
        return std::nullopt;
      }
    } else {
      return std::nullopt;
    }
    if (is_sym("=o")) {
      next();
      return atoms;
    }
    if (is_sym("=>")) {
      next();
      for (auto& a : atoms) a.mult = Mult::Many;
      return atoms;
    }
    return std::nullopt;
  }

  bool try_parse_cspec_list(std::vector<SigAtom>& out) {
    if (is_sym(")")) return true;  // empty
    if (!try_parse_atomspec(out)) return false;
    while (is_sym(",")) {
      next();
      if (!try_parse_atomspec(out)) return false;
    }
    return true;
  }

  bool try_parse_atomspec(std::vector<SigAtom>& out) {
    Mult m = Mult::One;
    if (is_kw("many")) {
      next();
      m = Mult::Many;
    }
    if (peek().k != Token::K::CtorIdent) return false;
    std::string name = next().text;
    if (name == "RW") {
      // RW n = (Read n, Write n)
      TypeRef arg = parse_atom_type_arg();
      out.push_back(SigAtom{m, Atom{"Read", {arg}}});
      out.push_back(SigAtom{m, Atom{"Write", {arg}}});
      return true;
    }
    auto it = atom_table().find(name);
    if (it == atom_table().end()) return false;  // caller backtracks or reports
    Atom a{name, {}};
    for (size_t i = 0; i < it->second.size(); ++i) a.args.push_back(parse_atom_type_arg());
    out.push_back(SigAtom{m, std::move(a)});
    return true;
  }

  TypeRef parse_atom_type_arg() {
    if (peek().k == Token::K::Ident) return t_var(next().text);
    if (is_sym("(")) {
      next();
      TypeRef t = parse_type();
      eat_sym(")");
      return t;
    }
    if (peek().k == Token::K::CtorIdent) return parse_con_type(/*no_args=*/true);
    fail(ErrClass::ParseError, peek().loc, "expected type argument");
  }

  TypeRef parse_type() {
    if (is_kw("exists")) return parse_package_type();
    ArgTy arg = parse_arg_ty();
    if (is_sym("->") || is_sym("-o")) {
      Mult m = next().text == "-o" ? Mult::One : Mult::Many;
      TypeRef res = parse_type();
      return t_arrow(std::move(arg), m, std::move(res));
    }
    if (!arg.plain())
      fail(ErrClass::ParseError, peek().loc,
           "constrained argument type must be followed by an arrow");
    return arg.body;
  }

  TypeRef parse_package_type() {
    eat_kw("exists");
    std::vector<TyBinder> binders;
    while (peek().k == Token::K::Ident) binders.push_back(TyBinder{next().text, Kind::Star});
    eat_sym(".");
    TypeRef payload = parse_btype();
    eat_sym("*");
    std::vector<SigAtom> atoms;
    if (is_sym("(")) {
      next();
      if (!try_parse_cspec_list(atoms))
        fail(ErrClass::ParseError, peek().loc, "malformed package constraint list");
      eat_sym(")");
    } else {
      if (!try_parse_atomspec(atoms))
        fail(ErrClass::ParseError, peek().loc, "malformed package constraint");
    }
    return t_package(std::move(binders), std::move(payload), std::move(atoms));
  }

  // One argument position: either a suspension "(forall p. Q =o t)" /
  // "(Q => t)", or a plain btype.
  ArgTy parse_arg_ty() {
    if (is_sym("(")) {
      size_t save = pos_;
      next();
      ArgTy susp;
      bool ok = true;
      if (is_kw("forall")) {
        next();
        while (peek().k == Token::K::Ident) susp.binders.push_back(TyBinder{next().text, Kind::Star});
        if (is_sym(".")) next();
        else ok = false;
      }
      if (ok) {
        auto pre = try_parse_assumption_prefix();
        if (pre && !pre->empty()) {
          susp.assumptions = std::move(*pre);
          susp.body = parse_type();
          eat_sym(")");
          return susp;
        }
        ok = false;
      }
      pos_ = save;
    }
    return ArgTy{{}, {}, parse_btype()};
  }

  TypeRef parse_btype() {
    TypeRef head = parse_atype();
    std::vector<TypeRef> args;
    for (;;) {
      if (peek().k == Token::K::Ident || peek().k == Token::K::CtorIdent) {
        args.push_back(parse_atype());
      } else if (is_sym("(")) {
        args.push_back(parse_atype());
      } else {
        break;
      }
    }
    if (args.empty()) return head;
    if (head->k == Type::K::Con) {
      // Arity check against the table (UArray already expanded by parse_atype
      // when applied; a bare application here is the general case).
      return apply_con(head, args);
    }
    return t_apply(head, std::move(args));
  }

  TypeRef apply_con(const TypeRef& head, std::vector<TypeRef>& args) {
    auto it = tycon_table().find(head->con_name);
    if (it == tycon_table().end())
      fail(ErrClass::ParseError, peek().loc, "unknown type constructor '" + head->con_name + "'");
    std::vector<TypeRef> all = head->con_args;
    all.insert(all.end(), args.begin(), args.end());
    if (all.size() != it->second.size())
      fail(ErrClass::ParseError, peek().loc,
           "type constructor '" + head->con_name + "' expects " +
               std::to_string(it->second.size()) + " arguments, got " + std::to_string(all.size()));
    return t_con(head->con_name, std::move(all));
  }

  TypeRef parse_atype() {
    if (peek().k == Token::K::Ident) return t_var(next().text);
    if (peek().k == Token::K::CtorIdent) return parse_con_type(false);
    if (is_sym("(")) {
      next();
      if (is_sym(")")) {
        next();
        return t_unit();
      }
      TypeRef t = parse_type();
      if (is_sym(",")) {
        next();
        TypeRef u = parse_type();
        eat_sym(")");
        return t_pair(std::move(t), std::move(u));
      }
      eat_sym(")");
      return t;
    }
    fail(ErrClass::ParseError, peek().loc, "expected type, found '" + peek().text + "'");
  }

  // A constructor possibly applied to atypes. With no_args, only the bare
  // (nullary) constructor is consumed.
  TypeRef parse_con_type(bool no_args) {
    SourceLoc loc = peek().loc;
    std::string name = eat_ctor();
    std::vector<TypeRef> args;
    auto arity = [&](const std::string& n) -> size_t {
      if (n == "UArray") return 2;
      auto it = tycon_table().find(n);
      if (it == tycon_table().end())
        fail(ErrClass::ParseError, loc, "unknown type constructor '" + n + "'");
      return it->second.size();
    };
    size_t want = arity(name);
    if (!no_args) {
      while (args.size() < want &&
             (peek().k == Token::K::Ident || peek().k == Token::K::CtorIdent || is_sym("(")))
        args.push_back(parse_atype());
    }
    if (args.size() != want)
      fail(ErrClass::ParseError, loc, "type constructor '" + name + "' expects " +
                                          std::to_string(want) + " arguments, got " +
                                          std::to_string(args.size()));
    if (name == "UArray") return t_con("PArray", {t_con("AtomRef", {args[0]}), args[1]});
    return t_con(name, std::move(args));
  }

  // --- kind assignment for scheme binders (explicit ones only; implicit
  //     quantification is closed later by the oracle, reusing this walk) ---
  void infer_kinds(Scheme& s) {
    std::map<std::string, Kind> kinds;
    collect_kinds_sig_atoms(s.assumptions, kinds);
    collect_kinds(s.body, kinds);
    for (auto& b : s.binders) {
      auto it = kinds.find(b.name);
      if (it != kinds.end()) b.kind = it->second;
    }
  }

 public:
  static void collect_kinds(const TypeRef& t, std::map<std::string, Kind>& kinds) {
    switch (t->k) {
      case Type::K::Var:
      case Type::K::Meta:
        return;
      case Type::K::Con: {
        auto it = tycon_table().find(t->con_name);
        for (size_t i = 0; i < t->con_args.size(); ++i) {
          if (it != tycon_table().end() && i < it->second.size())
            note_kind(t->con_args[i], it->second[i], kinds);
          collect_kinds(t->con_args[i], kinds);
        }
        return;
      }
      case Type::K::Arrow:
        collect_kinds_sig_atoms(t->arrow_arg.assumptions, kinds);
        collect_kinds(t->arrow_arg.body, kinds);
        collect_kinds(t->arrow_res, kinds);
        return;
      case Type::K::Package:
        collect_kinds_sig_atoms(t->pkg_atoms, kinds);
        collect_kinds(t->pkg_payload, kinds);
        return;
      case Type::K::AppV:
        // A var applied to a Location is Location -> Type.
        note_kind(t->appv_head, Kind::LocToStar, kinds);
        for (auto& a : t->appv_args) note_kind(a, Kind::Loc, kinds);
        for (auto& a : t->appv_args) collect_kinds(a, kinds);
        return;
    }
  }

  static void collect_kinds_sig_atoms(const std::vector<SigAtom>& atoms,
                                      std::map<std::string, Kind>& kinds) {
    for (auto& sa : atoms) {
      auto it = atom_table().find(sa.atom.name);
      for (size_t i = 0; i < sa.atom.args.size(); ++i) {
        if (it != atom_table().end() && i < it->second.size())
          note_kind(sa.atom.args[i], it->second[i], kinds);
        collect_kinds(sa.atom.args[i], kinds);
      }
    }
  }

  static void note_kind(const TypeRef& t, Kind k, std::map<std::string, Kind>& kinds) {
    if (t->k != Type::K::Var || t->skolem_id != 0) return;
    auto [it, fresh] = kinds.emplace(t->var_name, k);
    if (!fresh && it->second != k && k != Kind::Star)
      it->second = k;  // Loc / LocToStar evidence wins over the Star default
  }

 private:
  // --- expressions ---
  ExprRef parse_expr() {
    SourceLoc loc = peek().loc;
    if (is_sym("\\")) return parse_lambda();
    if (is_kw("let") || is_kw("letw")) return parse_let();
    if (is_kw("case") || is_kw("casew")) return parse_case();
    if (is_kw("if")) {
      next();
      auto e = mk_expr(Expr::K::If, loc);
      e->if_cond = parse_expr();
      eat_kw("then");
      e->if_then = parse_expr();
      eat_kw("else");
      e->if_else = parse_expr();
      return e;
    }
    if (is_kw("pack")) {
      next();
      auto e = mk_expr(Expr::K::Pack, loc);
      e->pack_payload = parse_aexpr();
      return e;
    }
    return parse_opexpr();
  }

  ExprRef parse_lambda() {
    SourceLoc loc = peek().loc;
    eat_sym("\\");
    std::vector<std::string> binders;
    while (peek().k == Token::K::Ident) binders.push_back(next().text);
    if (binders.empty()) fail(ErrClass::ParseError, peek().loc, "lambda needs a binder");
    eat_sym("->");
    ExprRef body = parse_expr();
    for (auto it = binders.rbegin(); it != binders.rend(); ++it) {
      auto e = mk_expr(Expr::K::Lam, loc);
      e->lam_binder = *it;
      e->lam_body = body;
      body = e;
    }
    return body;
  }

  ExprRef parse_let() {
    SourceLoc loc = peek().loc;
    Mult m = next().text == "letw" ? Mult::Many : Mult::One;
    if (is_kw("pack")) {
      if (m == Mult::Many) fail(ErrClass::ParseError, loc, "'letw pack' is not a form; use 'let pack'");
      next();
      auto e = mk_expr(Expr::K::LetPack, loc);
      e->lp_pat = parse_pack_pat();
      eat_sym("=");
      e->lp_rhs = parse_expr();
      eat_kw("in");
      e->lp_body = parse_expr();
      return e;
    }
    // Constructor-pattern let is sugar for a case with the same multiplicity:
    // let () = e in b / let (x, y) = e in b / let Ur x = e in b.
    if (is_sym("(") || peek().k == Token::K::CtorIdent) {
      CaseBranch br = parse_con_pattern();
      eat_sym("=");
      ExprRef rhs = parse_expr();
      eat_kw("in");
      br.body = parse_expr();
      auto e = mk_expr(Expr::K::Case, loc);
      e->case_mult = m;
      e->case_scrut = rhs;
      e->branches = {std::move(br)};
      return e;
    }
    auto e = mk_expr(Expr::K::Let, loc);
    e->let_mult = m;
    e->let_name = eat_ident();
    if (is_sym("::")) {
      next();
      e->let_sig = parse_scheme();
    }
    eat_sym("=");
    e->let_rhs = parse_expr();
    eat_kw("in");
    e->let_body = parse_expr();
    return e;
  }

  PackPat parse_pack_pat() {
    PackPat p;
    // Leading "a b ." binds the package's type variables.
    if (peek().k == Token::K::Ident) {
      size_t n = 0;
      while (peek(n).k == Token::K::Ident) ++n;
      if (is_sym(".", n)) {
        while (peek().k == Token::K::Ident) p.tyvars.push_back(next().text);
        eat_sym(".");
      }
    }
    if (peek().k == Token::K::Ident) {
      p.name = next().text;
      return p;
    }
    p.is_con = true;
    if (is_sym("(")) {
      next();
      if (is_sym(")")) {
        next();
        p.name = "Unit";
        return p;
      }
      if (peek().k == Token::K::Ident) {
        // pack (x, y): bare tuple = pair constructor
        p.name = "Pair";
        PackPatArg a;
        a.vars.push_back(eat_ident());
        eat_sym(",");
        PackPatArg b;
        b.vars.push_back(eat_ident());
        eat_sym(")");
        p.con_args = {std::move(a), std::move(b)};
        return p;
      }
      p.name = eat_ctor();
      while (!is_sym(")")) p.con_args.push_back(parse_pack_pat_arg());
      next();
      return p;
    }
    p.name = eat_ctor();
    while (peek().k == Token::K::Ident) {
      PackPatArg a;
      a.vars.push_back(next().text);
      p.con_args.push_back(std::move(a));
    }
    return p;
  }

  PackPatArg parse_pack_pat_arg() {
    PackPatArg a;
    if (peek().k == Token::K::Ident) {
      a.vars.push_back(next().text);
      return a;
    }
    eat_sym("(");
    a.tuple = true;
    a.vars.push_back(eat_ident());
    while (is_sym(",")) {
      next();
      a.vars.push_back(eat_ident());
    }
    eat_sym(")");
    return a;
  }

  CaseBranch parse_con_pattern() {
    CaseBranch br;
    if (is_sym("(")) {
      next();
      if (is_sym(")")) {
        next();
        br.ctor = "Unit";
        return br;
      }
      br.ctor = "Pair";
      br.binders.push_back(eat_ident());
      eat_sym(",");
      br.binders.push_back(eat_ident());
      eat_sym(")");
      return br;
    }
    br.ctor = eat_ctor();
    while (peek().k == Token::K::Ident) br.binders.push_back(next().text);
    return br;
  }

  ExprRef parse_case() {
    SourceLoc loc = peek().loc;
    Mult m = next().text == "casew" ? Mult::Many : Mult::One;
    auto e = mk_expr(Expr::K::Case, loc);
    e->case_mult = m;
    e->case_scrut = parse_expr();
    eat_kw("of");
    eat_sym("{");
    for (;;) {
      CaseBranch br = parse_con_pattern();
      eat_sym("->");
      br.body = parse_expr();
      e->branches.push_back(std::move(br));
      if (is_sym(";")) {
        next();
        if (is_sym("}")) break;
        continue;
      }
      break;
    }
    eat_sym("}");
    if (e->branches.empty()) fail(ErrClass::ParseError, loc, "empty case");
    return e;
  }

  ExprRef parse_opexpr() {
    ExprRef lhs = parse_addexpr();
    if (is_sym("<") || is_sym("<=") || is_sym(">") || is_sym(">=") || is_sym("==")) {
      SourceLoc loc = peek().loc;
      std::string op = next().text;
      ExprRef rhs = parse_addexpr();
      return e_app(e_app(e_var(op, loc), lhs, loc), rhs, loc);
    }
    return lhs;
  }

  ExprRef parse_addexpr() {
    ExprRef lhs = parse_mulexpr();
    while (is_sym("+") || is_sym("-")) {
      SourceLoc loc = peek().loc;
      std::string op = next().text;
      ExprRef rhs = parse_mulexpr();
      lhs = e_app(e_app(e_var(op, loc), lhs, loc), rhs, loc);
    }
    return lhs;
  }

  ExprRef parse_mulexpr() {
    ExprRef lhs = parse_appexpr();
    while (is_sym("*")) {
      SourceLoc loc = peek().loc;
      next();
      ExprRef rhs = parse_appexpr();
      lhs = e_app(e_app(e_var("*", loc), lhs, loc), rhs, loc);
    }
    return lhs;
  }

  ExprRef parse_appexpr() {
    ExprRef f = parse_aexpr();
    for (;;) {
      if (peek().k == Token::K::Ident || peek().k == Token::K::CtorIdent ||
          peek().k == Token::K::Int || is_sym("(")) {
        SourceLoc loc = peek().loc;
        f = e_app(f, parse_aexpr(), loc);
      } else if (is_kw("pack")) {
        // "f pack e" would be ambiguous; require parentheses.
        fail(ErrClass::ParseError, peek().loc, "parenthesise 'pack' in argument position");
      } else {
        break;
      }
    }
    return f;
  }

  ExprRef parse_aexpr() {
    SourceLoc loc = peek().loc;
    if (peek().k == Token::K::Ident) return e_var(next().text, loc);
    if (peek().k == Token::K::CtorIdent) return e_ctor(next().text, loc);
    if (peek().k == Token::K::Int) return e_lit(next().value, loc);
    if (is_sym("(")) {
      next();
      if (is_sym(")")) {
        next();
        return e_ctor("Unit", loc);
      }
      ExprRef e = parse_expr();
      if (is_sym(",")) {
        next();
        ExprRef f = parse_expr();
        eat_sym(")");
        return e_app(e_app(e_ctor("Pair", loc), e, loc), f, loc);
      }
      eat_sym(")");
      return e;
    }
    fail(ErrClass::ParseError, loc, "expected expression, found '" + peek().text + "'");
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
};

inline SurfaceProgram parse(const std::string& src) { return Parser(src).parse_program(); }
inline Scheme parse_scheme_text(const std::string& src) { return Parser(src).parse_scheme_only(); }
inline TypeRef parse_type_text(const std::string& src) { return Parser(src).parse_type_only(); }

} // namespace lqc
