#pragma once

#include <string>

#include "lqc/ast.hpp"
#include "lqc/parser.hpp"

namespace lqc {

// ---------------------------------------------------------------------------
// Pretty-printing. parse(pretty(p)) is structurally equal to p; that is the
// tested contract (sugar like "if" prints back as written).
// ---------------------------------------------------------------------------

namespace detail {

inline bool is_infix_app(const ExprRef& e, std::string& op, ExprRef& a, ExprRef& b) {
  if (e->k != Expr::K::App) return false;
  const ExprRef& f = e->fn;
  if (f->k != Expr::K::App) return false;
  if (f->fn->k != Expr::K::Var) return false;
  if (!infix_ops().count(f->fn->name)) return false;
  op = f->fn->name;
  a = f->arg;
  b = e->arg;
  return true;
}

inline bool is_pair_app(const ExprRef& e, ExprRef& a, ExprRef& b) {
  if (e->k != Expr::K::App) return false;
  const ExprRef& f = e->fn;
  if (f->k != Expr::K::App) return false;
  if (f->fn->k != Expr::K::Ctor || f->fn->name != "Pair") return false;
  a = f->arg;
  b = e->arg;
  return true;
}

inline int op_prec(const std::string& op) {
  if (op == "*") return 5;
  if (op == "+" || op == "-") return 4;
  return 3;  // comparisons
}

// prec levels: 0 statement-like, 3..5 operators, 10 application, 11 atom.
inline std::string pp(const ExprRef& e, int prec, int indent);

inline std::string ind(int n) { return std::string(static_cast<size_t>(n) * 2, ' '); }

inline std::string paren_if(bool b, const std::string& s) { return b ? "(" + s + ")" : s; }

inline std::string pp_branch(const CaseBranch& br, int indent) {
  std::string r;
  if (br.ctor == "Unit")
    r = "()";
  else if (br.ctor == "Pair")
    r = "(" + br.binders[0] + ", " + br.binders[1] + ")";
  else {
    r = br.ctor;
    for (auto& b : br.binders) r += " " + b;
  }
  return r + " -> " + pp(br.body, 0, indent + 1);
}

inline std::string pp_pack_pat(const PackPat& p) {
  std::string r;
  for (auto& v : p.tyvars) r += v + " ";
  if (!p.tyvars.empty()) r += ". ";
  if (!p.is_con) return r + p.name;
  if (p.name == "Unit" && p.con_args.empty()) return r + "()";
  if (p.name == "Pair" && p.con_args.size() == 2 && !p.con_args[0].tuple && !p.con_args[1].tuple)
    return r + "(" + p.con_args[0].vars[0] + ", " + p.con_args[1].vars[0] + ")";
  std::string c = p.name;
  for (auto& a : p.con_args) {
    c += " ";
    if (a.tuple) {
      c += "(";
      for (size_t i = 0; i < a.vars.size(); ++i) {
        if (i) c += ", ";
        c += a.vars[i];
      }
      c += ")";
    } else {
      c += a.vars[0];
    }
  }
  if (!p.con_args.empty()) return r + "(" + c + ")";
  return r + c;
}

inline std::string pp(const ExprRef& e, int prec, int indent) {
  switch (e->k) {
    case Expr::K::Var:
      return e->name;
    case Expr::K::Ctor:
      return e->name == "Unit" ? "()" : e->name;
    case Expr::K::Lit:
      return std::to_string(e->lit);
    case Expr::K::App: {
      std::string op;
      ExprRef a, b;
      if (is_pair_app(e, a, b)) return "(" + pp(a, 0, indent) + ", " + pp(b, 0, indent) + ")";
      if (is_infix_app(e, op, a, b)) {
        int p = op_prec(op);
        return paren_if(prec > p, pp(a, p + (op == "<" || op == "<=" || op == ">" || op == ">=" ||
                                                     op == "==" ? 1 : 0), indent) +
                                      " " + op + " " + pp(b, p + 1, indent));
      }
      return paren_if(prec > 10, pp(e->fn, 10, indent) + " " + pp(e->arg, 11, indent));
    }
    case Expr::K::Lam:
      return paren_if(prec > 0,
                      "\\" + e->lam_binder + " -> " + pp(e->lam_body, 0, indent));
    case Expr::K::Pack:
      return paren_if(prec > 10, "pack " + pp(e->pack_payload, 11, indent));
    case Expr::K::LetPack: {
      std::string r = "let pack " + pp_pack_pat(e->lp_pat) + " = " + pp(e->lp_rhs, 0, indent) +
                      " in\n" + ind(indent) + pp(e->lp_body, 0, indent);
      return paren_if(prec > 0, r);
    }
    case Expr::K::Let: {
      std::string r = e->let_mult == Mult::One ? "let " : "letw ";
      r += e->let_name;
      if (e->let_sig) r += " :: " + show_scheme(*e->let_sig);
      r += " = " + pp(e->let_rhs, 0, indent) + " in\n" + ind(indent) + pp(e->let_body, 0, indent);
      return paren_if(prec > 0, r);
    }
    case Expr::K::Case: {
      std::string r = e->case_mult == Mult::One ? "case " : "casew ";
      r += pp(e->case_scrut, 1, indent) + " of {";
      for (size_t i = 0; i < e->branches.size(); ++i) {
        if (i) r += ";";
        r += " " + pp_branch(e->branches[i], indent);
      }
      r += " }";
      return paren_if(prec > 0, r);
    }
    case Expr::K::If: {
      std::string r = "if " + pp(e->if_cond, 1, indent) + "\n" + ind(indent + 1) + "then " +
                      pp(e->if_then, 1, indent + 1) + "\n" + ind(indent + 1) + "else " +
                      pp(e->if_else, 1, indent + 1);
      return paren_if(prec > 0, r);
    }
  }
  return "?";
}

} // namespace detail

inline std::string pretty_expr(const ExprRef& e) { return detail::pp(e, 0, 0); }

inline std::string pretty(const SurfaceProgram& p) {
  std::string out;
  for (auto& b : p.bindings) {
    if (b.sig) out += b.name + " :: " + show_scheme(*b.sig) + ";\n";
    out += b.name;
    for (auto& x : b.params) out += " " + x;
    out += " =\n  " + detail::pp(b.body, 0, 1) + ";\n\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structural equality, the oracle for the round-trip property.
// ---------------------------------------------------------------------------

inline bool scheme_eq(const Scheme& a, const Scheme& b) {
  if (a.binders.size() != b.binders.size()) return false;
  for (size_t i = 0; i < a.binders.size(); ++i)
    if (a.binders[i].name != b.binders[i].name) return false;
  if (a.assumptions.size() != b.assumptions.size()) return false;
  for (size_t i = 0; i < a.assumptions.size(); ++i)
    if (sig_atom_cmp(a.assumptions[i], b.assumptions[i]) != 0) return false;
  return type_eq(a.body, b.body);
}

inline bool expr_eq(const ExprRef& a, const ExprRef& b) {
  if (a->k != b->k) return false;
  switch (a->k) {
    case Expr::K::Var:
    case Expr::K::Ctor:
      return a->name == b->name;
    case Expr::K::Lit:
      return a->lit == b->lit;
    case Expr::K::App:
      return expr_eq(a->fn, b->fn) && expr_eq(a->arg, b->arg);
    case Expr::K::Lam:
      return a->lam_binder == b->lam_binder && expr_eq(a->lam_body, b->lam_body);
    case Expr::K::Pack:
      return expr_eq(a->pack_payload, b->pack_payload);
    case Expr::K::LetPack: {
      const PackPat &p = a->lp_pat, &q = b->lp_pat;
      if (p.tyvars != q.tyvars || p.is_con != q.is_con || p.name != q.name) return false;
      if (p.con_args.size() != q.con_args.size()) return false;
      for (size_t i = 0; i < p.con_args.size(); ++i)
        if (p.con_args[i].tuple != q.con_args[i].tuple || p.con_args[i].vars != q.con_args[i].vars)
          return false;
      return expr_eq(a->lp_rhs, b->lp_rhs) && expr_eq(a->lp_body, b->lp_body);
    }
    case Expr::K::Let: {
      if (a->let_mult != b->let_mult || a->let_name != b->let_name) return false;
      if (a->let_sig.has_value() != b->let_sig.has_value()) return false;
      if (a->let_sig && !scheme_eq(*a->let_sig, *b->let_sig)) return false;
      return expr_eq(a->let_rhs, b->let_rhs) && expr_eq(a->let_body, b->let_body);
    }
    case Expr::K::Case: {
      if (a->case_mult != b->case_mult) return false;
      if (!expr_eq(a->case_scrut, b->case_scrut)) return false;
      if (a->branches.size() != b->branches.size()) return false;
      for (size_t i = 0; i < a->branches.size(); ++i) {
        if (a->branches[i].ctor != b->branches[i].ctor) return false;
        if (a->branches[i].binders != b->branches[i].binders) return false;
        if (!expr_eq(a->branches[i].body, b->branches[i].body)) return false;
      }
      return true;
    }
    case Expr::K::If:
      return expr_eq(a->if_cond, b->if_cond) && expr_eq(a->if_then, b->if_then) &&
             expr_eq(a->if_else, b->if_else);
  }
  return false;
}

inline bool program_eq(const SurfaceProgram& a, const SurfaceProgram& b) {
  if (a.bindings.size() != b.bindings.size()) return false;
  for (size_t i = 0; i < a.bindings.size(); ++i) {
    const TopBinding &x = a.bindings[i], &y = b.bindings[i];
    if (x.name != y.name || x.params != y.params) return false;
    if (x.sig.has_value() != y.sig.has_value()) return false;
    if (x.sig && !scheme_eq(*x.sig, *y.sig)) return false;
    if (!expr_eq(x.body, y.body)) return false;
  }
  return true;
}

} // namespace lqc
