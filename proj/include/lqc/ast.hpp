#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lqc/type.hpp"

namespace lqc {

struct SourceLoc {
  int line = 0;
  int col = 0;
};

// Pack patterns nest at most: pack -> constructor -> tuple of variables.
// An argument of a constructor pattern is a single variable or a tuple of
// variables ("_" is a wildcard binder).
struct PackPatArg {
  bool tuple = false;
  std::vector<std::string> vars;  // one entry unless tuple
};

struct PackPat {
  std::vector<std::string> tyvars;  // skolem names bound by the unpack
  bool is_con = false;
  std::string name;                 // variable name, or constructor name
  std::vector<PackPatArg> con_args;
};

struct Expr;
using ExprRef = std::shared_ptr<const Expr>;

struct CaseBranch {
  std::string ctor;                  // "Pair", "Ur", "True", "False", "Unit"
  std::vector<std::string> binders;  // flat variables, "_" allowed
  ExprRef body;
};

struct Expr {
  enum class K : uint8_t {
    Var, Ctor, Lam, App, Pack, LetPack, Let, Case, If, Lit
  };
  K k = K::Var;
  SourceLoc loc;

  std::string name;  // Var / Ctor

  std::string lam_binder;  // Lam
  ExprRef lam_body;

  ExprRef fn, arg;  // App

  ExprRef pack_payload;  // Pack

  PackPat lp_pat;       // LetPack
  ExprRef lp_rhs, lp_body;

  Mult let_mult = Mult::One;  // Let
  std::string let_name;
  std::optional<Scheme> let_sig;
  ExprRef let_rhs, let_body;

  Mult case_mult = Mult::One;  // Case
  ExprRef case_scrut;
  std::vector<CaseBranch> branches;

  ExprRef if_cond, if_then, if_else;  // If

  long long lit = 0;  // Lit
};

inline std::shared_ptr<Expr> mk_expr(Expr::K k, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->k = k;
  e->loc = loc;
  return e;
}

inline ExprRef e_var(std::string n, SourceLoc loc = {}) {
  auto e = mk_expr(Expr::K::Var, loc);
  e->name = std::move(n);
  return e;
}

inline ExprRef e_ctor(std::string n, SourceLoc loc = {}) {
  auto e = mk_expr(Expr::K::Ctor, loc);
  e->name = std::move(n);
  return e;
}

inline ExprRef e_app(ExprRef f, ExprRef a, SourceLoc loc = {}) {
  auto e = mk_expr(Expr::K::App, loc);
  e->fn = std::move(f);
  e->arg = std::move(a);
  return e;
}

inline ExprRef e_lit(long long v, SourceLoc loc = {}) {
  auto e = mk_expr(Expr::K::Lit, loc);
  e->lit = v;
  return e;
}

struct TopBinding {
  std::string name;
  std::optional<Scheme> sig;
  std::vector<std::string> params;  // sugar: f x y = e
  ExprRef body;
  SourceLoc loc;
};

struct SurfaceProgram {
  std::vector<TopBinding> bindings;
};

} // namespace lqc
