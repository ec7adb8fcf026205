#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lqc/derivation.hpp"
#include "lqc/diag.hpp"
#include "lqc/prelude.hpp"
#include "lqc/unify.hpp"

namespace lqc {

// ---------------------------------------------------------------------------
// The type oracle: produces constraint-free typing derivations with the
// instantiations and multiplicity annotations later consumed by constraint
// generation. Bidirectional: signatures and argument types push expected
// types inward; unification solves monotype instantiation only.
// ---------------------------------------------------------------------------

namespace oracle_detail {

struct EnvEntry {
  std::string id;
  Mult bind_mult = Mult::Many;
  Scheme scheme;
  EvCall evcall = EvCall::None;
  BuiltinImpl impl = BuiltinImpl::Runtime;  // meaningful for prelude names
  bool is_prelude = false;
};

struct Env {
  std::map<std::string, EnvEntry> vars;
  std::map<std::string, TypeRef> skolems;  // scoped type variables
};

// Free type variables of a scheme that are neither bound by the scheme nor
// by inner binders, in order of first appearance.
inline void free_vars_type(const TypeRef& t, std::set<std::string>& bound,
                           std::vector<std::string>& out);

inline void note_free(const std::string& n, std::set<std::string>& bound,
                      std::vector<std::string>& out) {
  if (bound.count(n)) return;
  for (auto& x : out)
    if (x == n) return;
  out.push_back(n);
}

inline void free_vars_atoms(const std::vector<SigAtom>& atoms, std::set<std::string>& bound,
                            std::vector<std::string>& out) {
  for (auto& a : atoms)
    for (auto& x : a.atom.args) free_vars_type(x, bound, out);
}

inline void free_vars_type(const TypeRef& t, std::set<std::string>& bound,
                           std::vector<std::string>& out) {
  switch (t->k) {
    case Type::K::Var:
      if (t->skolem_id == 0) note_free(t->var_name, bound, out);
      return;
    case Type::K::Meta:
      return;
    case Type::K::Con:
      for (auto& a : t->con_args) free_vars_type(a, bound, out);
      return;
    case Type::K::Arrow: {
      std::set<std::string> inner = bound;
      for (auto& b : t->arrow_arg.binders) inner.insert(b.name);
      free_vars_atoms(t->arrow_arg.assumptions, inner, out);
      free_vars_type(t->arrow_arg.body, inner, out);
      free_vars_type(t->arrow_res, bound, out);
      return;
    }
    case Type::K::Package: {
      std::set<std::string> inner = bound;
      for (auto& b : t->pkg_binders) inner.insert(b.name);
      free_vars_atoms(t->pkg_atoms, inner, out);
      free_vars_type(t->pkg_payload, inner, out);
      return;
    }
    case Type::K::AppV:
      free_vars_type(t->appv_head, bound, out);
      for (auto& a : t->appv_args) free_vars_type(a, bound, out);
      return;
  }
}

} // namespace oracle_detail

class Oracle {
 public:
  explicit Oracle(const SignatureTable& sigs) : sigs_(sigs) {}

  std::vector<TopDeriv> run(const SurfaceProgram& prog) {
    std::vector<TopDeriv> out;
    for (auto& b : prog.bindings) out.push_back(check_binding(b));
    return out;
  }

  InferCtx& ctx() { return ctx_; }

 private:
  using Env = oracle_detail::Env;
  using EnvEntry = oracle_detail::EnvEntry;

  // Close a parsed scheme: resolve free variables against lexically scoped
  // skolems, implicitly quantify the rest, and assign kinds.
  Scheme close_scheme(const Scheme& parsed, const Env& env, SourceLoc loc) {
    std::set<std::string> bound;
    for (auto& b : parsed.binders) bound.insert(b.name);
    std::vector<std::string> free;
    oracle_detail::free_vars_atoms(parsed.assumptions, bound, free);
    oracle_detail::free_vars_type(parsed.body, bound, free);

    Scheme s = parsed;
    TypeSubst scoped;
    std::map<std::string, Kind> kinds;
    Parser::collect_kinds_sig_atoms(parsed.assumptions, kinds);
    Parser::collect_kinds(parsed.body, kinds);
    for (auto& v : free) {
      auto it = env.skolems.find(v);
      if (it != env.skolems.end()) {
        scoped[v] = it->second;
      } else {
        Kind k = kinds.count(v) ? kinds[v] : Kind::Star;
        s.binders.push_back(TyBinder{v, k});
      }
    }
    for (auto& b : s.binders)
      if (kinds.count(b.name) && b.kind == Kind::Star) b.kind = kinds[b.name];
    if (!scoped.empty()) {
      s.assumptions = subst_sig_atoms(s.assumptions, scoped);
      s.body = subst_type(s.body, scoped);
    }
    (void)loc;
    return s;
  }

  struct Skolemized {
    std::vector<TypeRef> skolems;
    std::vector<SigAtom> atoms;
    TypeRef body;
    TypeSubst subst;
  };

  Skolemized skolemize(const Scheme& s) {
    Skolemized r;
    for (auto& b : s.binders) {
      TypeRef sk = ctx_.fresh_skolem(b.name, b.kind);
      r.subst[b.name] = sk;
      r.skolems.push_back(sk);
    }
    r.atoms = subst_sig_atoms(s.assumptions, r.subst);
    r.body = subst_type(s.body, r.subst);
    return r;
  }

  TopDeriv check_binding(const TopBinding& b) {
    bool is_main = b.name == "main";
    if (!b.sig && !is_main)
      fail(ErrClass::MissingSignature, b.loc,
           "top-level binding '" + b.name + "' needs a type signature");

    Env env;
    env.vars = globals_;

    TopDeriv top;
    top.name = b.name;
    top.is_main = is_main;
    top.loc = b.loc;

    DerivRef body;
    if (b.sig) {
      Scheme scheme = close_scheme(*b.sig, env, b.loc);
      if (is_main && !scheme.assumptions.empty())
        fail(ErrClass::MissingSignature, b.loc, "'main' cannot carry constraint assumptions");
      top.scheme = scheme;
      ctx_.push_level();
      Skolemized sk = skolemize(scheme);
      top.sig_skolems = sk.skolems;
      top.sig_atoms = sk.atoms;
      for (size_t i = 0; i < scheme.binders.size(); ++i)
        env.skolems[scheme.binders[i].name] = sk.skolems[i];
      // The binding sees itself at multiplicity w (recursion).
      EnvEntry self;
      self.id = "global:" + b.name;
      self.bind_mult = Mult::Many;
      self.scheme = scheme;
      self.evcall = EvCall::Tuple;
      env.vars[b.name] = self;
      body = check_params(env, b, sk.body);
      ctx_.pop_level();
    } else {
      if (!b.params.empty())
        fail(ErrClass::MissingSignature, b.loc, "'main' takes no parameters");
      auto [d, ty] = infer(env, b.body);
      body = d;
      top.scheme = Scheme{{}, {}, ty};
    }

    zonk_deriv(body, b.name);
    top.scheme.body = ctx_.zonk(top.scheme.body);
    top.body = body;

    if (!is_main) {
      EnvEntry g;
      g.id = "global:" + b.name;
      g.bind_mult = Mult::Many;
      g.scheme = top.scheme;
      g.evcall = EvCall::Tuple;
      globals_[b.name] = g;
    }
    return top;
  }

  // Peel "f x y = e" parameters against the signature's arrows.
  DerivRef check_params(Env env, const TopBinding& b, TypeRef expected) {
    if (b.params.empty()) return check(env, b.body, expected);
    TypeRef t = ctx_.zonk(expected);
    if (t->k != Type::K::Arrow)
      fail(ErrClass::UnificationFailure, b.loc,
           "binding '" + b.name + "' has more parameters than its signature has arrows");
    const std::string& p = b.params.front();
    DerivRef d = mk_deriv(Deriv::K::Abs, b.loc);
    d->abs_binder_name = p;
    d->abs_binder_id = bind_param(env, p, t->arrow_arg, t->arrow_mult);
    d->abs_arg = t->arrow_arg;
    d->abs_mult = t->arrow_mult;
    TopBinding rest = b;
    rest.params.erase(rest.params.begin());
    d->abs_body = check_params(env, rest, t->arrow_res);
    d->type = t;
    return d;
  }

  std::string bind_param(Env& env, const std::string& name, const ArgTy& arg, Mult m) {
    EnvEntry e;
    e.id = fresh_id(name);
    e.bind_mult = m;
    if (arg.plain()) {
      e.scheme = Scheme{{}, {}, arg.body};
      e.evcall = EvCall::None;
    } else {
      e.scheme = Scheme{arg.binders, arg.assumptions, arg.body};
      e.evcall = EvCall::Tuple;
    }
    if (name != "_") env.vars[name] = e;
    return e.id;
  }

  std::string fresh_id(const std::string& name) {
    return name + "$" + std::to_string(++binder_counter_);
  }

  // --- variable occurrences ---

  DerivRef var_occurrence(const Env& env, const std::string& name, SourceLoc loc, bool is_ctor) {
    const EnvEntry* entry = nullptr;
    EnvEntry prel;
    auto it = env.vars.find(name);
    if (it != env.vars.end() && !is_ctor) {
      entry = &it->second;
    } else {
      const PreludeEntry* p = sigs_.find(name);
      if (!p) fail(ErrClass::UnboundVariable, loc, "variable '" + name + "' is not in scope");
      if (is_ctor != (p->impl == BuiltinImpl::Ctor) && is_ctor)
        fail(ErrClass::UnboundVariable, loc, "'" + name + "' is not a data constructor");
      prel.id = "global:" + name;
      prel.scheme = p->scheme;
      prel.impl = p->impl;
      prel.is_prelude = true;
      prel.evcall = (p->impl != BuiltinImpl::Ctor && !p->scheme.assumptions.empty())
                        ? EvCall::Tuple
                        : EvCall::None;
      entry = &prel;
    }

    DerivRef d = mk_deriv(Deriv::K::Var, loc);
    d->var_id = entry->id;
    d->var_name = name;
    d->var_evcall = entry->evcall;
    d->var_binders = entry->scheme.binders;
    TypeSubst inst;
    for (auto& bnd : entry->scheme.binders) {
      TypeRef m = ctx_.fresh_meta();
      inst[bnd.name] = m;
      d->var_inst.push_back(m);
    }
    d->var_atoms = subst_sig_atoms(entry->scheme.assumptions, inst);
    d->type = subst_type(entry->scheme.body, inst);
    return d;
  }

  // --- bidirectional checking ---

  DerivRef check(Env env, const ExprRef& e, const TypeRef& expected) {
    switch (e->k) {
      case Expr::K::Lam: {
        TypeRef t = ctx_.zonk(expected);
        if (t->k != Type::K::Arrow)
          fail(ErrClass::UnificationFailure, e->loc,
               "lambda checked against non-arrow type '" + show_type(t) + "'");
        DerivRef d = mk_deriv(Deriv::K::Abs, e->loc);
        d->abs_binder_name = e->lam_binder;
        d->abs_binder_id = bind_param(env, e->lam_binder, t->arrow_arg, t->arrow_mult);
        d->abs_arg = t->arrow_arg;
        d->abs_mult = t->arrow_mult;
        d->abs_body = check(env, e->lam_body, t->arrow_res);
        d->type = t;
        return d;
      }
      case Expr::K::Pack: {
        TypeRef t = ctx_.zonk(expected);
        if (t->k == Type::K::Meta)
          fail(ErrClass::AmbiguousInstantiation, e->loc,
               "'pack' requires an expected existential package type");
        if (t->k != Type::K::Package)
          fail(ErrClass::UnificationFailure, e->loc,
               "'pack' checked against non-package type '" + show_type(t) + "'");
        DerivRef d = mk_deriv(Deriv::K::Pack, e->loc);
        TypeSubst wit;
        for (auto& b : t->pkg_binders) {
          TypeRef m = ctx_.fresh_meta();
          wit[b.name] = m;
          d->pack_witness.push_back(m);
        }
        d->pack_payload = check(env, e->pack_payload, subst_type(t->pkg_payload, wit));
        d->pack_atoms = subst_sig_atoms(t->pkg_atoms, wit);
        d->pack_pkg_type = t;
        d->type = t;
        return d;
      }
      case Expr::K::LetPack:
        return check_let_pack(env, e, expected, /*checked=*/true);
      case Expr::K::Let:
        return check_let(env, e, expected, /*checked=*/true);
      case Expr::K::Case:
        return check_case(env, e, expected, /*checked=*/true);
      case Expr::K::If:
        return check_if(env, e, expected, /*checked=*/true);
      default: {
        auto [d, ty] = infer(env, e);
        ctx_.unify(ty, expected, e->loc);
        return d;
      }
    }
  }

  std::pair<DerivRef, TypeRef> infer(Env env, const ExprRef& e) {
    switch (e->k) {
      case Expr::K::Lit: {
        DerivRef d = mk_deriv(Deriv::K::Lit, e->loc);
        d->lit = e->lit;
        d->type = t_int();
        return {d, d->type};
      }
      case Expr::K::Var: {
        DerivRef d = var_occurrence(env, e->name, e->loc, false);
        return {d, d->type};
      }
      case Expr::K::Ctor: {
        DerivRef d = var_occurrence(env, e->name, e->loc, true);
        return {d, d->type};
      }
      case Expr::K::App: {
        auto [df, tf] = infer(env, e->fn);
        TypeRef t = ctx_.zonk(tf);
        if (t->k != Type::K::Arrow)
          fail(ErrClass::UnificationFailure, e->loc,
               "cannot apply a value of type '" + show_type(t) + "'");
        DerivRef d = mk_deriv(Deriv::K::App, e->loc);
        d->app_fn = df;
        d->app_mult = t->arrow_mult;
        const ArgTy& arg = t->arrow_arg;
        if (arg.plain()) {
          d->app_arg = check(env, e->arg, arg.body);
        } else {
          d->app_arg_susp = true;
          d->app_susp_binders = arg.binders;
          ctx_.push_level();
          TypeSubst sub;
          for (auto& b : arg.binders) {
            TypeRef sk = ctx_.fresh_skolem(b.name, b.kind);
            sub[b.name] = sk;
            d->app_susp_skolems.push_back(sk);
          }
          d->app_susp_atoms = subst_sig_atoms(arg.assumptions, sub);
          d->app_arg = check(env, e->arg, subst_type(arg.body, sub));
          ctx_.pop_level();
        }
        d->type = t->arrow_res;
        return {d, d->type};
      }
      case Expr::K::Pack:
        fail(ErrClass::AmbiguousInstantiation, e->loc,
             "'pack' requires an expected existential package type");
      case Expr::K::Lam:
        fail(ErrClass::UnificationFailure, e->loc,
             "lambda needs a signature or an expected type to fix its argument");
      case Expr::K::LetPack: {
        DerivRef d = check_let_pack(env, e, nullptr, false);
        return {d, d->type};
      }
      case Expr::K::Let: {
        DerivRef d = check_let(env, e, nullptr, false);
        return {d, d->type};
      }
      case Expr::K::Case: {
        DerivRef d = check_case(env, e, nullptr, false);
        return {d, d->type};
      }
      case Expr::K::If: {
        DerivRef d = check_if(env, e, nullptr, false);
        return {d, d->type};
      }
    }
    internal_error("unhandled expression kind in infer");
  }

  DerivRef check_let(Env env, const ExprRef& e, TypeRef expected, bool checked) {
    DerivRef d;
    Env body_env = env;
    if (e->let_sig) {
      d = mk_deriv(Deriv::K::LetSig, e->loc);
      Scheme scheme = close_scheme(*e->let_sig, env, e->loc);
      d->letsig_scheme = scheme;
      ctx_.push_level();
      Skolemized sk = skolemize(scheme);
      d->letsig_skolems = sk.skolems;
      d->letsig_atoms_skolemized = sk.atoms;
      Env rhs_env = env;
      for (size_t i = 0; i < scheme.binders.size(); ++i)
        rhs_env.skolems[scheme.binders[i].name] = sk.skolems[i];
      EnvEntry self;
      self.id = fresh_id(e->let_name);
      self.bind_mult = e->let_mult;
      self.scheme = scheme;
      self.evcall = EvCall::Tuple;
      // Signed bindings are recursive only at multiplicity w.
      if (e->let_mult == Mult::Many) rhs_env.vars[e->let_name] = self;
      d->let_rhs = check(rhs_env, e->let_rhs, sk.body);
      ctx_.pop_level();
      d->let_binder_id = self.id;
      if (e->let_name != "_") body_env.vars[e->let_name] = self;
    } else {
      d = mk_deriv(Deriv::K::Let, e->loc);
      auto [dr, ty] = infer(env, e->let_rhs);
      d->let_rhs = dr;
      EnvEntry entry;
      entry.id = fresh_id(e->let_name);
      entry.bind_mult = e->let_mult;
      entry.scheme = Scheme{{}, {}, ty};
      entry.evcall = EvCall::None;
      d->let_binder_id = entry.id;
      if (e->let_name != "_") body_env.vars[e->let_name] = entry;
    }
    d->let_mult = e->let_mult;
    d->let_binder_name = e->let_name;
    if (checked) {
      d->let_body = check(body_env, e->let_body, expected);
      d->type = expected;
    } else {
      auto [db, ty] = infer(body_env, e->let_body);
      d->let_body = db;
      d->type = ty;
    }
    return d;
  }

  DerivRef check_let_pack(Env env, const ExprRef& e, TypeRef expected, bool checked) {
    auto [dr, ty] = infer(env, e->lp_rhs);
    TypeRef t = ctx_.zonk(ty);
    if (t->k != Type::K::Package)
      fail(ErrClass::UnificationFailure, e->loc,
           "'let pack' needs a package, got '" + show_type(t) + "'");
    const PackPat& pat = e->lp_pat;
    if (!pat.tyvars.empty() && pat.tyvars.size() != t->pkg_binders.size())
      fail(ErrClass::UnificationFailure, e->loc,
           "pattern binds " + std::to_string(pat.tyvars.size()) + " type variables, package has " +
               std::to_string(t->pkg_binders.size()));

    DerivRef d = mk_deriv(Deriv::K::Unpack, e->loc);
    d->unpack_rhs = dr;

    ctx_.push_level();
    Env body_env = env;
    TypeSubst sub;
    for (size_t i = 0; i < t->pkg_binders.size(); ++i) {
      std::string nm = pat.tyvars.empty() ? t->pkg_binders[i].name : pat.tyvars[i];
      TypeRef sk = ctx_.fresh_skolem(nm, t->pkg_binders[i].kind);
      sub[t->pkg_binders[i].name] = sk;
      d->unpack_skolems.push_back(sk);
      if (!pat.tyvars.empty() && nm != "_") body_env.skolems[nm] = sk;
    }
    TypeRef payload = subst_type(t->pkg_payload, sub);
    d->unpack_payload_ty = payload;
    d->unpack_atoms = subst_sig_atoms(t->pkg_atoms, sub);

    // Bind the payload: plain variable, or expand the constructor pattern
    // into case nodes on a fresh scrutinee.
    std::string pay_name = pat.is_con ? "$scrut" : pat.name;
    EnvEntry pay;
    pay.id = fresh_id(pay_name == "_" ? "ignored" : pay_name);
    pay.bind_mult = Mult::One;
    pay.scheme = Scheme{{}, {}, payload};
    d->unpack_binder_id = pay.id;
    d->unpack_binder_name = pay_name;
    if (!pat.is_con && pat.name != "_") body_env.vars[pat.name] = pay;

    if (pat.is_con) {
      d->unpack_body =
          expand_pack_con(body_env, pat, pay, payload, e, expected, checked);
    } else if (checked) {
      d->unpack_body = check(body_env, e->lp_body, expected);
    } else {
      auto [db, bt] = infer(body_env, e->lp_body);
      d->unpack_body = db;
      expected = bt;
    }
    d->type = checked ? expected : d->unpack_body->type;

    // The skolems must not escape through the result type.
    TypeRef out = ctx_.zonk(d->type);
    for (auto& sk : d->unpack_skolems)
      if (ctx_.mentions_skolem(out, sk->skolem_id))
        fail(ErrClass::UnificationFailure, e->loc,
             "existential type variable '" + sk->var_name + "' escapes its scope in '" +
                 show_type(out) + "'");
    ctx_.pop_level();
    return d;
  }

  // let pack (K a1 .. ak) = rhs in body, with at most one tuple layer in the
  // arguments. Expands to a case on the payload variable, and per tuple
  // argument a further case at the field's multiplicity.
  DerivRef expand_pack_con(Env env, const PackPat& pat, const EnvEntry& scrut, TypeRef payload,
                           const ExprRef& e, TypeRef expected, bool checked) {
    struct TupleTodo {
      EnvEntry tmp;
      std::vector<std::string> vars;
      std::vector<TypeRef> types;  // field types (filled from Pair instantiation)
      Mult mult;                   // binder mult of the tuple temp
    };

    const PreludeEntry* ctor = sigs_.find(pat.name);
    if (!ctor || ctor->impl != BuiltinImpl::Ctor)
      fail(ErrClass::UnboundVariable, e->loc, "unknown constructor '" + pat.name + "' in pattern");

    auto [fields, result] = ctor_fields(*ctor);
    if (fields.size() != pat.con_args.size())
      fail(ErrClass::UnificationFailure, e->loc,
           "constructor '" + pat.name + "' has " + std::to_string(fields.size()) +
               " fields, pattern gives " + std::to_string(pat.con_args.size()));
    ctx_.unify(result, payload, e->loc);

    CaseAltD alt;
    alt.ctor = pat.name;
    std::vector<TupleTodo> tuples;
    for (size_t i = 0; i < fields.size(); ++i) {
      Mult m = mult_mul(Mult::One, ctor->ctor_field_mults[i]);
      const PackPatArg& a = pat.con_args[i];
      if (!a.tuple) {
        EnvEntry f;
        f.id = fresh_id(a.vars[0] == "_" ? "ignored" : a.vars[0]);
        f.bind_mult = m;
        f.scheme = Scheme{{}, {}, fields[i]};
        alt.binder_ids.push_back(f.id);
        alt.binder_names.push_back(a.vars[0]);
        alt.binder_types.push_back(fields[i]);
        alt.binder_mults.push_back(m);
        if (a.vars[0] != "_") env.vars[a.vars[0]] = f;
      } else {
        if (a.vars.size() != 2)
          fail(ErrClass::UnificationFailure, e->loc, "tuple patterns bind exactly two variables");
        TupleTodo todo;
        todo.tmp.id = fresh_id("tup");
        todo.tmp.bind_mult = m;
        todo.tmp.scheme = Scheme{{}, {}, fields[i]};
        todo.vars = a.vars;
        todo.mult = m;
        // Unify the field with a pair of fresh metas to get components.
        TypeRef x = ctx_.fresh_meta(), y = ctx_.fresh_meta();
        ctx_.unify(fields[i], t_pair(x, y), e->loc);
        todo.types = {x, y};
        alt.binder_ids.push_back(todo.tmp.id);
        alt.binder_names.push_back(todo.tmp.id);
        alt.binder_types.push_back(fields[i]);
        alt.binder_mults.push_back(m);
        tuples.push_back(todo);
      }
    }

    // Inner tuple cases: bind their variables.
    for (auto& todo : tuples) {
      for (size_t j = 0; j < 2; ++j) {
        if (todo.vars[j] == "_") continue;
        EnvEntry f;
        f.id = fresh_id(todo.vars[j]);
        f.bind_mult = mult_mul(todo.mult, Mult::One);
        f.scheme = Scheme{{}, {}, todo.types[j]};
        env.vars[todo.vars[j]] = f;
      }
    }

    DerivRef body;
    TypeRef body_ty = expected;
    if (checked) {
      body = check(env, e->lp_body, expected);
    } else {
      auto [db, bt] = infer(env, e->lp_body);
      body = db;
      body_ty = bt;
    }

    // Wrap inside-out: tuple cases first, then the constructor case.
    for (auto it = tuples.rbegin(); it != tuples.rend(); ++it) {
      DerivRef c = mk_deriv(Deriv::K::Case, e->loc);
      c->case_mult = it->mult;
      c->case_scrut = var_use(it->tmp, e->loc);
      CaseAltD pa;
      pa.ctor = "Pair";
      for (size_t j = 0; j < 2; ++j) {
        pa.binder_names.push_back(it->vars[j]);
        pa.binder_ids.push_back(it->vars[j] == "_" ? fresh_id("ignored")
                                                   : env.vars[it->vars[j]].id);
        pa.binder_types.push_back(it->types[j]);
        pa.binder_mults.push_back(mult_mul(it->mult, Mult::One));
      }
      pa.body = body;
      c->alts = {pa};
      c->type = body_ty;
      body = c;
    }

    DerivRef c = mk_deriv(Deriv::K::Case, e->loc);
    c->case_mult = Mult::One;
    c->case_scrut = var_use(scrut, e->loc);
    alt.body = body;
    c->alts = {alt};
    c->type = body_ty;
    return c;
  }

  DerivRef var_use(const EnvEntry& entry, SourceLoc loc) {
    DerivRef d = mk_deriv(Deriv::K::Var, loc);
    d->var_id = entry.id;
    d->var_name = entry.id;
    d->var_evcall = entry.evcall;
    d->type = entry.scheme.body;
    return d;
  }

  // Field types and result type of a constructor scheme, instantiated fresh.
  std::pair<std::vector<TypeRef>, TypeRef> ctor_fields(const PreludeEntry& ctor) {
    TypeSubst inst;
    for (auto& b : ctor.scheme.binders) inst[b.name] = ctx_.fresh_meta();
    TypeRef t = subst_type(ctor.scheme.body, inst);
    std::vector<TypeRef> fields;
    while (t->k == Type::K::Arrow) {
      fields.push_back(t->arrow_arg.body);
      t = t->arrow_res;
    }
    return {fields, t};
  }

  DerivRef check_case(Env env, const ExprRef& e, TypeRef expected, bool checked) {
    DerivRef d = mk_deriv(Deriv::K::Case, e->loc);
    d->case_mult = e->case_mult;
    auto [ds, st] = infer(env, e->case_scrut);
    d->case_scrut = ds;
    TypeRef scrut_ty = ctx_.zonk(st);

    TypeRef result = expected;
    for (auto& br : e->branches) {
      const PreludeEntry* ctor = sigs_.find(br.ctor);
      if (!ctor || ctor->impl != BuiltinImpl::Ctor)
        fail(ErrClass::UnboundVariable, br.body ? br.body->loc : e->loc,
             "unknown constructor '" + br.ctor + "' in pattern");
      auto [fields, ctor_res] = ctor_fields(*ctor);
      ctx_.unify(ctor_res, scrut_ty, e->loc);
      if (fields.size() != br.binders.size())
        fail(ErrClass::UnificationFailure, e->loc,
             "constructor '" + br.ctor + "' has " + std::to_string(fields.size()) +
                 " fields, pattern gives " + std::to_string(br.binders.size()));
      CaseAltD alt;
      alt.ctor = br.ctor;
      Env benv = env;
      for (size_t i = 0; i < fields.size(); ++i) {
        Mult m = mult_mul(e->case_mult, ctor->ctor_field_mults[i]);
        EnvEntry f;
        f.id = fresh_id(br.binders[i] == "_" ? "ignored" : br.binders[i]);
        f.bind_mult = m;
        f.scheme = Scheme{{}, {}, fields[i]};
        alt.binder_ids.push_back(f.id);
        alt.binder_names.push_back(br.binders[i]);
        alt.binder_types.push_back(fields[i]);
        alt.binder_mults.push_back(m);
        if (br.binders[i] != "_") benv.vars[br.binders[i]] = f;
      }
      if (!result) {
        auto [db, bt] = infer(benv, br.body);
        alt.body = db;
        result = bt;
      } else {
        alt.body = check(benv, br.body, result);
      }
      d->alts.push_back(std::move(alt));
    }
    d->type = result;
    (void)checked;
    return d;
  }

  // if-sugar: an w-case on Bool.
  DerivRef check_if(Env env, const ExprRef& e, TypeRef expected, bool checked) {
    DerivRef d = mk_deriv(Deriv::K::Case, e->loc);
    d->case_mult = Mult::Many;
    d->case_scrut = check(env, e->if_cond, t_bool());
    TypeRef result = expected;
    CaseAltD then_alt;
    then_alt.ctor = "True";
    if (!result) {
      auto [db, bt] = infer(env, e->if_then);
      then_alt.body = db;
      result = bt;
    } else {
      then_alt.body = check(env, e->if_then, result);
    }
    CaseAltD else_alt;
    else_alt.ctor = "False";
    else_alt.body = check(env, e->if_else, result);
    d->alts = {std::move(then_alt), std::move(else_alt)};
    d->type = result;
    (void)checked;
    return d;
  }

  // --- zonking the finished derivation; left-over metas are ambiguity ---

  void zonk_deriv(const DerivRef& d, const std::string& binding) {
    if (!d) return;
    d->type = zonk_check(d->type, d->loc, binding);
    for (auto& a : d->var_atoms) a.atom = zonk_atom_check(a.atom, d->loc, binding);
    for (auto& t : d->var_inst) t = zonk_check(t, d->loc, binding);
    d->abs_arg = ctx_.zonk_arg(d->abs_arg);
    for (auto& a : d->app_susp_atoms) a.atom = zonk_atom_check(a.atom, d->loc, binding);
    for (auto& t : d->pack_witness) t = zonk_check(t, d->loc, binding);
    for (auto& a : d->pack_atoms) a.atom = zonk_atom_check(a.atom, d->loc, binding);
    if (d->pack_pkg_type) d->pack_pkg_type = zonk_check(d->pack_pkg_type, d->loc, binding);
    if (d->unpack_payload_ty)
      d->unpack_payload_ty = zonk_check(d->unpack_payload_ty, d->loc, binding);
    for (auto& a : d->unpack_atoms) a.atom = zonk_atom_check(a.atom, d->loc, binding);
    for (auto& a : d->letsig_atoms_skolemized) a.atom = zonk_atom_check(a.atom, d->loc, binding);
    for (auto& alt : d->alts) {
      for (auto& t : alt.binder_types) t = zonk_check(t, d->loc, binding);
      zonk_deriv(alt.body, binding);
    }
    zonk_deriv(d->abs_body, binding);
    zonk_deriv(d->app_fn, binding);
    zonk_deriv(d->app_arg, binding);
    zonk_deriv(d->pack_payload, binding);
    zonk_deriv(d->unpack_rhs, binding);
    zonk_deriv(d->unpack_body, binding);
    zonk_deriv(d->let_rhs, binding);
    zonk_deriv(d->let_body, binding);
    zonk_deriv(d->case_scrut, binding);
  }

  TypeRef zonk_check(const TypeRef& t, SourceLoc loc, const std::string& binding) {
    if (!t) return t;
    TypeRef z = ctx_.zonk(t);
    if (ctx_.has_meta(z))
      fail(ErrClass::AmbiguousInstantiation, loc,
           "ambiguous instantiation in '" + binding + "': cannot determine '" + show_type(z) + "'");
    return z;
  }

  Atom zonk_atom_check(const Atom& a, SourceLoc loc, const std::string& binding) {
    Atom z = ctx_.zonk_atom(a);
    for (auto& x : z.args)
      if (ctx_.has_meta(x))
        fail(ErrClass::AmbiguousInstantiation, loc,
             "ambiguous instantiation in '" + binding + "': cannot determine constraint '" +
                 show_atom(z) + "'");
    return z;
  }

  const SignatureTable& sigs_;
  InferCtx ctx_;
  std::map<std::string, oracle_detail::EnvEntry> globals_;
  uint64_t binder_counter_ = 0;
};

inline std::vector<TopDeriv> infer_program(const SurfaceProgram& prog,
                                           const SignatureTable& sigs) {
  Oracle o(sigs);
  return o.run(prog);
}

} // namespace lqc
