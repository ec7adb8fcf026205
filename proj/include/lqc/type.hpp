#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lqc/multiplicity.hpp"

namespace lqc {

// Kinds are deliberately minimal: Type, Location, and the arrow kind used by
// PArray's element parameter.
enum class Kind : uint8_t { Star, Loc, LocToStar };

inline const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Star: return "Type";
    case Kind::Loc: return "Location";
    case Kind::LocToStar: return "Location -> Type";
  }
  return "?";
}

struct Type;
using TypeRef = std::shared_ptr<const Type>;

struct TyBinder {
  std::string name;
  Kind kind = Kind::Star;
  bool operator==(const TyBinder& o) const { return name == o.name && kind == o.kind; }
};

// A constraint atom: constraint name applied to type arguments, e.g. Read n.
// The distinguished parameterless atom is named "Linearly".
struct Atom {
  std::string name;
  std::vector<TypeRef> args;
};

// One assumption entry: an atom together with its declared multiplicity.
struct SigAtom {
  Mult mult = Mult::One;
  Atom atom;
};

// Argument position of an arrow: either a plain type or a (rank-2,
// monomorphic-body) constrained suspension, optionally generalising a few
// binders as lend/lendMut require.
struct ArgTy {
  std::vector<TyBinder> binders;
  std::vector<SigAtom> assumptions;
  TypeRef body;
  bool plain() const { return binders.empty() && assumptions.empty(); }
};

struct Scheme {
  std::vector<TyBinder> binders;
  std::vector<SigAtom> assumptions;
  TypeRef body;
};

struct Type {
  enum class K : uint8_t { Var, Meta, Con, Arrow, Package, AppV };
  K k;

  // Var: skolem_id == 0 means a syntactic variable bound by an enclosing
  // binder; skolem_id > 0 is a rigid skolem.
  std::string var_name;
  uint64_t skolem_id = 0;
  Kind var_kind = Kind::Star;

  uint64_t meta_id = 0;

  std::string con_name;
  std::vector<TypeRef> con_args;

  ArgTy arrow_arg;
  Mult arrow_mult = Mult::Many;
  TypeRef arrow_res;

  std::vector<TyBinder> pkg_binders;
  TypeRef pkg_payload;
  std::vector<SigAtom> pkg_atoms;

  // AppV: a type variable (or meta) applied to arguments, e.g. "a p" in the
  // lend continuation. Normalised away once the head resolves to a
  // constructor.
  TypeRef appv_head;
  std::vector<TypeRef> appv_args;
};

inline TypeRef t_var(std::string name, Kind kind = Kind::Star, uint64_t skolem = 0) {
  auto t = std::make_shared<Type>();
  t->k = Type::K::Var;
  t->var_name = std::move(name);
  t->var_kind = kind;
  t->skolem_id = skolem;
  return t;
}

inline TypeRef t_meta(uint64_t id) {
  auto t = std::make_shared<Type>();
  t->k = Type::K::Meta;
  t->meta_id = id;
  return t;
}

inline TypeRef t_con(std::string name, std::vector<TypeRef> args = {}) {
  auto t = std::make_shared<Type>();
  t->k = Type::K::Con;
  t->con_name = std::move(name);
  t->con_args = std::move(args);
  return t;
}

inline TypeRef t_arrow(ArgTy arg, Mult m, TypeRef res) {
  auto t = std::make_shared<Type>();
  t->k = Type::K::Arrow;
  t->arrow_arg = std::move(arg);
  t->arrow_mult = m;
  t->arrow_res = std::move(res);
  return t;
}

inline TypeRef t_fun(TypeRef arg, Mult m, TypeRef res) {
  return t_arrow(ArgTy{{}, {}, std::move(arg)}, m, std::move(res));
}

inline TypeRef t_package(std::vector<TyBinder> binders, TypeRef payload,
                         std::vector<SigAtom> atoms) {
  auto t = std::make_shared<Type>();
  t->k = Type::K::Package;
  t->pkg_binders = std::move(binders);
  t->pkg_payload = std::move(payload);
  t->pkg_atoms = std::move(atoms);
  return t;
}

// Apply a head type to arguments, folding constructor heads immediately.
inline TypeRef t_apply(TypeRef head, std::vector<TypeRef> args) {
  if (args.empty()) return head;
  if (head->k == Type::K::Con) {
    std::vector<TypeRef> all = head->con_args;
    all.insert(all.end(), args.begin(), args.end());
    return t_con(head->con_name, std::move(all));
  }
  if (head->k == Type::K::AppV) {
    std::vector<TypeRef> all = head->appv_args;
    all.insert(all.end(), args.begin(), args.end());
    return t_apply(head->appv_head, std::move(all));
  }
  auto t = std::make_shared<Type>();
  t->k = Type::K::AppV;
  t->appv_head = std::move(head);
  t->appv_args = std::move(args);
  return t;
}

inline TypeRef t_int() { return t_con("Int"); }
inline TypeRef t_bool() { return t_con("Bool"); }
inline TypeRef t_unit() { return t_con("Unit"); }
inline TypeRef t_ur(TypeRef a) { return t_con("Ur", {std::move(a)}); }
inline TypeRef t_pair(TypeRef a, TypeRef b) { return t_con("Pair", {std::move(a), std::move(b)}); }

// ---------------------------------------------------------------------------
// Structural comparison. Syntactic vars compare by name, skolems by id,
// metas by id. Used both for equality and for the canonical atom order.
// ---------------------------------------------------------------------------

inline int type_cmp(const TypeRef& a, const TypeRef& b);

inline int cmp_ints(uint64_t a, uint64_t b) { return a < b ? -1 : a > b ? 1 : 0; }

inline int cmp_vec(const std::vector<TypeRef>& a, const std::vector<TypeRef>& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (size_t i = 0; i < a.size(); ++i)
    if (int c = type_cmp(a[i], b[i])) return c;
  return 0;
}

inline int atom_cmp(const Atom& a, const Atom& b) {
  if (int c = a.name.compare(b.name)) return c < 0 ? -1 : 1;
  return cmp_vec(a.args, b.args);
}

inline int sig_atom_cmp(const SigAtom& a, const SigAtom& b) {
  if (a.mult != b.mult) return a.mult == Mult::One ? -1 : 1;
  return atom_cmp(a.atom, b.atom);
}

inline int arg_ty_cmp(const ArgTy& a, const ArgTy& b) {
  if (a.binders.size() != b.binders.size()) return a.binders.size() < b.binders.size() ? -1 : 1;
  for (size_t i = 0; i < a.binders.size(); ++i) {
    if (int c = a.binders[i].name.compare(b.binders[i].name)) return c < 0 ? -1 : 1;
    if (a.binders[i].kind != b.binders[i].kind)
      return static_cast<int>(a.binders[i].kind) < static_cast<int>(b.binders[i].kind) ? -1 : 1;
  }
  if (a.assumptions.size() != b.assumptions.size())
    return a.assumptions.size() < b.assumptions.size() ? -1 : 1;
  for (size_t i = 0; i < a.assumptions.size(); ++i)
    if (int c = sig_atom_cmp(a.assumptions[i], b.assumptions[i])) return c;
  return type_cmp(a.body, b.body);
}

inline int type_cmp(const TypeRef& a, const TypeRef& b) {
  if (a.get() == b.get()) return 0;
  if (a->k != b->k) return static_cast<int>(a->k) < static_cast<int>(b->k) ? -1 : 1;
  switch (a->k) {
    case Type::K::Var:
      if (a->skolem_id != b->skolem_id) return cmp_ints(a->skolem_id, b->skolem_id);
      if (a->skolem_id != 0) return 0;
      return a->var_name.compare(b->var_name) < 0 ? -1 : a->var_name == b->var_name ? 0 : 1;
    case Type::K::Meta:
      return cmp_ints(a->meta_id, b->meta_id);
    case Type::K::Con:
      if (int c = a->con_name.compare(b->con_name)) return c < 0 ? -1 : 1;
      return cmp_vec(a->con_args, b->con_args);
    case Type::K::Arrow: {
      if (a->arrow_mult != b->arrow_mult) return a->arrow_mult == Mult::One ? -1 : 1;
      if (int c = arg_ty_cmp(a->arrow_arg, b->arrow_arg)) return c;
      return type_cmp(a->arrow_res, b->arrow_res);
    }
    case Type::K::Package: {
      if (a->pkg_binders.size() != b->pkg_binders.size())
        return a->pkg_binders.size() < b->pkg_binders.size() ? -1 : 1;
      // Raw compare is by binder name; alpha-equivalence is handled by the
      // unifier, which renames both sides to common skolems first.
      for (size_t i = 0; i < a->pkg_binders.size(); ++i)
        if (int c = a->pkg_binders[i].name.compare(b->pkg_binders[i].name)) return c < 0 ? -1 : 1;
      if (int c = type_cmp(a->pkg_payload, b->pkg_payload)) return c;
      if (a->pkg_atoms.size() != b->pkg_atoms.size())
        return a->pkg_atoms.size() < b->pkg_atoms.size() ? -1 : 1;
      for (size_t i = 0; i < a->pkg_atoms.size(); ++i)
        if (int c = sig_atom_cmp(a->pkg_atoms[i], b->pkg_atoms[i])) return c;
      return 0;
    }
    case Type::K::AppV: {
      if (int c = type_cmp(a->appv_head, b->appv_head)) return c;
      return cmp_vec(a->appv_args, b->appv_args);
    }
  }
  return 0;
}

inline bool type_eq(const TypeRef& a, const TypeRef& b) { return type_cmp(a, b) == 0; }
inline bool atom_eq(const Atom& a, const Atom& b) { return atom_cmp(a, b) == 0; }

// ---------------------------------------------------------------------------
// Substitution of syntactic variables by name. Shadowing binders shield
// their names; skolems and metas are never substituted here.
// ---------------------------------------------------------------------------

using TypeSubst = std::map<std::string, TypeRef>;

inline TypeRef subst_type(const TypeRef& t, const TypeSubst& s);

inline Atom subst_atom(const Atom& a, const TypeSubst& s) {
  Atom r{a.name, {}};
  r.args.reserve(a.args.size());
  for (auto& x : a.args) r.args.push_back(subst_type(x, s));
  return r;
}

inline std::vector<SigAtom> subst_sig_atoms(const std::vector<SigAtom>& as, const TypeSubst& s) {
  std::vector<SigAtom> r;
  r.reserve(as.size());
  for (auto& a : as) r.push_back(SigAtom{a.mult, subst_atom(a.atom, s)});
  return r;
}

inline TypeSubst shield(const TypeSubst& s, const std::vector<TyBinder>& bs) {
  TypeSubst r = s;
  for (auto& b : bs) r.erase(b.name);
  return r;
}

inline ArgTy subst_arg_ty(const ArgTy& a, const TypeSubst& s) {
  TypeSubst inner = shield(s, a.binders);
  return ArgTy{a.binders, subst_sig_atoms(a.assumptions, inner), subst_type(a.body, inner)};
}

inline TypeRef subst_type(const TypeRef& t, const TypeSubst& s) {
  if (s.empty()) return t;
  switch (t->k) {
    case Type::K::Var: {
      if (t->skolem_id != 0) return t;
      auto it = s.find(t->var_name);
      return it == s.end() ? t : it->second;
    }
    case Type::K::Meta:
      return t;
    case Type::K::Con: {
      std::vector<TypeRef> args;
      args.reserve(t->con_args.size());
      for (auto& a : t->con_args) args.push_back(subst_type(a, s));
      return t_con(t->con_name, std::move(args));
    }
    case Type::K::Arrow:
      return t_arrow(subst_arg_ty(t->arrow_arg, s), t->arrow_mult, subst_type(t->arrow_res, s));
    case Type::K::Package: {
      TypeSubst inner = shield(s, t->pkg_binders);
      return t_package(t->pkg_binders, subst_type(t->pkg_payload, inner),
                       subst_sig_atoms(t->pkg_atoms, inner));
    }
    case Type::K::AppV: {
      std::vector<TypeRef> args;
      args.reserve(t->appv_args.size());
      for (auto& a : t->appv_args) args.push_back(subst_type(a, s));
      return t_apply(subst_type(t->appv_head, s), std::move(args));
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Rendering. The canonical text form used in dumps, traces and error
// messages; parseable back by the type grammar for round-trip tests.
// ---------------------------------------------------------------------------

inline std::string show_type(const TypeRef& t);

inline std::string show_atom(const Atom& a) {
  std::string r = a.name;
  for (auto& x : a.args) {
    r += ' ';
    bool paren = x->k == Type::K::Con ? !x->con_args.empty() : x->k != Type::K::Var;
    if (paren) r += '(' + show_type(x) + ')';
    else r += show_type(x);
  }
  return r;
}

inline std::string show_sig_atom(const SigAtom& a) {
  return (a.mult == Mult::Many ? "many " : "") + show_atom(a.atom);
}

inline std::string show_sig_atoms(const std::vector<SigAtom>& as) {
  if (as.size() == 1 && as[0].mult == Mult::One) return show_atom(as[0].atom);
  std::string r = "(";
  for (size_t i = 0; i < as.size(); ++i) {
    if (i) r += ", ";
    r += show_sig_atom(as[i]);
  }
  return r + ")";
}

// Assumption prefix of a scheme or suspension, e.g. "(Read n, Write n) =o "
// or "C => ". The unrestricted arrow marks an all-many assumption, so the
// per-atom "many" markers are dropped there.
inline std::string show_assumption_prefix(const std::vector<SigAtom>& as) {
  if (as.empty()) return "";
  bool all_many = true;
  for (auto& a : as)
    if (a.mult == Mult::One) all_many = false;
  std::string body;
  if (as.size() == 1 && (all_many || as[0].mult == Mult::One)) {
    body = show_atom(as[0].atom);
  } else {
    body = "(";
    for (size_t i = 0; i < as.size(); ++i) {
      if (i) body += ", ";
      body += all_many ? show_atom(as[i].atom) : show_sig_atom(as[i]);
    }
    body += ")";
  }
  return body + (all_many ? " => " : " =o ");
}

inline std::string show_arg_ty(const ArgTy& a) {
  if (a.plain()) {
    // Parenthesise arrows and packages on the left of an arrow.
    if (a.body->k == Type::K::Arrow || a.body->k == Type::K::Package)
      return "(" + show_type(a.body) + ")";
    return show_type(a.body);
  }
  std::string r = "(";
  if (!a.binders.empty()) {
    r += "forall";
    for (auto& b : a.binders) r += ' ' + b.name;
    r += ". ";
  }
  r += show_assumption_prefix(a.assumptions);
  r += show_type(a.body);
  return r + ")";
}

inline std::string show_type(const TypeRef& t) {
  switch (t->k) {
    case Type::K::Var:
      return t->var_name + (t->skolem_id ? "%" + std::to_string(t->skolem_id) : "");
    case Type::K::Meta:
      return "?" + std::to_string(t->meta_id);
    case Type::K::Con: {
      if (t->con_name == "Unit" && t->con_args.empty()) return "()";
      if (t->con_name == "Pair" && t->con_args.size() == 2)
        return "(" + show_type(t->con_args[0]) + ", " + show_type(t->con_args[1]) + ")";
      // Re-sugar arrays of atomic refs back to UArray.
      if (t->con_name == "PArray" && t->con_args.size() == 2 &&
          t->con_args[0]->k == Type::K::Con && t->con_args[0]->con_name == "AtomRef" &&
          t->con_args[0]->con_args.size() == 1)
        return show_type(t_con("UArray", {t->con_args[0]->con_args[0], t->con_args[1]}));
      std::string r = t->con_name;
      for (auto& a : t->con_args) {
        r += ' ';
        bool paren = a->k == Type::K::Con ? !(a->con_args.empty() || a->con_name == "Pair" ||
                                              a->con_name == "Unit")
                                          : a->k != Type::K::Var && a->k != Type::K::Meta;
        if (a->k == Type::K::Con && a->con_name == "PArray" && a->con_args.size() == 2 &&
            a->con_args[0]->k == Type::K::Con && a->con_args[0]->con_name == "AtomRef")
          paren = true;  // UArray resugaring introduces args
        if (paren) r += '(' + show_type(a) + ')';
        else r += show_type(a);
      }
      return r;
    }
    case Type::K::Arrow:
      return show_arg_ty(t->arrow_arg) + (t->arrow_mult == Mult::One ? " -o " : " -> ") +
             show_type(t->arrow_res);
    case Type::K::Package: {
      std::string r = "exists";
      for (auto& b : t->pkg_binders) r += ' ' + b.name;
      r += ". ";
      bool paren = t->pkg_payload->k == Type::K::Arrow || t->pkg_payload->k == Type::K::Package;
      r += paren ? "(" + show_type(t->pkg_payload) + ")" : show_type(t->pkg_payload);
      r += " * " + (t->pkg_atoms.empty() ? std::string("()") : show_sig_atoms(t->pkg_atoms));
      return r;
    }
    case Type::K::AppV: {
      std::string r = show_type(t->appv_head);
      for (auto& a : t->appv_args) {
        bool paren = !(a->k == Type::K::Var || a->k == Type::K::Meta ||
                       (a->k == Type::K::Con && a->con_args.empty()));
        r += ' ';
        r += paren ? "(" + show_type(a) + ")" : show_type(a);
      }
      return r;
    }
  }
  return "?";
}

inline std::string show_scheme(const Scheme& s) {
  std::string r;
  if (!s.binders.empty()) {
    r += "forall";
    for (auto& b : s.binders) r += ' ' + b.name;
    r += ". ";
  }
  r += show_assumption_prefix(s.assumptions);
  r += show_type(s.body);
  return r;
}

} // namespace lqc
