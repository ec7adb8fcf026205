#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lqc/diag.hpp"
#include "lqc/type.hpp"

namespace lqc {

// Unification state for one compilation unit: instantiation metavariables
// (monotypes only, no let-generalisation) and skolem bookkeeping. Metas
// carry the skolem level at which they were created; a meta may never be
// solved to a type mentioning a deeper skolem.
class InferCtx {
 public:
  TypeRef fresh_meta() {
    metas_.push_back(MetaInfo{nullptr, level_});
    return t_meta(metas_.size() - 1);
  }

  TypeRef fresh_skolem(const std::string& name, Kind kind) {
    ++skolem_counter_;
    skolem_level_[skolem_counter_] = level_;
    return t_var(name, kind, skolem_counter_);
  }

  int level() const { return level_; }
  void push_level() { ++level_; }
  void pop_level() { --level_; }

  bool solved() const {
    for (auto& m : metas_)
      if (!m.solution) return false;
    return true;
  }

  // Resolve metas and normalise applied heads, recursively.
  TypeRef zonk(const TypeRef& t) {
    switch (t->k) {
      case Type::K::Var:
        return t;
      case Type::K::Meta: {
        MetaInfo& m = metas_[t->meta_id];
        if (!m.solution) return t;
        m.solution = zonk(m.solution);
        return m.solution;
      }
      case Type::K::Con: {
        std::vector<TypeRef> args;
        args.reserve(t->con_args.size());
        for (auto& a : t->con_args) args.push_back(zonk(a));
        return t_con(t->con_name, std::move(args));
      }
      case Type::K::Arrow:
        return t_arrow(zonk_arg(t->arrow_arg), t->arrow_mult, zonk(t->arrow_res));
      case Type::K::Package: {
        std::vector<SigAtom> atoms;
        atoms.reserve(t->pkg_atoms.size());
        for (auto& a : t->pkg_atoms) atoms.push_back(SigAtom{a.mult, zonk_atom(a.atom)});
        return t_package(t->pkg_binders, zonk(t->pkg_payload), std::move(atoms));
      }
      case Type::K::AppV: {
        std::vector<TypeRef> args;
        args.reserve(t->appv_args.size());
        for (auto& a : t->appv_args) args.push_back(zonk(a));
        return t_apply(zonk(t->appv_head), std::move(args));
      }
    }
    return t;
  }

  Atom zonk_atom(const Atom& a) {
    Atom r{a.name, {}};
    r.args.reserve(a.args.size());
    for (auto& x : a.args) r.args.push_back(zonk(x));
    return r;
  }

  ArgTy zonk_arg(const ArgTy& a) {
    std::vector<SigAtom> atoms;
    atoms.reserve(a.assumptions.size());
    for (auto& x : a.assumptions) atoms.push_back(SigAtom{x.mult, zonk_atom(x.atom)});
    return ArgTy{a.binders, std::move(atoms), zonk(a.body)};
  }

  bool has_meta(const TypeRef& t) {
    TypeRef z = zonk(t);
    return scan(z, [](const TypeRef& x) { return x->k == Type::K::Meta; });
  }

  bool mentions_skolem(const TypeRef& t, uint64_t id) {
    TypeRef z = zonk(t);
    return scan(z, [id](const TypeRef& x) {
      return x->k == Type::K::Var && x->skolem_id == id;
    });
  }

  void unify(const TypeRef& ta, const TypeRef& tb, SourceLoc loc) {
    TypeRef a = shallow(ta), b = shallow(tb);
    if (a->k == Type::K::Meta && b->k == Type::K::Meta && a->meta_id == b->meta_id) return;
    if (a->k == Type::K::Meta) return solve(a->meta_id, b, loc);
    if (b->k == Type::K::Meta) return solve(b->meta_id, a, loc);

    if (a->k != b->k) mismatch(ta, tb, loc);
    switch (a->k) {
      case Type::K::Var:
        if (a->skolem_id != b->skolem_id) mismatch(ta, tb, loc);
        if (a->skolem_id == 0 && a->var_name != b->var_name) mismatch(ta, tb, loc);
        return;
      case Type::K::Con: {
        if (a->con_name != b->con_name || a->con_args.size() != b->con_args.size())
          mismatch(ta, tb, loc);
        for (size_t i = 0; i < a->con_args.size(); ++i) unify(a->con_args[i], b->con_args[i], loc);
        return;
      }
      case Type::K::Arrow: {
        if (a->arrow_mult != b->arrow_mult) mismatch(ta, tb, loc);
        const ArgTy &x = a->arrow_arg, &y = b->arrow_arg;
        if (x.plain() != y.plain()) mismatch(ta, tb, loc);
        if (x.plain()) {
          unify(x.body, y.body, loc);
        } else {
          unify_susp(x, y, ta, tb, loc);
        }
        unify(a->arrow_res, b->arrow_res, loc);
        return;
      }
      case Type::K::Package: {
        if (a->pkg_binders.size() != b->pkg_binders.size()) mismatch(ta, tb, loc);
        if (a->pkg_atoms.size() != b->pkg_atoms.size()) mismatch(ta, tb, loc);
        // Alpha-rename both sides to common fresh skolems, then compare
        // payloads and constraint lists positionally.
        TypeSubst sa, sb;
        for (size_t i = 0; i < a->pkg_binders.size(); ++i) {
          TypeRef sk = fresh_skolem(a->pkg_binders[i].name, a->pkg_binders[i].kind);
          sa[a->pkg_binders[i].name] = sk;
          sb[b->pkg_binders[i].name] = sk;
        }
        unify(subst_type(a->pkg_payload, sa), subst_type(b->pkg_payload, sb), loc);
        for (size_t i = 0; i < a->pkg_atoms.size(); ++i) {
          const SigAtom& pa = a->pkg_atoms[i];
          const SigAtom& pb = b->pkg_atoms[i];
          if (pa.mult != pb.mult || pa.atom.name != pb.atom.name ||
              pa.atom.args.size() != pb.atom.args.size())
            mismatch(ta, tb, loc);
          for (size_t j = 0; j < pa.atom.args.size(); ++j)
            unify(subst_type(pa.atom.args[j], sa), subst_type(pb.atom.args[j], sb), loc);
        }
        return;
      }
      case Type::K::AppV: {
        if (a->appv_args.size() != b->appv_args.size()) mismatch(ta, tb, loc);
        unify(a->appv_head, b->appv_head, loc);
        for (size_t i = 0; i < a->appv_args.size(); ++i)
          unify(a->appv_args[i], b->appv_args[i], loc);
        return;
      }
      case Type::K::Meta:
        return;  // unreachable
    }
  }

 private:
  struct MetaInfo {
    TypeRef solution;
    int level;
  };

  template <typename F>
  bool scan(const TypeRef& t, F pred) {
    if (pred(t)) return true;
    switch (t->k) {
      case Type::K::Var:
      case Type::K::Meta:
        return false;
      case Type::K::Con:
        for (auto& a : t->con_args)
          if (scan(a, pred)) return true;
        return false;
      case Type::K::Arrow: {
        for (auto& x : t->arrow_arg.assumptions)
          for (auto& y : x.atom.args)
            if (scan(y, pred)) return true;
        if (scan(t->arrow_arg.body, pred)) return true;
        return scan(t->arrow_res, pred);
      }
      case Type::K::Package: {
        for (auto& x : t->pkg_atoms)
          for (auto& y : x.atom.args)
            if (scan(y, pred)) return true;
        return scan(t->pkg_payload, pred);
      }
      case Type::K::AppV: {
        if (scan(t->appv_head, pred)) return true;
        for (auto& a : t->appv_args)
          if (scan(a, pred)) return true;
        return false;
      }
    }
    return false;
  }

  // Resolve only the head: follow meta solutions, normalise AppV heads.
  TypeRef shallow(const TypeRef& t) {
    if (t->k == Type::K::Meta) {
      MetaInfo& m = metas_[t->meta_id];
      if (!m.solution) return t;
      return shallow(m.solution);
    }
    if (t->k == Type::K::AppV) {
      TypeRef h = shallow(t->appv_head);
      if (h.get() != t->appv_head.get()) return shallow(t_apply(h, t->appv_args));
      return t;
    }
    return t;
  }

  void solve(uint64_t id, const TypeRef& t, SourceLoc loc) {
    TypeRef z = zonk(t);
    if (z->k == Type::K::Meta && z->meta_id == id) return;
    if (scan(z, [id](const TypeRef& x) { return x->k == Type::K::Meta && x->meta_id == id; }))
      fail(ErrClass::UnificationFailure, loc, "occurs check: cannot construct infinite type");
    int lvl = metas_[id].level;
    bool escapes = scan(z, [&](const TypeRef& x) {
      if (x->k != Type::K::Var || x->skolem_id == 0) return false;
      auto it = skolem_level_.find(x->skolem_id);
      return it != skolem_level_.end() && it->second > lvl;
    });
    if (escapes)
      fail(ErrClass::UnificationFailure, loc,
           "rigid type variable would escape its scope in " + show_type(z));
    metas_[id].solution = z;
  }

  [[noreturn]] void mismatch(const TypeRef& a, const TypeRef& b, SourceLoc loc) {
    fail(ErrClass::UnificationFailure, loc,
         "cannot match '" + show_type(zonk(a)) + "' with '" + show_type(zonk(b)) + "'");
  }

  void unify_susp(const ArgTy& x, const ArgTy& y, const TypeRef& ta, const TypeRef& tb,
                  SourceLoc loc) {
    if (x.binders.size() != y.binders.size() || x.assumptions.size() != y.assumptions.size())
      mismatch(ta, tb, loc);
    TypeSubst sx, sy;
    for (size_t i = 0; i < x.binders.size(); ++i) {
      TypeRef sk = fresh_skolem(x.binders[i].name, x.binders[i].kind);
      sx[x.binders[i].name] = sk;
      sy[y.binders[i].name] = sk;
    }
    for (size_t i = 0; i < x.assumptions.size(); ++i) {
      const SigAtom& pa = x.assumptions[i];
      const SigAtom& pb = y.assumptions[i];
      if (pa.mult != pb.mult || pa.atom.name != pb.atom.name ||
          pa.atom.args.size() != pb.atom.args.size())
        mismatch(ta, tb, loc);
      for (size_t j = 0; j < pa.atom.args.size(); ++j)
        unify(subst_type(pa.atom.args[j], sx), subst_type(pb.atom.args[j], sy), loc);
    }
    unify(subst_type(x.body, sx), subst_type(y.body, sy), loc);
  }

  std::vector<MetaInfo> metas_;
  uint64_t skolem_counter_ = 0;
  std::map<uint64_t, int> skolem_level_;
  int level_ = 0;
};

} // namespace lqc
