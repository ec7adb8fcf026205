#pragma once

#include <string>
#include <vector>

#include "lqc/constraint.hpp"
#include "lqc/derivation.hpp"
#include "lqc/diag.hpp"

namespace lqc {

// ---------------------------------------------------------------------------
// Syntax-directed constraint generation over typing derivations. Each
// Simple leaf names its atom occurrences with a site identifier derived
// from the tree path, so generation is deterministic and the solver's
// evidence assignment can refer back to individual occurrences.
// ---------------------------------------------------------------------------

namespace congen_detail {

struct Gen {
  std::string prefix;

  std::string site(const std::vector<int>& path, size_t atom_idx) const {
    std::string s = prefix + "/";
    for (size_t i = 0; i < path.size(); ++i) {
      if (i) s += '.';
      s += std::to_string(path[i]);
    }
    s += ':' + std::to_string(atom_idx);
    return s;
  }

  WantedRef leaf(const std::vector<SigAtom>& atoms, const std::vector<int>& path) const {
    std::vector<SitedAtom> sited;
    sited.reserve(atoms.size());
    for (size_t i = 0; i < atoms.size(); ++i)
      sited.push_back(SitedAtom{atoms[i].mult, atoms[i].atom, site(path, i)});
    return c_simple(std::move(sited));
  }

  WantedRef walk(const DerivRef& d, std::vector<int>& path) const {
    switch (d->k) {
      case Deriv::K::Lit:
        return c_empty();
      case Deriv::K::Var:
        // G-VAR: Q[tau/a] at this occurrence.
        return leaf(d->var_atoms, path);
      case Deriv::K::Abs:
        // G-ABS: the body's constraint passes through.
        return child(d->abs_body, path, 0);
      case Deriv::K::App: {
        // G-APP: C1 (x) pi*C2; a constrained argument type wraps the
        // argument side in an implication at the arrow's multiplicity.
        WantedRef c1 = child(d->app_fn, path, 0);
        WantedRef c2 = child(d->app_arg, path, 1);
        if (d->app_arg_susp)
          return c_tensor(c1, c_impl(d->app_mult, d->app_susp_atoms, c2));
        return c_tensor(c1, c_scale(d->app_mult, c2));
      }
      case Deriv::K::Pack: {
        // G-PACK: C (x) Q[nu/a].
        WantedRef c = child(d->pack_payload, path, 0);
        path.push_back(1);
        WantedRef q = leaf(d->pack_atoms, path);
        path.pop_back();
        return c_tensor(c, q);
      }
      case Deriv::K::Unpack: {
        // G-UNPACK: C1 (x) 1*(Q1 => C2).
        WantedRef c1 = child(d->unpack_rhs, path, 0);
        WantedRef c2 = child(d->unpack_body, path, 1);
        return c_tensor(c1, c_impl(Mult::One, d->unpack_atoms, c2));
      }
      case Deriv::K::Let: {
        // G-LET: pi*C1 (x) C2 (no implication: no let-generalisation).
        WantedRef c1 = child(d->let_rhs, path, 0);
        WantedRef c2 = child(d->let_body, path, 1);
        return c_tensor(c_scale(d->let_mult, c1), c2);
      }
      case Deriv::K::LetSig: {
        // G-LETSIG: C2 (x) pi*(Q => C1).
        WantedRef c1 = child(d->let_rhs, path, 0);
        WantedRef c2 = child(d->let_body, path, 1);
        return c_tensor(c2, c_impl(d->let_mult, d->letsig_atoms_skolemized, c1));
      }
      case Deriv::K::Case: {
        // G-CASE: pi*C (x) (&_i C_i), & kept binary and right-nested.
        WantedRef cs = child(d->case_scrut, path, 0);
        if (d->alts.empty()) internal_error("empty case reached constraint generation");
        WantedRef acc;
        for (size_t i = d->alts.size(); i-- > 0;) {
          path.push_back(static_cast<int>(i) + 1);
          WantedRef ci = walk(d->alts[i].body, path);
          path.pop_back();
          acc = acc ? c_with(ci, acc) : ci;
        }
        return c_tensor(c_scale(d->case_mult, cs), acc);
      }
    }
    internal_error("unhandled derivation kind in constraint generation");
  }

  WantedRef child(const DerivRef& d, std::vector<int>& path, int idx) const {
    path.push_back(idx);
    WantedRef c = walk(d, path);
    path.pop_back();
    return c;
  }
};

} // namespace congen_detail

// The body constraint of one binding.
inline WantedRef generate(const TopDeriv& top) {
  congen_detail::Gen g{top.name};
  std::vector<int> path;
  return g.walk(top.body, path);
}

// The top-level obligation: w*(Q => C) for signed bindings, bare C for main.
inline WantedRef top_level_obligation(const TopDeriv& top, const WantedRef& generated) {
  if (top.is_main) return generated;
  return c_impl(Mult::Many, top.sig_atoms, generated);
}

} // namespace lqc
