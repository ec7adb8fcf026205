#pragma once

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "lqc/multiplicity.hpp"
#include "lqc/type.hpp"

namespace lqc {

// The duplicable set D. Only Linearly lives there in the shipped domain,
// but everything downstream goes through this predicate.
inline bool is_duplicable(const Atom& a) { return a.name == "Linearly" && a.args.empty(); }

inline Atom atom_linearly() { return Atom{"Linearly", {}}; }

// ---------------------------------------------------------------------------
// Simple constraints Q = (U, L): a set of unrestricted atoms and a multiset
// of linear atoms. Both components are kept canonically sorted so the
// quotient equalities (commutativity, associativity, unit, w*q ⊗ w*q = w*q)
// are plain structural equality.
// ---------------------------------------------------------------------------

struct SimpleConstraint {
  std::vector<Atom> unrestricted;  // sorted, deduplicated
  std::vector<Atom> linear;        // sorted multiset

  bool empty() const { return unrestricted.empty() && linear.empty(); }
};

inline void sort_atoms(std::vector<Atom>& v) {
  std::sort(v.begin(), v.end(), [](const Atom& a, const Atom& b) { return atom_cmp(a, b) < 0; });
}

inline void dedup_atoms(std::vector<Atom>& v) {
  v.erase(std::unique(v.begin(), v.end(), atom_eq), v.end());
}

inline SimpleConstraint q_make(std::vector<Atom> unrestricted, std::vector<Atom> linear) {
  sort_atoms(unrestricted);
  dedup_atoms(unrestricted);
  sort_atoms(linear);
  return SimpleConstraint{std::move(unrestricted), std::move(linear)};
}

inline SimpleConstraint q_empty() { return SimpleConstraint{}; }

inline SimpleConstraint q_atom(Mult m, Atom a) {
  if (m == Mult::One) return q_make({}, {std::move(a)});
  return q_make({std::move(a)}, {});
}

inline SimpleConstraint q_of_sig_atoms(const std::vector<SigAtom>& as) {
  std::vector<Atom> u, l;
  for (auto& a : as) (a.mult == Mult::One ? l : u).push_back(a.atom);
  return q_make(std::move(u), std::move(l));
}

inline SimpleConstraint q_tensor(const SimpleConstraint& a, const SimpleConstraint& b) {
  std::vector<Atom> u = a.unrestricted, l = a.linear;
  u.insert(u.end(), b.unrestricted.begin(), b.unrestricted.end());
  l.insert(l.end(), b.linear.begin(), b.linear.end());
  return q_make(std::move(u), std::move(l));
}

inline SimpleConstraint q_scale(Mult m, const SimpleConstraint& q) {
  if (m == Mult::One) return q;
  // w * (U, L) = (U u L, 0): every linear atom becomes unrestricted.
  std::vector<Atom> u = q.unrestricted;
  u.insert(u.end(), q.linear.begin(), q.linear.end());
  return q_make(std::move(u), {});
}

inline bool q_eq(const SimpleConstraint& a, const SimpleConstraint& b) {
  auto eq = [](const std::vector<Atom>& x, const std::vector<Atom>& y) {
    if (x.size() != y.size()) return false;
    for (size_t i = 0; i < x.size(); ++i)
      if (!atom_eq(x[i], y[i])) return false;
    return true;
  };
  return eq(a.unrestricted, b.unrestricted) && eq(a.linear, b.linear);
}

// Q in D: every linear atom duplicable.
inline bool is_duplicable_q(const SimpleConstraint& q) {
  for (auto& a : q.linear)
    if (!is_duplicable(a)) return false;
  return true;
}

inline std::string show_q(const SimpleConstraint& q) {
  std::string r = "{U: [";
  for (size_t i = 0; i < q.unrestricted.size(); ++i) {
    if (i) r += ", ";
    r += show_atom(q.unrestricted[i]);
  }
  r += "], L: [";
  for (size_t i = 0; i < q.linear.size(); ++i) {
    if (i) r += ", ";
    r += show_atom(q.linear[i]);
  }
  return r + "]}";
}

// ---------------------------------------------------------------------------
// Wanted constraints C. Simple leaves keep their atoms as an ordered list of
// sited occurrences: the order fixes the evidence-tuple layout, the site
// names let the solver report which occurrence each given pays for.
// ---------------------------------------------------------------------------

struct SitedAtom {
  Mult mult = Mult::One;
  Atom atom;
  std::string site;
};

struct Wanted;
using WantedRef = std::shared_ptr<const Wanted>;

struct Wanted {
  enum class K : uint8_t { Simple, Tensor, With, Impl };
  K k = K::Simple;

  std::vector<SitedAtom> atoms;  // Simple

  WantedRef left, right;  // Tensor / With

  Mult impl_mult = Mult::One;           // Impl
  std::vector<SigAtom> impl_assumption; // ordered as written; first atom = frontmost
  WantedRef impl_body;
};

inline WantedRef c_simple(std::vector<SitedAtom> atoms) {
  auto w = std::make_shared<Wanted>();
  w->k = Wanted::K::Simple;
  w->atoms = std::move(atoms);
  return w;
}

inline WantedRef c_empty() { return c_simple({}); }

inline WantedRef c_tensor(WantedRef a, WantedRef b) {
  auto w = std::make_shared<Wanted>();
  w->k = Wanted::K::Tensor;
  w->left = std::move(a);
  w->right = std::move(b);
  return w;
}

inline WantedRef c_with(WantedRef a, WantedRef b) {
  auto w = std::make_shared<Wanted>();
  w->k = Wanted::K::With;
  w->left = std::move(a);
  w->right = std::move(b);
  return w;
}

inline WantedRef c_impl(Mult m, std::vector<SigAtom> assumption, WantedRef body) {
  auto w = std::make_shared<Wanted>();
  w->k = Wanted::K::Impl;
  w->impl_mult = m;
  w->impl_assumption = std::move(assumption);
  w->impl_body = std::move(body);
  return w;
}

// Scaling of wanted constraints, by recursion:
//   pi*(C1 (x) C2) = pi*C1 (x) pi*C2
//   1*(C1 & C2)    = C1 & C2
//   w*(C1 & C2)    = w*C1 (x) w*C2
//   pi*(rho*(Q => C)) = (pi*rho)*(Q => C)
// On simple leaves the per-atom multiplicities are multiplied; site names
// are preserved.
inline WantedRef c_scale(Mult m, const WantedRef& c) {
  if (m == Mult::One) return c;
  switch (c->k) {
    case Wanted::K::Simple: {
      std::vector<SitedAtom> atoms = c->atoms;
      for (auto& a : atoms) a.mult = mult_mul(m, a.mult);
      return c_simple(std::move(atoms));
    }
    case Wanted::K::Tensor:
      return c_tensor(c_scale(m, c->left), c_scale(m, c->right));
    case Wanted::K::With:
      return c_tensor(c_scale(m, c->left), c_scale(m, c->right));
    case Wanted::K::Impl:
      return c_impl(mult_mul(m, c->impl_mult), c->impl_assumption, c->impl_body);
  }
  return c;
}

inline bool wanted_eq(const WantedRef& a, const WantedRef& b) {
  if (a->k != b->k) return false;
  switch (a->k) {
    case Wanted::K::Simple: {
      if (a->atoms.size() != b->atoms.size()) return false;
      for (size_t i = 0; i < a->atoms.size(); ++i) {
        if (a->atoms[i].mult != b->atoms[i].mult) return false;
        if (!atom_eq(a->atoms[i].atom, b->atoms[i].atom)) return false;
        if (a->atoms[i].site != b->atoms[i].site) return false;
      }
      return true;
    }
    case Wanted::K::Tensor:
    case Wanted::K::With:
      return wanted_eq(a->left, b->left) && wanted_eq(a->right, b->right);
    case Wanted::K::Impl: {
      if (a->impl_mult != b->impl_mult) return false;
      if (a->impl_assumption.size() != b->impl_assumption.size()) return false;
      for (size_t i = 0; i < a->impl_assumption.size(); ++i) {
        if (a->impl_assumption[i].mult != b->impl_assumption[i].mult) return false;
        if (!atom_eq(a->impl_assumption[i].atom, b->impl_assumption[i].atom)) return false;
      }
      return wanted_eq(a->impl_body, b->impl_body);
    }
  }
  return false;
}

// Parenthesised tree rendering: the canonical text form for dumps.
inline std::string show_wanted(const WantedRef& c) {
  switch (c->k) {
    case Wanted::K::Simple: {
      if (c->atoms.empty()) return "eps";
      std::string r;
      for (size_t i = 0; i < c->atoms.size(); ++i) {
        if (i) r += " (x) ";
        r += mult_prefix(c->atoms[i].mult) + show_atom(c->atoms[i].atom);
        if (!c->atoms[i].site.empty()) r += "@" + c->atoms[i].site;
      }
      return c->atoms.size() > 1 ? "(" + r + ")" : r;
    }
    case Wanted::K::Tensor:
      return "(" + show_wanted(c->left) + " (x) " + show_wanted(c->right) + ")";
    case Wanted::K::With:
      return "(" + show_wanted(c->left) + " & " + show_wanted(c->right) + ")";
    case Wanted::K::Impl: {
      std::string r = "(" + mult_prefix(c->impl_mult) + "(";
      for (size_t i = 0; i < c->impl_assumption.size(); ++i) {
        if (i) r += ", ";
        r += show_sig_atom(c->impl_assumption[i]);
      }
      r += " => " + show_wanted(c->impl_body) + "))";
      return r;
    }
  }
  return "?";
}

// Leaves of a wanted, left to right; used by tests and dumps.
inline void collect_sited_atoms(const WantedRef& c, std::vector<SitedAtom>& out) {
  switch (c->k) {
    case Wanted::K::Simple:
      out.insert(out.end(), c->atoms.begin(), c->atoms.end());
      return;
    case Wanted::K::Tensor:
    case Wanted::K::With:
      collect_sited_atoms(c->left, out);
      collect_sited_atoms(c->right, out);
      return;
    case Wanted::K::Impl:
      collect_sited_atoms(c->impl_body, out);
      return;
  }
}

} // namespace lqc
