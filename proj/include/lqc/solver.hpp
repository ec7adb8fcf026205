#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lqc/constraint.hpp"
#include "lqc/diag.hpp"

namespace lqc {

// ---------------------------------------------------------------------------
// The guess-free constraint solver: U; D; L |-s C ~> L_out. U holds
// unrestricted givens, D the duplicable linear givens (only Linearly), L the
// ordinary linear givens. D and L are most-recent-first sequences; leftover
// subset checks compare evidence names, not just atoms, so an implication
// cannot launder its local assumption against an outer given of the same
// atom.
// ---------------------------------------------------------------------------

struct Given {
  Atom atom;
  std::string ev;
};

enum class EvSrc : uint8_t { U, D, L };

inline const char* ev_src_name(EvSrc s) { return s == EvSrc::U ? "U" : s == EvSrc::D ? "D" : "L"; }

struct EvidenceUse {
  EvSrc src;
  std::string ev;
};

using EvidenceMap = std::map<std::string, EvidenceUse>;  // site -> given

struct SolverOptions {
  // Regression knob for the ordering property: ATOM-ONE normally consumes
  // the most recent (frontmost) matching given. Tests may flip it to
  // oldest-first; the CLI never does.
  bool atom_one_oldest_first = false;
};

struct TraceLine {
  std::string rule;
  std::string detail;
  std::string l_before;
  std::string l_after;
};

struct SolveResult {
  std::vector<Given> leftover;
  EvidenceMap evidence;
  std::vector<TraceLine> trace;
  // Evidence names introduced per implication (by impl_id), in assumption
  // source order; the elaborator binds these names.
  std::map<std::string, std::vector<std::string>> impl_evs;
};

struct GivenContext {
  std::vector<Given> unrestricted;  // set; looked up by atom
  std::vector<Given> duplicable;    // most recent first
  std::vector<Given> linear;        // most recent first
};

namespace solver_detail {

inline std::string show_givens(const std::vector<Given>& gs) {
  std::string r = "[";
  for (size_t i = 0; i < gs.size(); ++i) {
    if (i) r += ", ";
    r += show_atom(gs[i].atom) + "#" + gs[i].ev;
  }
  return r + "]";
}

struct Solver {
  const SolverOptions opts;
  SolveResult out;
  std::vector<Atom> consumed;  // atoms paid out of L so far, for diagnostics
  uint64_t fresh_counter = 0;

  std::string fresh_ev(const std::string& impl_id, size_t idx) {
    if (impl_id.empty()) return "e" + std::to_string(fresh_counter++);
    return "g" + std::to_string(fresh_counter++);
  }

  void log(const std::string& rule, const std::string& detail, const std::vector<Given>& before,
           const std::vector<Given>& after) {
    out.trace.push_back(TraceLine{rule, detail, show_givens(before), show_givens(after)});
  }

  [[noreturn]] void not_in_scope(const Atom& q) {
    for (auto& c : consumed)
      if (atom_eq(c, q))
        fail(ErrClass::LinearOveruse, {},
             "linear constraint '" + show_atom(q) + "' has already been consumed");
    fail(ErrClass::NotInScope, {}, "no given constraint matches '" + show_atom(q) + "'");
  }

  // Fig 10b, reconstructed: exactly one rule can fire.
  std::vector<Given> solve_atomic(const std::vector<Given>& U, const std::vector<Given>& D,
                                  std::vector<Given> L, const SitedAtom& want) {
    const Atom& q = want.atom;
    auto find_u = [&]() -> const Given* {
      for (auto& g : U)
        if (atom_eq(g.atom, q)) return &g;
      return nullptr;
    };
    auto find_in = [&](const std::vector<Given>& v) -> std::optional<size_t> {
      if (opts.atom_one_oldest_first && &v == &L) {
        for (size_t i = v.size(); i-- > 0;)
          if (atom_eq(v[i].atom, q)) return i;
        return std::nullopt;
      }
      for (size_t i = 0; i < v.size(); ++i)
        if (atom_eq(v[i].atom, q)) return i;
      return std::nullopt;
    };

    const Given* u = find_u();
    std::optional<size_t> l_idx = find_in(L);
    std::optional<size_t> d_idx = find_in(D);

    if (u) {
      // ATOM-U applies only when q is absent from both linear contexts.
      if (l_idx || d_idx)
        fail(ErrClass::Ambiguous, {},
             "constraint '" + show_atom(q) +
                 "' is available both unrestrictedly and linearly; refusing to guess");
      record(want, EvSrc::U, u->ev);
      log("S-ATOM/ATOM-U", mult_prefix(want.mult) + show_atom(q) + "@" + want.site, L, L);
      return L;
    }
    if (want.mult == Mult::Many) {
      if (l_idx || d_idx)
        fail(ErrClass::LinearForMany, {},
             "cannot use a linear assumption of '" + show_atom(q) +
                 "' to satisfy it at multiplicity w");
      not_in_scope(q);
    }
    if (is_duplicable(q)) {
      if (d_idx) {
        record(want, EvSrc::D, D[*d_idx].ev);
        log("S-ATOM/ATOM-DUP", mult_prefix(want.mult) + show_atom(q) + "@" + want.site, L, L);
        return L;
      }
      not_in_scope(q);
    }
    if (l_idx) {
      std::vector<Given> before = L;
      record(want, EvSrc::L, L[*l_idx].ev);
      consumed.push_back(q);
      L.erase(L.begin() + static_cast<long>(*l_idx));
      log("S-ATOM/ATOM-ONE", mult_prefix(want.mult) + show_atom(q) + "@" + want.site, before, L);
      return L;
    }
    not_in_scope(q);
  }

  void record(const SitedAtom& want, EvSrc src, const std::string& ev) {
    if (!want.site.empty()) out.evidence.emplace(want.site, EvidenceUse{src, ev});
  }

  std::vector<Given> solve(const std::vector<Given>& U, const std::vector<Given>& D,
                           std::vector<Given> L, const WantedRef& c) {
    switch (c->k) {
      case Wanted::K::Simple: {
        // A leaf is the tensor of its sited atoms, threaded left to right.
        for (auto& a : c->atoms) L = solve_atomic(U, D, std::move(L), a);
        return L;
      }
      case Wanted::K::Tensor: {
        std::vector<Given> before = L;
        std::vector<Given> mid = solve(U, D, std::move(L), c->left);
        std::vector<Given> after = solve(U, D, std::move(mid), c->right);
        log("S-MULT", "", before, after);
        return after;
      }
      case Wanted::K::With: {
        std::vector<Given> l1 = solve(U, D, L, c->left);
        std::vector<Given> l2 = solve(U, D, L, c->right);
        if (!same_names(l1, l2)) {
          std::string diff = diff_atoms(l1, l2);
          fail(ErrClass::BranchMismatch, {},
               "case branches consume different linear constraints: " + diff);
        }
        log("S-ADD", "", L, l1);
        return l1;
      }
      case Wanted::K::Impl: {
        std::vector<std::string> names;
        std::vector<Given> u_new, d_new, l_new;
        for (size_t i = 0; i < c->impl_assumption.size(); ++i) {
          const SigAtom& a = c->impl_assumption[i];
          std::string ev = fresh_ev(c->impl_id, i);
          names.push_back(ev);
          if (a.mult == Mult::Many) u_new.push_back(Given{a.atom, ev});
          else if (is_duplicable(a.atom)) d_new.push_back(Given{a.atom, ev});
          else l_new.push_back(Given{a.atom, ev});
        }
        if (!c->impl_id.empty()) out.impl_evs[c->impl_id] = names;

        std::vector<Given> U2 = U;
        for (auto& g : u_new) {
          // Set semantics on atoms: the latest evidence shadows.
          bool replaced = false;
          for (auto& h : U2)
            if (atom_eq(h.atom, g.atom)) {
              h = g;
              replaced = true;
              break;
            }
          if (!replaced) U2.push_back(g);
        }

        if (c->impl_mult == Mult::One) {
          // S-IMPLONE: assumptions prepend, first-written atom frontmost.
          std::vector<Given> D2 = d_new;
          D2.insert(D2.end(), D.begin(), D.end());
          std::vector<Given> L2 = l_new;
          L2.insert(L2.end(), L.begin(), L.end());
          std::vector<Given> before = L;
          std::vector<Given> l_out = solve(U2, D2, std::move(L2), c->impl_body);
          for (auto& g : l_out)
            for (auto& mine : l_new)
              if (g.ev == mine.ev)
                fail(ErrClass::UnconsumedLinear, {},
                     "linear assumption '" + show_atom(mine.atom) +
                         "' is not consumed by the implication body");
          log("S-IMPLONE", "", before, l_out);
          return l_out;
        }
        // S-IMPLMANY: the body sees only the implication's own assumption.
        std::vector<Given> l_out = solve(U2, d_new, l_new, c->impl_body);
        if (!l_out.empty())
          fail(ErrClass::UnconsumedLinear,
               {}, "linear assumption '" + show_atom(l_out.front().atom) +
                       "' is not consumed by the unrestricted implication body");
        log("S-IMPLMANY", "", L, L);
        return L;
      }
    }
    internal_error("unhandled wanted kind in solver");
  }

  static bool same_names(const std::vector<Given>& a, const std::vector<Given>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
      if (a[i].ev != b[i].ev) return false;
    return true;
  }

  static std::string diff_atoms(const std::vector<Given>& a, const std::vector<Given>& b) {
    auto in = [](const std::vector<Given>& v, const std::string& ev) {
      for (auto& g : v)
        if (g.ev == ev) return true;
      return false;
    };
    std::string r;
    for (auto& g : a)
      if (!in(b, g.ev)) r += (r.empty() ? "" : ", ") + show_atom(g.atom);
    for (auto& g : b)
      if (!in(a, g.ev)) r += (r.empty() ? "" : ", ") + show_atom(g.atom);
    return r.empty() ? "(structural)" : r;
  }
};

} // namespace solver_detail

// Solves C against the given context. Throws CompileError on rejection.
inline SolveResult solve(const GivenContext& ctx, const WantedRef& c, SolverOptions opts = {}) {
  solver_detail::Solver s{opts};
  for (auto& g : ctx.duplicable)
    if (!is_duplicable(g.atom))
      internal_error("non-duplicable atom in D context: " + show_atom(g.atom));
  for (auto& g : ctx.linear)
    if (is_duplicable(g.atom))
      internal_error("duplicable atom in L context: " + show_atom(g.atom));
  s.out.leftover = s.solve(ctx.unrestricted, ctx.duplicable, ctx.linear, c);
  return std::move(s.out);
}

} // namespace lqc
