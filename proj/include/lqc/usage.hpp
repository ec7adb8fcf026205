#pragma once

#include <map>
#include <set>
#include <string>

#include "lqc/derivation.hpp"
#include "lqc/diag.hpp"

namespace lqc {

// ---------------------------------------------------------------------------
// Term-variable linearity. Usage is computed bottom-up; sibling usages
// combine with mult_add, argument and scrutinee usages are scaled by the
// arrow / case multiplicity. Case branches must agree on the usage of any
// linear variable bound outside; disagreements are tracked as conflicts and
// reported at the variable's binder.
// ---------------------------------------------------------------------------

namespace usage_detail {

struct U {
  UsageMap m;
  std::set<std::string> conflicts;
};

inline void scale(U& u, Mult pi) {
  if (pi == Mult::One) return;
  for (auto& [k, v] : u.m) v = Mult::Many;
}

inline void add(U& a, const U& b) {
  for (auto& [k, v] : b.m) {
    auto it = a.m.find(k);
    if (it == a.m.end()) a.m.emplace(k, v);
    else it->second = mult_add(it->second, v);
  }
  a.conflicts.insert(b.conflicts.begin(), b.conflicts.end());
}

// Additive merge across case branches.
inline U merge_branches(const std::vector<U>& branches) {
  U out;
  if (branches.empty()) return out;
  std::set<std::string> keys;
  for (auto& b : branches) {
    for (auto& [k, v] : b.m) keys.insert(k);
    out.conflicts.insert(b.conflicts.begin(), b.conflicts.end());
  }
  for (auto& k : keys) {
    bool agree = true;
    bool have = branches[0].m.count(k) > 0;
    Mult v = have ? branches[0].m.at(k) : Mult::One;
    for (auto& b : branches) {
      bool h = b.m.count(k) > 0;
      if (h != have || (h && b.m.at(k) != v)) agree = false;
    }
    if (agree && have) {
      out.m.emplace(k, v);
    } else if (!agree) {
      out.m.emplace(k, Mult::Many);
      out.conflicts.insert(k);
    }
  }
  return out;
}

inline void check_binder(U& u, const std::string& id, const std::string& display, Mult bind_mult,
                         SourceLoc loc) {
  auto it = u.m.find(id);
  if (bind_mult == Mult::One) {
    if (u.conflicts.count(id))
      fail(ErrClass::BranchUsageMismatch, loc,
           "case branches disagree on the use of linear variable '" + display + "'");
    if (it == u.m.end())
      fail(ErrClass::LinearVariableUnused, loc, "linear variable '" + display + "' is never used");
    if (it->second == Mult::Many)
      fail(ErrClass::LinearVariableOverused, loc,
           "linear variable '" + display + "' is used more than once");
  }
  if (it != u.m.end()) u.m.erase(it);
  u.conflicts.erase(id);
}

inline U walk(const DerivRef& d) {
  U u;
  switch (d->k) {
    case Deriv::K::Lit:
      break;
    case Deriv::K::Var:
      if (d->var_id.rfind("global:", 0) != 0) u.m.emplace(d->var_id, Mult::One);
      break;
    case Deriv::K::Abs: {
      u = walk(d->abs_body);
      check_binder(u, d->abs_binder_id, d->abs_binder_name, d->abs_mult, d->loc);
      break;
    }
    case Deriv::K::App: {
      u = walk(d->app_fn);
      U ua = walk(d->app_arg);
      scale(ua, d->app_mult);
      add(u, ua);
      break;
    }
    case Deriv::K::Pack:
      u = walk(d->pack_payload);
      break;
    case Deriv::K::Unpack: {
      u = walk(d->unpack_rhs);
      U ub = walk(d->unpack_body);
      check_binder(ub, d->unpack_binder_id, d->unpack_binder_name, Mult::One, d->loc);
      add(u, ub);
      break;
    }
    case Deriv::K::Let:
    case Deriv::K::LetSig: {
      U ur = walk(d->let_rhs);
      // A recursive (w) signed binding may mention itself in its own body.
      ur.m.erase(d->let_binder_id);
      scale(ur, d->let_mult);
      U ub = walk(d->let_body);
      check_binder(ub, d->let_binder_id, d->let_binder_name, d->let_mult, d->loc);
      add(u, ur);
      add(u, ub);
      break;
    }
    case Deriv::K::Case: {
      U us = walk(d->case_scrut);
      scale(us, d->case_mult);
      std::vector<U> bs;
      for (auto& alt : d->alts) {
        U ub = walk(alt.body);
        for (size_t i = 0; i < alt.binder_ids.size(); ++i)
          check_binder(ub, alt.binder_ids[i], alt.binder_names[i], alt.binder_mults[i],
                       alt.body->loc);
        bs.push_back(std::move(ub));
      }
      u = merge_branches(bs);
      add(u, us);
      break;
    }
  }
  d->usage = u.m;
  d->usage_conflicts = u.conflicts;
  return u;
}

} // namespace usage_detail

// Checks every binder of the derivation; residual usage at the top concerns
// only top-level names, which are unrestricted.
inline void usage_check(const TopDeriv& top) {
  usage_detail::walk(top.body);
}

} // namespace lqc
