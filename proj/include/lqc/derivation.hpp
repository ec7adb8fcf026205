#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "lqc/ast.hpp"
#include "lqc/type.hpp"

namespace lqc {

// How a variable occurrence receives its constraint evidence after
// elaboration: not at all (plain locals, constructors, unconstrained
// builtins), or as an explicit evidence tuple (qualified builtins, user
// top-levels, signed lets, suspension-typed binders).
enum class EvCall : uint8_t { None, Tuple };

struct Deriv;
using DerivRef = std::shared_ptr<Deriv>;

// Usage of term variables, keyed by unique binder id; absent means unused.
using UsageMap = std::map<std::string, Mult>;

struct CaseAltD {
  std::string ctor;
  std::vector<std::string> binder_ids;      // "" for wildcards
  std::vector<std::string> binder_names;
  std::vector<TypeRef> binder_types;
  std::vector<Mult> binder_mults;           // case mult * field mult
  DerivRef body;
};

// One node per Fig-6 rule shape. The oracle produces these with all types
// resolved; constraint generation and elaboration consume them.
struct Deriv {
  enum class K : uint8_t { Var, Abs, App, Pack, Unpack, Let, LetSig, Case, Lit };
  K k;
  SourceLoc loc;
  TypeRef type;

  // Var (also data constructors and literals-adjacent builtins)
  std::string var_id;       // unique binder id or "global:<name>"
  std::string var_name;     // display name
  EvCall var_evcall = EvCall::None;
  std::vector<SigAtom> var_atoms;     // instantiated assumption, scheme order
  std::vector<TyBinder> var_binders;  // scheme binders (for dumps)
  std::vector<TypeRef> var_inst;      // instantiation per binder

  // Abs
  std::string abs_binder_id, abs_binder_name;
  ArgTy abs_arg;
  Mult abs_mult = Mult::Many;
  DerivRef abs_body;

  // App
  DerivRef app_fn, app_arg;
  Mult app_mult = Mult::Many;
  bool app_arg_susp = false;
  std::vector<TyBinder> app_susp_binders;
  std::vector<TypeRef> app_susp_skolems;
  std::vector<SigAtom> app_susp_atoms;  // instantiated at the skolems

  // Pack
  std::vector<TypeRef> pack_witness;
  std::vector<SigAtom> pack_atoms;  // package atoms at the witnesses
  TypeRef pack_pkg_type;
  DerivRef pack_payload;

  // Unpack
  std::vector<TypeRef> unpack_skolems;
  std::string unpack_binder_id, unpack_binder_name;
  TypeRef unpack_payload_ty;
  std::vector<SigAtom> unpack_atoms;  // package atoms at the skolems
  DerivRef unpack_rhs, unpack_body;

  // Let / LetSig
  Mult let_mult = Mult::One;
  std::string let_binder_id, let_binder_name;
  DerivRef let_rhs, let_body;
  Scheme letsig_scheme;                          // resolved
  std::vector<TypeRef> letsig_skolems;
  std::vector<SigAtom> letsig_atoms_skolemized;  // assumption at rhs skolems

  // Case
  Mult case_mult = Mult::One;
  DerivRef case_scrut;
  std::vector<CaseAltD> alts;

  // Lit
  long long lit = 0;

  // Filled by usage_check.
  UsageMap usage;
  std::set<std::string> usage_conflicts;
};

inline DerivRef mk_deriv(Deriv::K k, SourceLoc loc) {
  auto d = std::make_shared<Deriv>();
  d->k = k;
  d->loc = loc;
  return d;
}

// A checked top-level binding.
struct TopDeriv {
  std::string name;
  bool is_main = false;
  Scheme scheme;                      // resolved; trivial for main
  std::vector<TypeRef> sig_skolems;   // skolemised scheme binders
  std::vector<SigAtom> sig_atoms;     // assumption at those skolems
  DerivRef body;                      // includes Abs nodes for params
  SourceLoc loc;
};

} // namespace lqc
