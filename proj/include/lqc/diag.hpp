#pragma once

#include <stdexcept>
#include <string>

#include "lqc/ast.hpp"

namespace lqc {

// Error classes surfaced by the pipeline. The names are stable: the corpus
// verdict table and the acceptance suite match on them.
enum class ErrClass {
  ParseError,
  UnboundVariable,
  UnificationFailure,
  AmbiguousInstantiation,
  MissingSignature,
  LinearVariableUnused,
  LinearVariableOverused,
  BranchUsageMismatch,
  BranchMismatch,
  UnconsumedLinear,
  NotInScope,
  Ambiguous,
  LinearForMany,
  LinearOveruse,
  LintUnbound,
  LintType,
  LintLinearity,
  Internal,
};

inline const char* err_class_name(ErrClass c) {
  switch (c) {
    case ErrClass::ParseError: return "ParseError";
    case ErrClass::UnboundVariable: return "UnboundVariable";
    case ErrClass::UnificationFailure: return "UnificationFailure";
    case ErrClass::AmbiguousInstantiation: return "AmbiguousInstantiation";
    case ErrClass::MissingSignature: return "MissingSignature";
    case ErrClass::LinearVariableUnused: return "LinearVariableUnused";
    case ErrClass::LinearVariableOverused: return "LinearVariableOverused";
    case ErrClass::BranchUsageMismatch: return "BranchUsageMismatch";
    case ErrClass::BranchMismatch: return "BranchMismatch";
    case ErrClass::UnconsumedLinear: return "UnconsumedLinear";
    case ErrClass::NotInScope: return "NotInScope";
    case ErrClass::Ambiguous: return "Ambiguous";
    case ErrClass::LinearForMany: return "LinearForMany";
    case ErrClass::LinearOveruse: return "LinearOveruse";
    case ErrClass::LintUnbound: return "LintUnbound";
    case ErrClass::LintType: return "LintType";
    case ErrClass::LintLinearity: return "LintLinearity";
    case ErrClass::Internal: return "Internal";
  }
  return "Unknown";
}

struct CompileError : std::runtime_error {
  ErrClass cls;
  SourceLoc loc;
  CompileError(ErrClass c, SourceLoc l, const std::string& msg)
      : std::runtime_error(msg), cls(c), loc(l) {}
};

[[noreturn]] inline void fail(ErrClass c, SourceLoc loc, const std::string& msg) {
  throw CompileError(c, loc, msg);
}

// Internal invariant failures map to exit code 2, never 1.
[[noreturn]] inline void internal_error(const std::string& msg) {
  throw CompileError(ErrClass::Internal, {}, msg);
}

} // namespace lqc
