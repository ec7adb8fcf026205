#pragma once

#include <map>
#include <string>
#include <vector>

#include "lqc/parser.hpp"

namespace lqc {

// How a prelude name is realised at runtime.
enum class BuiltinImpl : uint8_t {
  Runtime,   // has a VM implementation
  Abstract,  // signature only (useC, giveC, const); evaluation rejects it
  Ctor,      // data constructor
};

struct PreludeEntry {
  Scheme scheme;
  BuiltinImpl impl = BuiltinImpl::Runtime;
  std::vector<Mult> ctor_field_mults;  // for constructors
  std::string source_text;             // scheme as written, for round-trip tests
};

struct SignatureTable {
  std::map<std::string, PreludeEntry> entries;

  const PreludeEntry* find(const std::string& name) const {
    auto it = entries.find(name);
    return it == entries.end() ? nullptr : &it->second;
  }
};

namespace detail {

inline void add_sig(SignatureTable& t, const std::string& name, const std::string& text,
                    BuiltinImpl impl) {
  PreludeEntry e;
  e.scheme = parse_scheme_text(text);
  e.impl = impl;
  e.source_text = text;
  t.entries.emplace(name, std::move(e));
}

inline void add_ctor(SignatureTable& t, const std::string& name, const std::string& text,
                     std::vector<Mult> field_mults) {
  PreludeEntry e;
  e.scheme = parse_scheme_text(text);
  e.impl = BuiltinImpl::Ctor;
  e.ctor_field_mults = std::move(field_mults);
  e.source_text = text;
  t.entries.emplace(name, std::move(e));
}

} // namespace detail

// The signature table of Fig 1b, the reference/array API, the Linearly
// combinator, plus the abstract test-only names. Array constraints are
// written with the RW synonym; the parser expands it before storage.
inline const SignatureTable& prelude() {
  static const SignatureTable table = [] {
    SignatureTable t;
    using detail::add_ctor;
    using detail::add_sig;

    // Data constructors. Pair fields are linear, Ur's is unrestricted.
    add_ctor(t, "Unit", "()", {});
    add_ctor(t, "True", "Bool", {});
    add_ctor(t, "False", "Bool", {});
    add_ctor(t, "Ur", "forall a. a -> Ur a", {Mult::Many});
    add_ctor(t, "Pair", "forall a b. a -o b -o (a, b)", {Mult::One, Mult::One});

    // Integer operators.
    for (const char* op : {"+", "-", "*"})
      add_sig(t, op, "Int -> Int -> Int", BuiltinImpl::Runtime);
    for (const char* op : {"<", "<=", ">", ">=", "=="})
      add_sig(t, op, "Int -> Int -> Bool", BuiltinImpl::Runtime);

    // Scoping the initial Linearly assumption.
    add_sig(t, "linearly", "forall r. (Linearly =o Ur r) -o Ur r", BuiltinImpl::Runtime);

    // Unrestricted arrays guarded by linear capabilities.
    add_sig(t, "new", "forall a. Linearly =o Int -> (exists n. UArray a n * (RW n))",
            BuiltinImpl::Runtime);
    add_sig(t, "write",
            "forall a n. (RW n) =o UArray a n -> Int -> a -> (exists . () * (RW n))",
            BuiltinImpl::Runtime);
    add_sig(t, "read", "forall a n. Read n =o UArray a n -> Int -> (exists . Ur a * (Read n))",
            BuiltinImpl::Runtime);
    add_sig(t, "free", "forall a n. (RW n) =o UArray a n -> ()", BuiltinImpl::Runtime);

    // Atomic references.
    add_sig(t, "newRef", "forall a. Linearly =o (exists n. AtomRef a n * (RW n))",
            BuiltinImpl::Runtime);
    add_sig(t, "readRef", "forall a n. Read n =o AtomRef a n -> (exists . Ur a * (Read n))",
            BuiltinImpl::Runtime);
    add_sig(t, "writeRef",
            "forall a n. (RW n) =o AtomRef a n -> a -> (exists . () * (RW n))",
            BuiltinImpl::Runtime);
    add_sig(t, "freeRef", "forall a n. (RW n) =o AtomRef a n -> ()", BuiltinImpl::Runtime);

    // Generalised arrays, borrowing and slices.
    add_sig(t, "newPArray", "forall a. Linearly =o Int -> (exists n. PArray a n * (RW n))",
            BuiltinImpl::Runtime);
    add_sig(t, "length", "forall a n. PArray a n -> Int", BuiltinImpl::Runtime);
    add_sig(t, "lend",
            "forall a n r. Read n =o PArray a n -> Int -> "
            "(forall p. Read p =o a p -> (exists . r * (Read p))) -o (exists . r * (Read n))",
            BuiltinImpl::Runtime);
    add_sig(t, "lendMut",
            "forall a n r. (RW n) =o PArray a n -> Int -> "
            "(forall p. (RW p) =o a p -> (exists . r * (RW p))) -o (exists . r * (RW n))",
            BuiltinImpl::Runtime);
    add_sig(t, "split",
            "forall a n. (RW n) =o PArray a n -> Int -> "
            "(exists l r. Ur (PArray a l, PArray a r) * (RW l, RW r, Slices n l r))",
            BuiltinImpl::Runtime);
    add_sig(t, "join",
            "forall a n l r. (Slices n l r, RW r, RW l) =o PArray a l -> PArray a r -> "
            "(exists . Ur (PArray a n) * (RW n))",
            BuiltinImpl::Runtime);

    // Corpus drivers: a VM PRNG (seeded by --seed) and array printing.
    add_sig(t, "randInt", "Int -> Int", BuiltinImpl::Runtime);
    add_sig(t, "printArr", "forall n. Read n =o UArray Int n -> (exists . () * (Read n))",
            BuiltinImpl::Runtime);

    // Abstract test signatures (no runtime).
    add_sig(t, "useC", "C =o Int", BuiltinImpl::Abstract);
    add_sig(t, "giveC", "(C => Int) -o Int", BuiltinImpl::Abstract);
    add_sig(t, "const", "forall a b. a -o b -> a", BuiltinImpl::Abstract);

    return t;
  }();
  return table;
}

} // namespace lqc
