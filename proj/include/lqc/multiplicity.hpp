#pragma once

#include <cstdint>
#include <string>

namespace lqc {

// Usage annotations: 1 (linear, exactly once) or w (unrestricted).
enum class Mult : uint8_t { One, Many };

inline Mult mult_add(Mult, Mult) {
  // pi + rho = w for every pair: any sum means "more than once".
  return Mult::Many;
}

inline Mult mult_mul(Mult a, Mult b) {
  return a == Mult::One ? b : Mult::Many;
}

inline const char* mult_name(Mult m) { return m == Mult::One ? "1" : "w"; }

inline std::string mult_prefix(Mult m) {
  return m == Mult::One ? "1*" : "w*";
}

} // namespace lqc
