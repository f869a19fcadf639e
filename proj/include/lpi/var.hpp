#pragma once

#include <string>
#include <tuple>

namespace lpi {

// Input variables describe the program state before a transition, output
// variables the state after it. Auxiliaries are renamed intermediate copies
// introduced by formula composition; markers are the booleans attached to
// disjunctions during optimization.
enum class VarRole { Input, Output, Auxiliary, Marker };

inline const char* role_name(VarRole r) {
  switch (r) {
    case VarRole::Input: return "in";
    case VarRole::Output: return "out";
    case VarRole::Auxiliary: return "aux";
    default: return "marker";
  }
}

struct VarId {
  std::string base;
  std::string ns;  // empty for the unprefixed copy
  VarRole role = VarRole::Input;

  friend bool operator==(const VarId& a, const VarId& b) {
    return a.base == b.base && a.ns == b.ns && a.role == b.role;
  }
  friend bool operator!=(const VarId& a, const VarId& b) { return !(a == b); }
  friend bool operator<(const VarId& a, const VarId& b) {
    if (a.base != b.base) return a.base < b.base;
    if (a.ns != b.ns) return a.ns < b.ns;
    return a.role < b.role;
  }

  std::string str() const {
    std::string s = base;
    if (role == VarRole::Output) s += "'";
    if (!ns.empty()) s += "@" + ns;
    return s;
  }
};

inline VarId in_var(std::string base) { return {std::move(base), "", VarRole::Input}; }
inline VarId out_var(std::string base) { return {std::move(base), "", VarRole::Output}; }
inline VarId aux_var(std::string base, std::string ns) {
  return {std::move(base), std::move(ns), VarRole::Auxiliary};
}
inline VarId marker_var(std::string base) { return {std::move(base), "", VarRole::Marker}; }

}  // namespace lpi
