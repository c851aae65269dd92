#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tcm {

// Error codes double as CLI exit-code classes: size_limit maps to exit 3,
// everything else to exit 2.
enum class Err {
  domain_mismatch,
  codomain_mismatch,
  not_parallel,
  size_limit,
  not_monic,
  parent_mismatch,
  unknown_object,
  unknown_arrow,
  unknown_variable,
  unknown_tuple,
  unknown_world,
  unknown_command,
  value_out_of_domain,
  cyclic_model,
  invalid_shape,
  not_a_cone,
  no_factorization,
  type_mismatch,
  multiple_free_vars,
  parse_error,
  validation,
};

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) { throw Error(code, what); }

// Enumeration guards. Exceeding a cap raises Err::size_limit rather than
// truncating silently.
struct Limits {
  std::size_t max_enum = 1'000'000;  // product/exponential/family enumeration cap
  std::size_t apex_bound = 3;        // candidate apex size for universality checks
};

// ---- canonical atom encodings ------------------------------------------
//
// Every element of every derived set is an atom string with a fixed shape:
//   tuples        "(a,b,c)"     empty tuple "()"
//   tagged sums   "L:a" / "R:a" / "<obj>:a" for indexed coproducts
//   quotients     "q:<minimal member atom>"
//   sieves        "{f,g}" (arrow ids, sorted)
//   set functions "[v1,v2]"    (values positional in the domain's order)
//   nat. families "{f=[..];g=[..]}" (sections positional, arrows sorted)
// Splitting respects nesting of (), {} and [].

std::vector<std::string> split_top(const std::string& body, char sep);

std::string tuple_atom(const std::vector<std::string>& parts);
std::vector<std::string> tuple_parts(const std::string& atom);

std::string bracket_atom(const std::vector<std::string>& parts);  // "[v1,v2]"
std::vector<std::string> bracket_parts(const std::string& atom);

std::string brace_atom(const std::vector<std::string>& parts, char sep = ',');
std::vector<std::string> brace_parts(const std::string& atom, char sep = ',');

std::string join(const std::vector<std::string>& parts, const std::string& sep);

}  // namespace tcm
