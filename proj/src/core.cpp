#include "tcm/core.hpp"

#include <sstream>

namespace tcm {

std::vector<std::string> split_top(const std::string& body, char sep) {
  std::vector<std::string> out;
  if (body.empty()) return out;
  int depth = 0;
  std::string cur;
  for (char c : body) {
    if (c == '(' || c == '{' || c == '[') ++depth;
    if (c == ')' || c == '}' || c == ']') --depth;
    if (c == sep && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::ostringstream os;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) os << sep;
    os << parts[i];
  }
  return os.str();
}

static std::string wrap(char open, char close, const std::vector<std::string>& parts, char sep) {
  std::string s(1, open);
  s += join(parts, std::string(1, sep));
  s += close;
  return s;
}

static std::vector<std::string> unwrap(char open, char close, const std::string& atom, char sep) {
  if (atom.size() < 2 || atom.front() != open || atom.back() != close)
    fail(Err::parse_error, "malformed atom: " + atom);
  return split_top(atom.substr(1, atom.size() - 2), sep);
}

std::string tuple_atom(const std::vector<std::string>& parts) { return wrap('(', ')', parts, ','); }
std::vector<std::string> tuple_parts(const std::string& atom) { return unwrap('(', ')', atom, ','); }

std::string bracket_atom(const std::vector<std::string>& parts) { return wrap('[', ']', parts, ','); }
std::vector<std::string> bracket_parts(const std::string& atom) { return unwrap('[', ']', atom, ','); }

std::string brace_atom(const std::vector<std::string>& parts, char sep) { return wrap('{', '}', parts, sep); }
std::vector<std::string> brace_parts(const std::string& atom, char sep) { return unwrap('{', '}', atom, sep); }

}  // namespace tcm
