#pragma once

#include "tcm/json_io.hpp"

namespace tcm {

// Command arguments as parsed from the CLI; values are plain strings
// ("do" uses the literal form "B=1,C=0").
struct CommandArgs {
  std::map<std::string, std::string> values;
  Limits limits;
  bool timing = false;

  bool has(const std::string& key) const { return values.count(key) > 0; }
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
};

Intervention parse_do(const std::string& literal);

// Dispatch: limit, colimit, intervene, outcome, classify, force, omega,
// sheaf-check, axiom-check.
Report run_command(const std::string& command, const CommandArgs& args, const Workspace& ws);

}  // namespace tcm
