#include <iostream>

#include "CLI11.hpp"
#include "tcm/commands.hpp"

namespace {

// exit codes: 0 success, 2 validation/parse failure, 3 enumeration cap
int exit_code_for(tcm::Err code) { return code == tcm::Err::size_limit ? 3 : 2; }

struct Invocation {
  std::string command;
  std::vector<std::string> files;
  tcm::CommandArgs args;
};

void add_common(CLI::App* cmd, Invocation& inv) {
  cmd->add_option("files", inv.files, "JSON object files to load")->expected(-1);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite topos engine for causal models"};
  app.require_subcommand(1);

  Invocation inv;
  std::size_t max_enum = tcm::Limits{}.max_enum;
  std::size_t apex_bound = tcm::Limits{}.apex_bound;
  app.add_option("--max-enum", max_enum, "enumeration cap for products/exponentials");
  app.add_option("--apex-bound", apex_bound, "candidate apex size for universality checks");
  app.add_flag("--timing", inv.args.timing, "include timing_ms in the report");

  auto opt = [&](CLI::App* cmd, const std::string& name, const std::string& help, bool required = true) {
    auto* o = cmd->add_option_function<std::string>(
        "--" + name, [&inv, name](const std::string& v) { inv.args.values[name] = v; }, help);
    if (required) o->required();
    return o;
  };

  auto* limit = app.add_subcommand("limit", "limit of a set-valued diagram");
  opt(limit, "diagram", "diagram name");
  add_common(limit, inv);

  auto* colimit = app.add_subcommand("colimit", "colimit of a set-valued diagram");
  opt(colimit, "diagram", "diagram name");
  add_common(colimit, inv);

  auto* intervene = app.add_subcommand("intervene", "apply do(X=x) to a model");
  opt(intervene, "model", "scm name");
  opt(intervene, "do", "intervention literal, e.g. B=1,C=0", false);
  add_common(intervene, inv);

  auto* outcome = app.add_subcommand("outcome", "potential outcome Y_x(u)");
  opt(outcome, "model", "scm name");
  opt(outcome, "var", "outcome variable");
  opt(outcome, "do", "intervention literal", false);
  opt(outcome, "u", "exogenous tuple, e.g. (1)");
  add_common(outcome, inv);

  auto* classify = app.add_subcommand("classify", "classify a submodel or subgraph");
  opt(classify, "model", "scm name", false);
  opt(classify, "do", "intervention literal", false);
  opt(classify, "graph", "graph name", false);
  opt(classify, "vertices", "subgraph vertices, comma separated", false);
  opt(classify, "edges", "subgraph edges, comma separated", false);
  add_common(classify, inv);

  auto* force = app.add_subcommand("force", "Kripke-Joyal forcing of a formula");
  opt(force, "formula", "formula name");
  opt(force, "stage", "base object of the representable stage");
  opt(force, "elem", "element of the type's stalk at the stage");
  opt(force, "topology", "topology name for the site clauses", false);
  add_common(force, inv);

  auto* omega_cmd = app.add_subcommand("omega", "subobject classifier of a base category");
  opt(omega_cmd, "base", "category name or builtin (interval, one, graph, ...)");
  add_common(omega_cmd, inv);

  auto* sheaf = app.add_subcommand("sheaf-check", "matching-family sheaf condition");
  opt(sheaf, "presheaf", "presheaf name");
  opt(sheaf, "topology", "topology name");
  add_common(sheaf, inv);

  auto* axiom = app.add_subcommand("axiom-check", "run the invariant suite on an object");
  opt(axiom, "object", "loaded object name");
  add_common(axiom, inv);

  CLI11_PARSE(app, argc, argv);
  inv.command = app.get_subcommands().front()->get_name();
  inv.args.limits.max_enum = max_enum;
  inv.args.limits.apex_bound = apex_bound;

  try {
    tcm::Workspace ws = tcm::load_workspace(inv.files);
    tcm::Report rep = tcm::run_command(inv.command, inv.args, ws);
    std::cout << rep.to_json().dump(2) << "\n";
    return rep.failed ? 2 : 0;
  } catch (const tcm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
