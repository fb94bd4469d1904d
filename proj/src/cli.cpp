#include "minimod/cli.hpp"

#include "minimod/desugar.hpp"
#include "minimod/eval.hpp"
#include "minimod/mod_typing.hpp"
#include "minimod/printer.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <sstream>

namespace minimod {

namespace {

struct Config {
  std::string command;
  std::string input;
  std::string print_mode = "aliases";
  std::string eliminate;
  std::string via = "local";
  bool no_color = false;
};

bool read_file(const std::string &path, std::string &text) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  text = ss.str();
  return true;
}

PrintMode parse_mode(const std::string &m) {
  if (m == "plain") return PrintMode::Plain;
  if (m == "stamps") return PrintMode::Stamps;
  return PrintMode::Aliases;
}

int execute(const Config &cfg, const std::string &source, std::ostream &out, std::ostream &err) {
  bool color = !cfg.no_color;
  try {
    Program program = parse_program(source, cfg.input);
    if (cfg.command == "desugar") {
      std::vector<StructItem> items;
      if (cfg.eliminate == "local") items = expand_local(program.items);
      else if (cfg.eliminate == "private") items = expand_private(program.items);
      else if (cfg.via == "private") items = introduce_private(program.items);
      else items = introduce_local(program.items);
      out << print_source(items);
      return kOk;
    }
    Session session;
    TypedProgram typed = check_program(session, program);
    if (cfg.command == "check") return kOk;
    if (cfg.command == "infer") {
      out << print_signature(typed.signature, parse_mode(cfg.print_mode));
      return kOk;
    }
    if (cfg.command == "elaborate") {
      out << print_source(typed.elaborated);
      return kOk;
    }
    EvalResult r = eval_program(typed.elaborated, out);
    out.flush();
    if (r.uncaught) {
      err << render_diagnostic(*r.uncaught, source, color);
      return kRuntimeError;
    }
    return kOk;
  } catch (const LexError &e) {
    err << render_diagnostic(e, source, color);
    return kParseError;
  } catch (const ParseError &e) {
    err << render_diagnostic(e, source, color);
    return kParseError;
  } catch (const Diagnostic &e) {
    err << render_diagnostic(e, source, color);
    return kTypeError;
  }
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  Config cfg;
  CLI::App app{"MiniMod type checker and interpreter", "minimod"};
  app.require_subcommand(1);
  app.add_flag("--no-color", cfg.no_color, "Disable ANSI colors in diagnostics");

  auto add_input = [&](CLI::App *sub) {
    sub->add_option("file", cfg.input, "Source file")->required();
    sub->add_flag("--no-color", cfg.no_color, "Disable ANSI colors in diagnostics");
  };
  add_input(app.add_subcommand("check", "Type-check a program"));
  auto *infer = app.add_subcommand("infer", "Print the exported signature");
  add_input(infer);
  infer->add_option("--print-mode", cfg.print_mode, "plain, stamps or aliases")
      ->check(CLI::IsMember({"plain", "stamps", "aliases"}));
  add_input(app.add_subcommand("run", "Type-check and evaluate a program"));
  auto *desugar = app.add_subcommand("desugar", "Translate between local, private and open");
  add_input(desugar);
  desugar->add_option("--eliminate", cfg.eliminate, "local, private or open")
      ->required()
      ->check(CLI::IsMember({"local", "private", "open"}));
  desugar->add_option("--via", cfg.via, "Target construct when eliminating open")
      ->check(CLI::IsMember({"local", "private"}));
  add_input(app.add_subcommand("elaborate", "Print the elaborated structure"));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError &e) {
    err << "minimod: " << e.what() << "\n" << app.help();
    return kUsage;
  }
  for (auto *sub : app.get_subcommands()) cfg.command = sub->get_name();

  std::string source;
  if (!read_file(cfg.input, source)) {
    err << "minimod: cannot read " << cfg.input << "\n";
    return kUsage;
  }
  return execute(cfg, source, out, err);
}

} // namespace minimod
