#pragma once

#include "minimod/cli.hpp"
#include "minimod/mod_typing.hpp"
#include "minimod/printer.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace minimod::test {

inline std::filesystem::path test_path(const std::string &rel) {
  return std::filesystem::path(MINIMOD_TEST_DIR) / rel;
}

inline std::string read_text(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::filesystem::path> corpus_files() {
  std::vector<std::filesystem::path> out;
  for (const auto &e : std::filesystem::directory_iterator(test_path("corpus")))
    if (e.path().extension() == ".mml") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

/// Runs the driver with the test directory as working directory so that
/// diagnostics show stable relative paths.
inline CliResult run_in_test_dir(const std::vector<std::string> &args) {
  auto saved = std::filesystem::current_path();
  std::filesystem::current_path(MINIMOD_TEST_DIR);
  CliResult r;
  std::ostringstream out, err;
  r.code = run_cli(args, out, err);
  std::filesystem::current_path(saved);
  r.out = out.str();
  r.err = err.str();
  return r;
}

inline std::string run_snapshot(const std::vector<std::string> &args) {
  CliResult r = run_in_test_dir(args);
  return "exit: " + std::to_string(r.code) + "\n--- stdout\n" + r.out + "\n--- stderr\n" + r.err;
}

/// A checked program together with the session its stamps come from.
struct Checked {
  std::unique_ptr<Session> session;
  TypedProgram typed;
};

inline Checked check_source(const std::string &src) {
  auto session = std::make_unique<Session>();
  TypedProgram typed = check_program(*session, parse_program(src, "test.mml"));
  return Checked{std::move(session), std::move(typed)};
}

inline std::string infer_source(const std::string &src, PrintMode mode = PrintMode::Plain) {
  return print_signature(check_source(src).typed.signature, mode);
}

} // namespace minimod::test
