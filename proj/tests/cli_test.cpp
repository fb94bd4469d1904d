#include "doctest.h"
#include "test_util.hpp"

using namespace minimod;
using namespace minimod::test;

TEST_CASE("infer prints the exported signature") {
  CliResult r = run_in_test_dir({"infer", "corpus/t01_unexported.mml"});
  CHECK(r.code == kOk);
  CHECK(r.out == "val y : int\n");
  CHECK(r.err.empty());
}

TEST_CASE("check reports elimination errors on stderr") {
  CliResult r = run_in_test_dir({"check", "--no-color", "corpus/t03_elim_error.mml"});
  CHECK(r.code == kTypeError);
  CHECK(r.out.empty());
  CHECK(r.err.find("introduced by this open appears in the signature") != std::string::npos);
}

TEST_CASE("global and per-command color flags") {
  CliResult a = run_in_test_dir({"--no-color", "check", "corpus/t03_elim_error.mml"});
  CliResult b = run_in_test_dir({"check", "corpus/t03_elim_error.mml", "--no-color"});
  CliResult c = run_in_test_dir({"check", "corpus/t03_elim_error.mml"});
  CHECK(a.err == b.err);
  CHECK(a.err.find('\x1b') == std::string::npos);
  CHECK(c.err.find("\x1b[1mError:") != std::string::npos);
}

TEST_CASE("run on an empty program") {
  auto path = std::filesystem::temp_directory_path() / "minimod_empty.mml";
  std::ofstream(path) << "";
  CliResult r = run_in_test_dir({"run", path.string()});
  CHECK(r.code == kOk);
  CHECK(r.out.empty());
  CHECK(r.err.empty());
  std::filesystem::remove(path);
}

TEST_CASE("exit codes") {
  CHECK(run_in_test_dir({"run", "corpus/t11_assert_struct.mml"}).code == kRuntimeError);
  CHECK(run_in_test_dir({"check", "errors/e01_syntax_eof.mml"}).code == kParseError);
  CHECK(run_in_test_dir({"check", "errors/e02_lex.mml"}).code == kParseError);
  CHECK(run_in_test_dir({"check", "errors/e03_unify.mml"}).code == kTypeError);
  CHECK(run_in_test_dir({"check", "no/such/file.mml"}).code == kUsage);
  CHECK(run_in_test_dir({}).code == kUsage);
  CHECK(run_in_test_dir({"infer", "--print-mode", "fancy", "corpus/t01_unexported.mml"}).code == kUsage);
  CHECK(run_in_test_dir({"desugar", "corpus/t01_unexported.mml"}).code == kUsage);
}

TEST_CASE("program output goes to stdout only") {
  CliResult r = run_in_test_dir({"run", "corpus/t21_generative_exn.mml"});
  CHECK(r.out == "same no-cross");
  CHECK(r.err.empty());
}

TEST_CASE("desugar flags") {
  CHECK(run_in_test_dir({"desugar", "--eliminate", "local", "corpus/t01_unexported.mml"}).out ==
        "open struct let x = 3 end\nlet y = x\n");
  CHECK(run_in_test_dir({"desugar", "--eliminate", "open", "corpus/t01_unexported.mml"}).out ==
        "local\n  module M0 = struct let x = 3 end\nin\n  open M0\n  let y = x\nend\n");
  CHECK(run_in_test_dir({"desugar", "--eliminate", "open", "--via", "private", "corpus/t01_unexported.mml"})
            .out == "private module M0 = struct let x = 3 end\nopen M0\nlet y = x\n");
}
