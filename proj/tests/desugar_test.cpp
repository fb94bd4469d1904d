#include "doctest.h"
#include "test_util.hpp"

#include "minimod/desugar.hpp"

#include <regex>

using namespace minimod;
using namespace minimod::test;

namespace {

std::string via(std::vector<StructItem> (*f)(const std::vector<StructItem> &), const std::string &src) {
  return print_source(f(parse_program(src).items));
}

bool has_keyword(const std::string &printed, const std::string &kw) {
  return std::regex_search(printed, std::regex("\\b" + kw + "\\b"));
}

} // namespace

TEST_CASE("expand_local") {
  CHECK(via(expand_local, "local let a = 1 in let b = a end") ==
        "include struct open struct let a = 1 end let b = a end\n");
  CHECK(via(expand_local, "let a = 1\nlet b = a") == "let a = 1\nlet b = a\n");
  std::string nested = "local let a = 1 in local let b = a in let c = b end end";
  std::string out = via(expand_local, nested);
  CHECK_FALSE(has_keyword(out, "local"));
  CHECK(check_source(out).typed.signature.size() == 1);
}

TEST_CASE("expand_private") {
  CHECK(via(expand_private, "private let x = 3") == "open struct let x = 3 end\n");
  CHECK(via(expand_private, "let x = 3") == "let x = 3\n");
  CHECK(via(expand_private, "module M = struct private type t = int let (x : t) = 1 end") ==
        "module M = struct open struct type t = int end let (x : t) = 1 end\n");
}

TEST_CASE("introduce_local") {
  CHECK(via(introduce_local, "open struct let x = 3 end\nlet y = x") ==
        "local\n  module M0 = struct let x = 3 end\nin\n  open M0\n  let y = x\nend\n");
  CHECK(via(introduce_local, "module A = struct end\nopen A") == "module A = struct end\nopen A\n");
  std::string out = via(introduce_local, "module M0 = struct end\nopen struct let x = 3 end\nlet y = x");
  CHECK(out.find("module M1 = struct let x = 3 end") != std::string::npos);
}

TEST_CASE("introduce_private") {
  CHECK(via(introduce_private, "open struct type t = int end\nlet (v : t) = 1") ==
        "private module M0 = struct type t = int end\nopen M0\nlet (v : t) = 1\n");
  CHECK(via(introduce_private, "module A = struct end\nopen A") == "module A = struct end\nopen A\n");
  std::string out = via(introduce_private, "open struct let x = M0.y end");
  CHECK(out.find("private module M1") != std::string::npos);
}

TEST_CASE("approx_module_names") {
  CHECK(approx_module_names(parse_program("let y = A.x").items) == NameSet{"A"});
  CHECK(approx_module_names({}).empty());
  CHECK(approx_module_names(parse_program("open B\nlet z = C.D.v").items) == NameSet{"B", "C", "D"});
}

TEST_CASE("translations leave no construct behind") {
  for (const auto &f : corpus_files()) {
    CAPTURE(f);
    auto items = parse_program(read_text(f)).items;
    CHECK_FALSE(has_keyword(print_source(expand_local(introduce_local(items))), "local"));
    CHECK_FALSE(has_keyword(print_source(expand_private(introduce_private(items))), "private"));
  }
}
