#include "doctest.h"
#include "test_util.hpp"

#include "minimod/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace minimod;
using namespace minimod::test;

namespace {

struct Case {
  std::string name;
  std::vector<std::string> args;
};

std::vector<Case> load_cases() {
  std::vector<Case> cases;
  std::ifstream in(test_path("golden/cases.txt"));
  std::string line;
  while (std::getline(in, line)) {
    auto bar = line.find(" | ");
    if (bar == std::string::npos) continue;
    Case c{line.substr(0, bar), {}};
    std::istringstream words(line.substr(bar + 3));
    for (std::string w; words >> w;) c.args.push_back(w);
    cases.push_back(std::move(c));
  }
  return cases;
}

} // namespace

TEST_CASE("golden outputs of the driver") {
  auto cases = load_cases();
  REQUIRE(cases.size() >= 100);
  bool regen = std::getenv("MINIMOD_REGEN") != nullptr;
  for (const auto &c : cases) {
    CAPTURE(c.name);
    std::string actual = run_snapshot(c.args);
    auto file = test_path("golden/" + c.name + ".txt");
    if (regen) {
      std::ofstream(file, std::ios::binary) << actual;
      continue;
    }
    REQUIRE_MESSAGE(std::filesystem::exists(file), "missing golden " << file);
    CHECK(actual == read_text(file));
  }
}
