#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pflow/cli.h"
#include "test_util.h"

namespace pflow {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "pflow");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const char* name) { return std::string(PFLOW_FIXTURES) + "/" + name; }

fs::path scratch(const char* name) {
  const fs::path dir = fs::temp_directory_path() / ("pflow_cli_test_" + std::string(name));
  fs::remove_all(dir);
  return dir;
}

TEST_CASE("mintime on the open fixture") {
  const Run r = run({"mintime", fixture("empty5.scn")});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "5\n");
}

TEST_CASE("plan below the minimum horizon fails") {
  const Run r = run({"plan", fixture("empty5.scn"), "--horizon", "2"});
  CHECK(r.code == kExitInfeasible);
  CHECK(r.err.find("no feasible path") != std::string::npos);
  CHECK(r.out.empty());

  const Run waited = run({"plan", fixture("empty5.scn"), "--horizon", "2", "--policy", "wait"});
  CHECK(waited.code == kExitOk);
}

TEST_CASE("plan is deterministic") {
  const Run a = run({"plan", fixture("maze15.scn")});
  const Run b = run({"plan", fixture("maze15.scn")});
  CHECK(a.code == kExitOk);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("t,row,col,action\n1,1,1,", 0) == 0);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"fly", fixture("empty5.scn")}).code == kExitUsage);
  CHECK(run({"plan", "/nonexistent/file.scn"}).code == kExitUsage);
  CHECK(run({"plan", fixture("empty5.scn"), "--policy", "retry"}).code == kExitUsage);
  CHECK(run({"flows", fixture("empty5.scn")}).code == kExitUsage);  // no --out-dir
  CHECK(run({"plan", fixture("corridor2.scn")}).code == kExitUsage);
  CHECK(run({"simulate", fixture("empty5.scn"), "--out-dir", scratch("bad").string()}).code == kExitUsage);

  const fs::path bad = scratch("parse");
  fs::create_directories(bad);
  const std::string file = (bad / "x.scn").string();
  {
    std::ofstream(file) << "colour = red\n---\nSG\n";
  }
  const Run r = run({"plan", file});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("line 1") != std::string::npos);
}

TEST_CASE("unreachable goal") {
  const fs::path dir = scratch("walled");
  fs::create_directories(dir);
  const std::string file = (dir / "w.scn").string();
  {
    std::ofstream(file) << "---\nS.#..\n..#.G\n";
  }
  const Run r = run({"mintime", file});
  CHECK(r.code == kExitInfeasible);
  CHECK(run({"plan", file}).code == kExitInfeasible);
}

TEST_CASE("flows writes one frame per slice and kind") {
  const fs::path dir = scratch("flows");
  const Run r = run({"flows", fixture("empty5.scn"), "--out-dir", dir.string()});
  CHECK(r.code == kExitOk);
  for (const char* kind : {"forward", "backward", "posterior"}) {
    for (int t = 1; t <= 5; ++t) {
      char name[64];
      std::snprintf(name, sizeof(name), "%s_t%03d.txt", kind, t);
      CHECK(fs::exists(dir / name));
    }
  }
  const Run px = run({"flows", fixture("empty5.scn"), "--out-dir", dir.string(), "--format", "pixmap"});
  CHECK(px.code == kExitOk);
  CHECK(fs::exists(dir / "posterior_t003.ppm"));
}

TEST_CASE("sample prints k paths") {
  const Run r = run({"sample", fixture("maze15.scn"), "--n", "3", "--seed", "9"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.rfind("sample,t,row,col,action\n", 0) == 0);
  CHECK(r.out.find("\n2,1,1,1,") != std::string::npos);
  CHECK(r.out == run({"sample", fixture("maze15.scn"), "--n", "3", "--seed", "9"}).out);
}

TEST_CASE("simulate writes a trace") {
  const fs::path dir = scratch("sim");
  const Run r = run({"simulate", fixture("corridor2.scn"), "--out-dir", dir.string()});
  CHECK(r.code == kExitOk);
  CHECK(fs::exists(dir / "trace.csv"));
  CHECK(fs::exists(dir / "agent_1.csv"));
  CHECK(fs::exists(dir / "agent_2.csv"));
  CHECK(fs::exists(dir / "world_t001.txt"));
  CHECK(r.out.find("agent 2: arrived") != std::string::npos);

  const Run timeout = run({"simulate", fixture("corridor2.scn"), "--out-dir", dir.string(), "--horizon", "4"});
  CHECK(timeout.code == kExitInfeasible);
}

}  // namespace
}  // namespace pflow
