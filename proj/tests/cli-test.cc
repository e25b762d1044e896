// tests/cli-test.cc

// Copyright 2026  The spoofkit authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Output {
  int status = -1;
  std::string text;
};

// Runs the tool with stderr folded into stdout.
Output Run(const std::string &args) {
  Output out;
  FILE *p = ::popen((std::string(SPOOFKIT_CLI) + " " + args + " 2>&1").c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), p)) > 0) out.text.append(buf, n);
  const int rc = ::pclose(p);
  out.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return out;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("spoofkit-cli-test-" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string Write(const std::string &name, const std::string &text) const {
    std::ofstream(path / name) << text;
    return (path / name).string();
  }
};

}  // namespace

TEST_CASE("usage errors exit with status 2") {
  CHECK(Run("").status == 2);
  CHECK(Run("no-such-command").status == 2);
  CHECK(Run("evaluate --no-such-flag").status == 2);
  CHECK(Run("intervene --out-dir /tmp/x").status == 2);
}

TEST_CASE("runtime errors exit with status 1 and one line") {
  TempDir t;
  const Output o = Run("evaluate --protocol " + (t.path / "missing.txt").string() + " --scores " +
                       (t.path / "missing.scores").string());
  CHECK(o.status == 1);
  CHECK(o.text.rfind("error: evaluate: ", 0) == 0);
  CHECK(o.text.find('\n') == o.text.size() - 1);
}

TEST_CASE("dump-config output is a loadable config") {
  const Output o = Run("--dump-config");
  REQUIRE(o.status == 0);
  CHECK(o.text.find("[pipeline]") != std::string::npos);
  TempDir t;
  const std::string cfg = t.Write("dump.ini", o.text);
  // Loading succeeds; the command then fails only on missing inputs.
  const Output e = Run("evaluate -c " + cfg + " --scores " + (t.path / "x").string());
  CHECK(e.status == 1);
  CHECK(e.text.find("dev_protocol") != std::string::npos);
}

TEST_CASE("evaluate on perfectly separated scores") {
  TempDir t;
  const std::string proto = t.Write("p.txt",
                                    "S1 B1 - - bonafide\nS1 B2 - - bonafide\n"
                                    "S2 X1 - A01 spoof\nS2 X2 - A02 spoof\n");
  const std::string scores = t.Write("s.txt", "B1 3.5\nB2 2\nX1 -1\nX2 0.25\n");
  const std::string cfg =
      t.Write("c.ini", "[cost]\np_miss_asv = 0.05\np_fa_asv = 0.01\np_miss_spoof_asv = 0.4\n");
  const Output o = Run("evaluate -c " + cfg + " --protocol " + proto + " --scores " + scores);
  REQUIRE(o.status == 0);
  CHECK(o.text.find("EER: 0.00%") != std::string::npos);
  CHECK(o.text.find("min t-DCF: 0.0000") != std::string::npos);

  const Output n = Run("evaluate --protocol " + proto + " --scores " + scores);
  REQUIRE(n.status == 0);
  CHECK(n.text.find("min t-DCF: n/a") != std::string::npos);
}

TEST_CASE("synth-corpus writes protocols and a manifest") {
  TempDir t;
  const std::string dir = (t.path / "c").string();
  REQUIRE(Run("synth-corpus --seed 3 --pairs 6 --out-dir " + dir).status == 0);
  for (const char *f : {"train.txt", "dev.txt", "all.txt", "manifest.json"}) CHECK(fs::exists(fs::path(dir) / f));
  const auto m = nlohmann::json::parse(std::ifstream(fs::path(dir) / "manifest.json"));
  CHECK(m["command"] == "synth-corpus");
  CHECK(m.contains("versions"));
  CHECK(m.contains("seeds"));
  CHECK(Run("synth-corpus --pairs 6 --out-dir " + dir + "2").status == 1);
}
