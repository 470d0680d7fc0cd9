#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "doctest.h"

namespace {

struct Run {
  int code;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args) {
  const std::string err_path = std::string(OMRAV_TEST_TMP) + "/cli_stderr.txt";
  const std::string cmd = std::string(OMRAV_CLI) + " " + args + " > /dev/null 2> " + err_path;
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err_path)};
}

std::string write_tmp(const std::string& name, const std::string& text) {
  const std::string path = std::string(OMRAV_TEST_TMP) + "/" + name;
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("success exits zero") {
  const std::string out = std::string(OMRAV_TEST_TMP) + "/cli_classify.csv";
  CHECK(run("classify --out " + out).code == 0);
  CHECK(slurp(out).find("tilted_cube,1,1,") != std::string::npos);
}

TEST_CASE("bad configs exit non-zero with a category") {
  auto r = run("sweep-a --config " + write_tmp("bad_key.json", R"({"experiment": "sweep_a", "nope": 1})"));
  CHECK(r.code == 2);
  CHECK(r.err.find("error_category=ParseError") != std::string::npos);
  CHECK(r.err.find("nope") != std::string::npos);

  r = run("sweep-a --config " + write_tmp("bad_noise.json", R"({"radio": {"noise_power_w": -1}})"));
  CHECK(r.code == 2);
  CHECK(r.err.find("error_category=ValidationError") != std::string::npos);

  r = run("sweep-b --config " + write_tmp("wrong_kind.json", R"({"experiment": "sweep_a"})"));
  CHECK(r.code == 2);
}

TEST_CASE("usage errors") {
  CHECK(run("").code != 0);
  CHECK(run("classify --format xml").code != 0);
  CHECK(run("classify --threads 0").code != 0);
  CHECK(run("classify --config /nonexistent/file.json").code != 0);
}

TEST_CASE("unwritable output is an I/O error") {
  const auto r = run("classify --out /nonexistent/dir/out.csv");
  CHECK(r.code == 3);
  CHECK(r.err.find("error_category=IoError") != std::string::npos);
}

}
