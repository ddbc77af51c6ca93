#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "contraverify/parser.hpp"
#include "contraverify/smt.hpp"
#include "contraverify/typecheck.hpp"

namespace testsupport {

inline std::string
corpus(const std::string& rel)
{
  return std::string(CONTRAVERIFY_CORPUS_DIR) + "/" + rel;
}

inline std::string
slurp(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline contraverify::TypedProgram
typed(const std::string& source)
{
  auto tc = contraverify::typecheck(contraverify::parse_program(source));
  if (!tc.ok()) throw std::runtime_error(tc.errors.front().to_string());
  return std::move(*tc.program);
}

inline contraverify::TypedProgram
load(const std::string& rel)
{
  return typed(slurp(corpus(rel)));
}

inline std::vector<std::string>
corpus_files(const std::string& dir)
{
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(corpus(dir)))
    if (e.path().extension() == ".ec") out.push_back(dir + "/" + e.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

inline contraverify::SolverConfig
solver()
{
  contraverify::SolverConfig cfg;
  cfg.executable = contraverify::default_solver_path();
  return cfg;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path
scratch(const std::string& name)
{
  auto p = std::filesystem::temp_directory_path() / ("contraverify-test-" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testsupport
