#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "mtsim/corpus.hpp"

namespace testsupport {

inline std::filesystem::path source_dir() { return MTSIM_SOURCE_DIR; }
inline std::filesystem::path fixture(const std::string& name) { return source_dir() / "tests" / "fixtures" / name; }

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Task with derived fields filled from the given HTML.
inline mtsim::MicroTask task(std::string id, std::string category, std::string html, std::string title = "") {
  mtsim::MicroTask t;
  t.id = std::move(id);
  t.category = std::move(category);
  t.description_html = std::move(html);
  t.title = std::move(title);
  t.time_to_finish = 5;
  t.derive();
  return t;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("mtsim-test-" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testsupport
