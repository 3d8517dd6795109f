#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "caloric/pipeline/config.hpp"

namespace caloric::pipeline {

struct FileEntry {
  std::string path;  // relative to the output directory
  std::string checksum;
  std::uintmax_t bytes = 0;
};

// Everything a run reports. Summary scalars keep insertion order; files are
// sorted by path. Wall-clock lives in `timing` and is written to timing.json,
// never to manifest.json.
struct RunManifest {
  std::vector<std::pair<std::string, double>> summary;
  std::vector<FileEntry> files;
  std::vector<std::string> failures;
  std::map<std::string, double> timing;

  bool ok() const noexcept { return failures.empty(); }
  bool has(const std::string& name) const;
  // Throws if absent.
  double scalar(const std::string& name) const;
};

// Runs the configured pipeline into config.output and writes manifest.json
// (atomically, last) and timing.json. Module errors are recorded as failures
// and skip the stages that depend on them; the manifest is written either way.
RunManifest run(const RunConfig& config);

// Canonical manifest text: config echo without the output directory, versions,
// files, summary, status.
std::string manifest_json(const RunConfig& config, const RunManifest& manifest);

}  // namespace caloric::pipeline
