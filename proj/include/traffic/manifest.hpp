// Run manifests: config snapshot, seed, version, wall times and SHA-256
// digests of every file emitted into the output directory.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace traffic::manifest {

inline constexpr const char* kLibraryVersion = "1.0.0";

std::string sha256_file(const std::string& path);

class Run {
public:
  Run(std::string out_dir, nlohmann::json config_snapshot, std::uint64_t seed);
  ~Run();

  // Registers an emitted file (path relative to the output directory).
  void add_output(const std::string& relative_path);

  // Writes manifest.json into the output directory; called once.
  void finalize();

  const std::string& dir() const { return dir_; }
  std::string path(const std::string& relative) const;

private:
  std::string dir_;
  std::string config_;
  std::uint64_t seed_;
  std::string started_;
  std::vector<std::string> outputs_;
  bool finalized_ = false;
};

}  // namespace traffic::manifest
