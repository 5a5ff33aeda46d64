#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lnsim::cli {

/// Lower-case hex SHA-256 of a file's bytes. Throws lnsim::Error when the
/// file cannot be read.
std::string sha256_file(const std::string& path);

/// Sidecar describing how an output directory was produced.
class Manifest {
 public:
  void set_command(std::string subcommand, std::vector<std::string> argv, std::vector<std::string> replay_argv);
  void set_seed(std::uint64_t seed, bool generated);
  nlohmann::json& parameters() { return params_; }
  /// Records the digest of a file, or of every regular file under a directory.
  void add_input(const std::string& role, const std::string& path);
  void add_output(const std::string& file) { outputs_.push_back(file); }
  void set_complete(bool complete) { complete_ = complete; }

  nlohmann::json to_json() const;
  void write(const std::string& dir) const;

  /// Arguments that rerun the recorded invocation.
  static std::vector<std::string> replay_arguments(const std::string& manifest_path);

 private:
  std::string subcommand_;
  std::vector<std::string> argv_, replay_argv_;
  std::uint64_t seed_ = 0;
  bool seed_generated_ = false;
  nlohmann::json params_ = nlohmann::json::object();
  nlohmann::json inputs_ = nlohmann::json::array();
  std::vector<std::string> outputs_;
  bool complete_ = true;
};

}  // namespace lnsim::cli
