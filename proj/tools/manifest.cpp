#include "manifest.hpp"

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "lnsim/types.hpp"

namespace fs = std::filesystem;

namespace lnsim::cli {

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("{}: cannot open for hashing", path));
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md.data(), &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

void Manifest::set_command(std::string subcommand, std::vector<std::string> argv,
                           std::vector<std::string> replay_argv) {
  subcommand_ = std::move(subcommand);
  argv_ = std::move(argv);
  replay_argv_ = std::move(replay_argv);
}

void Manifest::set_seed(std::uint64_t seed, bool generated) {
  seed_ = seed;
  seed_generated_ = generated;
}

void Manifest::add_input(const std::string& role, const std::string& path) {
  if (path.empty()) return;
  std::vector<std::string> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file()) files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }
  for (const auto& f : files) inputs_.push_back({{"role", role}, {"path", f}, {"sha256", sha256_file(f)}});
}

nlohmann::json Manifest::to_json() const {
  return {
      {"tool", "lnsim"},
      {"version", LNSIM_VERSION},
      {"subcommand", subcommand_},
      {"argv", argv_},
      {"replay_argv", replay_argv_},
      {"seed", seed_},
      {"seed_generated", seed_generated_},
      {"parameters", params_},
      {"inputs", inputs_},
      {"outputs", outputs_},
      {"complete", complete_},
  };
}

void Manifest::write(const std::string& dir) const {
  const fs::path file = fs::path(dir) / "manifest.json";
  std::ofstream out(file);
  if (!out) throw Error(fmt::format("{}: cannot write manifest", file.string()));
  out << to_json().dump(2) << '\n';
  if (!out) throw Error(fmt::format("{}: write failed", file.string()));
}

std::vector<std::string> Manifest::replay_arguments(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw Error(fmt::format("{}: cannot open manifest", manifest_path));
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    return j.at("replay_argv").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(fmt::format("{}: invalid manifest: {}", manifest_path, e.what()));
  }
}

}  // namespace lnsim::cli
