#pragma once

#include <cstdio>
#include <filesystem>
#include <random>
#include <string>

#include "parallax/camera.hpp"
#include "parallax/scene.hpp"

namespace parallax::testing {

inline std::filesystem::path fixtures_dir() { return PARALLAX_FIXTURES_DIR; }
inline std::string cli_path() { return PARALLAX_CLI_PATH; }

/// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("parallax-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  [[nodiscard]] const std::filesystem::path& path() const { return path_; }
  [[nodiscard]] std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

/// Runs a shell command, capturing stdout.
inline CommandResult run_command(const std::string& command) {
  CommandResult result;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return result;
  char buffer[4096];
  std::size_t n = 0;
  while ((n = std::fread(buffer, 1, sizeof buffer, pipe)) > 0) result.output.append(buffer, n);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

inline PinholeCamera test_camera(int width, int height, double f = 50.0) {
  return {f, f, 0.5 * (width - 1), 0.5 * (height - 1), width, height};
}

/// Scene with a flat gray image and the given per-pixel depth function.
template <typename DepthFn>
DepthScene synthetic_scene(int width, int height, const PinholeCamera& camera, DepthFn depth_at) {
  Image image(width, height, Rgba8{90, 110, 130, 255});
  DepthMap depth(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) depth(x, y) = static_cast<float>(depth_at(x, y));
  return make_scene(std::move(image), std::move(depth), camera);
}

}  // namespace parallax::testing
