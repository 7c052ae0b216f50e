#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

// Scratch directory freshly created per test case, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            ("lwslab_test_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  os << content;
}

inline std::string data_file(const std::string& name) {
  return std::string(LWS_DATA_DIR) + "/" + name;
}
