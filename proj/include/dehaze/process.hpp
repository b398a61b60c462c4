#pragma once

#include <filesystem>
#include <string>

namespace dehaze {

struct ProcessResult {
  int exit_code = -1;  // shell convention: 128 + signal for signalled children
  std::string out;
  std::string err;
};

/// Runs `command` through /bin/sh -c and captures stdout and stderr.
/// Throws ProcessError only if the process cannot be started.
ProcessResult run_shell(const std::string& command);

/// Replaces every occurrence of `key` in `text`.
std::string substitute(std::string text, const std::string& key, const std::string& value);

/// Owns a freshly created, uniquely named directory and removes it on destruction.
class TempDir {
 public:
  explicit TempDir(const std::filesystem::path& parent, const std::string& prefix = "dehaze-");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace dehaze
