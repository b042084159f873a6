//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/util/subprocess.h"

#include <fcntl.h>
#include <spawn.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <filesystem>

#include "rxngrow/errors.h"
#include "rxngrow/util/io.h"

extern char **environ;

namespace rxngrow {
namespace {

bool is_executable(const std::string &path) {
  struct stat st;
  return ::stat(path.c_str(), &st) == 0 && S_ISREG(st.st_mode)
         && ::access(path.c_str(), X_OK) == 0;
}

// Temporary file that is unlinked on destruction.
class TempFile {
public:
  TempFile() {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "rxngrow-XXXXXX").string();
    fd_ = ::mkstemp(tmpl.data());
    if (fd_ < 0)
      throw Error("mkstemp failed: " + std::string(std::strerror(errno)));
    path_ = tmpl;
  }
  ~TempFile() {
    if (fd_ >= 0)
      ::close(fd_);
    ::unlink(path_.c_str());
  }
  TempFile(const TempFile &) = delete;
  TempFile &operator=(const TempFile &) = delete;

  int fd() const { return fd_; }
  const std::string &path() const { return path_; }

private:
  int fd_ = -1;
  std::string path_;
};

}  // namespace

std::optional<std::string> find_executable(const std::string &name) {
  if (name.empty())
    return std::nullopt;
  if (name.find('/') != std::string::npos)
    return is_executable(name) ? std::optional<std::string>(name)
                               : std::nullopt;
  const char *path = std::getenv("PATH");
  for (const std::string &dir: split(path ? path : "/usr/bin:/bin", ':')) {
    const std::string candidate = (dir.empty() ? "." : dir) + "/" + name;
    if (is_executable(candidate))
      return candidate;
  }
  return std::nullopt;
}

ProcessResult run_process(const std::vector<std::string> &argv) {
  if (argv.empty())
    throw ToolNotFoundError("empty command line");
  const auto exe = find_executable(argv[0]);
  if (!exe)
    throw ToolNotFoundError("executable not found: " + argv[0]);

  TempFile out;
  TempFile err;
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, out.fd(), STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, err.fd(), STDERR_FILENO);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null",
                                   O_RDONLY, 0);

  std::vector<char *> args;
  for (const auto &a: argv)
    args.push_back(const_cast<char *>(a.c_str()));
  args.push_back(nullptr);

  pid_t pid = 0;
  const int rc =
      posix_spawn(&pid, exe->c_str(), &actions, nullptr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0)
    throw ToolNotFoundError("cannot execute " + *exe + ": "
                            + std::strerror(rc));

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR)
      throw Error("waitpid failed: " + std::string(std::strerror(errno)));
  }
  ProcessResult result;
  if (WIFEXITED(status))
    result.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status))
    result.exit_code = 128 + WTERMSIG(status);
  result.out = read_file(out.path());
  result.err = read_file(err.path());
  return result;
}

}  // namespace rxngrow
