#pragma once

#include <string>
#include <vector>

namespace gapbench {

// Line-oriented pipe to a child process. Blocking reads honor a deadline so a
// stuck client cannot hang the harness.
class Subprocess {
  public:
    Subprocess(const std::vector<std::string>& command, const std::vector<std::string>& env_allowlist,
               int timeout_ms);
    ~Subprocess();
    Subprocess(const Subprocess&) = delete;
    Subprocess& operator=(const Subprocess&) = delete;

    void write_line(const std::string& line);
    // Returns false on clean EOF; throws on timeout or I/O failure.
    bool read_line(std::string& line);
    // Closes stdin, waits, returns the exit status (negative if signalled).
    int finish();
    bool running() const { return pid_ > 0; }

  private:
    int pid_ = -1;
    int in_fd_ = -1;   // write end of child's stdin
    int out_fd_ = -1;  // read end of child's stdout
    int timeout_ms_;
    std::string buffer_;
};

}  // namespace gapbench
