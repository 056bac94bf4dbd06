#include "gapbench/subprocess.hpp"

#include <cerrno>
#include <cstring>
#include <stdexcept>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

namespace gapbench {

Subprocess::Subprocess(const std::vector<std::string>& command,
                       const std::vector<std::string>& env_allowlist, int timeout_ms)
    : timeout_ms_(timeout_ms) {
    if (command.empty()) throw std::invalid_argument("empty external command");
    int to_child[2], from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0)
        throw std::runtime_error("pipe failed: " + std::string(std::strerror(errno)));

    std::vector<std::string> env_storage;
    for (const char* keep : {"PATH", "HOME"}) {
        if (const char* v = getenv(keep)) env_storage.push_back(std::string(keep) + "=" + v);
    }
    for (const auto& key : env_allowlist) {
        if (const char* v = getenv(key.c_str())) env_storage.push_back(key + "=" + v);
    }

    const int pid = fork();
    if (pid < 0) throw std::runtime_error("fork failed: " + std::string(std::strerror(errno)));
    if (pid == 0) {
        dup2(to_child[0], STDIN_FILENO);
        dup2(from_child[1], STDOUT_FILENO);
        close(to_child[0]);
        close(to_child[1]);
        close(from_child[0]);
        close(from_child[1]);
        std::vector<char*> argv;
        for (const auto& a : command) argv.push_back(const_cast<char*>(a.c_str()));
        argv.push_back(nullptr);
        std::vector<char*> envp;
        for (auto& e : env_storage) envp.push_back(e.data());
        envp.push_back(nullptr);
        execve(command[0].c_str(), argv.data(), envp.data());
        // Fall back to a PATH search if the bare name was given.
        execvp(command[0].c_str(), argv.data());
        _exit(127);
    }
    pid_ = pid;
    in_fd_ = to_child[1];
    out_fd_ = from_child[0];
    close(to_child[0]);
    close(from_child[1]);
}

Subprocess::~Subprocess() {
    if (pid_ > 0) {
        kill(pid_, SIGKILL);
        int status = 0;
        waitpid(pid_, &status, 0);
    }
    if (in_fd_ >= 0) close(in_fd_);
    if (out_fd_ >= 0) close(out_fd_);
}

void Subprocess::write_line(const std::string& line) {
    std::string payload = line;
    payload.push_back('\n');
    std::size_t off = 0;
    while (off < payload.size()) {
        const ssize_t n = write(in_fd_, payload.data() + off, payload.size() - off);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw std::runtime_error("write to external process failed: " +
                                     std::string(std::strerror(errno)));
        }
        off += static_cast<std::size_t>(n);
    }
}

bool Subprocess::read_line(std::string& line) {
    while (true) {
        const auto pos = buffer_.find('\n');
        if (pos != std::string::npos) {
            line = buffer_.substr(0, pos);
            buffer_.erase(0, pos + 1);
            return true;
        }
        struct pollfd pfd{out_fd_, POLLIN, 0};
        const int pr = poll(&pfd, 1, timeout_ms_);
        if (pr == 0) throw std::runtime_error("timeout waiting for external process");
        if (pr < 0) {
            if (errno == EINTR) continue;
            throw std::runtime_error("poll failed: " + std::string(std::strerror(errno)));
        }
        char chunk[4096];
        const ssize_t n = read(out_fd_, chunk, sizeof chunk);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw std::runtime_error("read from external process failed: " +
                                     std::string(std::strerror(errno)));
        }
        if (n == 0) {
            if (!buffer_.empty()) {
                line = buffer_;
                buffer_.clear();
                return true;
            }
            return false;
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

int Subprocess::finish() {
    if (in_fd_ >= 0) {
        close(in_fd_);
        in_fd_ = -1;
    }
    int status = 0;
    if (pid_ > 0) {
        waitpid(pid_, &status, 0);
        pid_ = -1;
    }
    if (out_fd_ >= 0) {
        close(out_fd_);
        out_fd_ = -1;
    }
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    if (WIFSIGNALED(status)) return -WTERMSIG(status);
    return -1;
}

}  // namespace gapbench
