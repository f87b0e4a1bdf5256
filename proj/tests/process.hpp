// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace wordcraft::testing {

inline std::filesystem::path cli_path() { return WORDCRAFT_CLI; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::string pattern = (std::filesystem::temp_directory_path() / ("wordcraft-" + tag + "-XXXXXX")).string();
        if (!mkdtemp(pattern.data())) throw std::runtime_error("mkdtemp failed");
        path_ = pattern;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    std::filesystem::path path_;
};

/// Runs argv to completion and returns the exit status (-1 if signalled).
inline int run_command(const std::vector<std::string>& args, const std::vector<std::string>& env = {},
                       const std::string& stdout_path = "") {
    const pid_t pid = fork();
    if (pid < 0) throw std::runtime_error("fork failed");
    if (pid == 0) {
        for (const auto& e : env) putenv(const_cast<char*>(e.c_str()));
        if (!stdout_path.empty()) {
            const int fd = open(stdout_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
            dup2(fd, 1);
            close(fd);
        }
        std::vector<char*> argv;
        for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
        argv.push_back(nullptr);
        execv(argv[0], argv.data());
        _exit(127);
    }
    int status = 0;
    waitpid(pid, &status, 0);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

/// `wordcraft serve` on a free loopback port, killed on destruction.
class ServerProcess {
public:
    ServerProcess(const std::filesystem::path& store, const std::vector<std::string>& env = {}) {
        int fds[2];
        if (pipe(fds) != 0) throw std::runtime_error("pipe failed");
        pid_ = fork();
        if (pid_ < 0) throw std::runtime_error("fork failed");
        if (pid_ == 0) {
            for (const auto& e : env) putenv(const_cast<char*>(e.c_str()));
            dup2(fds[1], 1);
            close(fds[0]);
            close(fds[1]);
            const std::string cli = cli_path().string(), dir = store.string();
            execl(cli.c_str(), cli.c_str(), "serve", "--addr", "127.0.0.1:0", "--store-dir", dir.c_str(), nullptr);
            _exit(127);
        }
        close(fds[1]);
        // First stdout line: "listening on 127.0.0.1:<port>".
        std::string line;
        char c;
        while (read(fds[0], &c, 1) == 1 && c != '\n') line += c;
        close(fds[0]);
        const auto colon = line.rfind(':');
        if (line.rfind("listening on", 0) != 0 || colon == std::string::npos) {
            kill_now();
            throw std::runtime_error("server did not start: '" + line + "'");
        }
        port_ = std::stoi(line.substr(colon + 1));
    }
    ~ServerProcess() { kill_now(); }

    int port() const { return port_; }

    /// Waits for the process to exit by itself; returns its exit status.
    int wait_exit() {
        int status = 0;
        waitpid(pid_, &status, 0);
        pid_ = -1;
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    void kill_now() {
        if (pid_ <= 0) return;
        kill(pid_, SIGKILL);
        waitpid(pid_, nullptr, 0);
        pid_ = -1;
    }

private:
    pid_t pid_ = -1;
    int port_ = 0;
};

}  // namespace wordcraft::testing
