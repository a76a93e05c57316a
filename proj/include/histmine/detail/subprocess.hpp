#pragma once

#include <cerrno>
#include <cstring>
#include <string>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include "histmine/error.hpp"

namespace histmine::detail {

struct CommandResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

// Runs a program (argv[0] located via PATH) and captures stdout/stderr.
// If stdin_file is non-empty it is attached as the child's stdin, otherwise
// stdin is /dev/null. Throws only when the process cannot be spawned;
// a nonzero child exit is reported through exit_code.
inline CommandResult run_command(const std::vector<std::string>& argv,
                                 const std::string& stdin_file = {}) {
    if (argv.empty()) throw Error(ErrorKind::external, "empty command");

    int out_pipe[2];
    int err_pipe[2];
    if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0)
        throw Error(ErrorKind::external, "pipe failed: " + std::string(std::strerror(errno)));

    pid_t pid = fork();
    if (pid < 0)
        throw Error(ErrorKind::external, "fork failed: " + std::string(std::strerror(errno)));

    if (pid == 0) {
        int in_fd = open(stdin_file.empty() ? "/dev/null" : stdin_file.c_str(), O_RDONLY);
        if (in_fd < 0) _exit(127);
        dup2(in_fd, STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(err_pipe[1], STDERR_FILENO);
        close(in_fd);
        close(out_pipe[0]);
        close(out_pipe[1]);
        close(err_pipe[0]);
        close(err_pipe[1]);

        std::vector<char*> args;
        args.reserve(argv.size() + 1);
        for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
        execvp(args[0], args.data());
        _exit(127);
    }

    close(out_pipe[1]);
    close(err_pipe[1]);

    CommandResult result;
    // Drain both pipes concurrently; the child may interleave large writes.
    struct Stream {
        int fd;
        std::string* sink;
        bool open;
    };
    Stream streams[2] = {{out_pipe[0], &result.out, true},
                         {err_pipe[0], &result.err, true}};
    char buf[65536];
    while (streams[0].open || streams[1].open) {
        pollfd fds[2];
        nfds_t n = 0;
        for (auto& s : streams)
            if (s.open) fds[n++] = pollfd{s.fd, POLLIN, 0};
        if (poll(fds, n, -1) < 0) {
            if (errno == EINTR) continue;
            break;
        }
        nfds_t k = 0;
        for (auto& s : streams) {
            if (!s.open) continue;
            const pollfd& p = fds[k++];
            if ((p.revents & (POLLIN | POLLHUP | POLLERR)) == 0) continue;
            ssize_t got = read(s.fd, buf, sizeof buf);
            if (got > 0)
                s.sink->append(buf, static_cast<size_t>(got));
            else if (got == 0 || errno != EINTR)
                s.open = false;
        }
    }
    close(out_pipe[0]);
    close(err_pipe[0]);

    int status = 0;
    while (waitpid(pid, &status, 0) < 0) {
        if (errno != EINTR)
            throw Error(ErrorKind::external, "waitpid failed");
    }
    if (WIFEXITED(status))
        result.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status))
        result.exit_code = 128 + WTERMSIG(status);
    return result;
}

} // namespace histmine::detail
