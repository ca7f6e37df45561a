#pragma once

#include <cstdio>
#include <functional>
#include <string>
#include <sys/wait.h>

/// Returns true when fn() throws an exception whose message contains `needle`.
inline bool throws_containing(const std::function<void()>& fn, const std::string& needle) {
    try {
        fn();
    } catch (const std::exception& e) {
        return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
}

struct CommandResult {
    int exit_code = -1;
    std::string output; // stdout only
};

/// Runs a shell command, capturing stdout; stderr is left on the test's stream.
inline CommandResult run_cmd(const std::string& cmd) {
    CommandResult r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) {
        return r;
    }
    char buf[4096];
    std::size_t k = 0;
    while ((k = ::fread(buf, 1, sizeof(buf), pipe)) > 0) {
        r.output.append(buf, k);
    }
    const int status = ::pclose(pipe);
    r.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    return r;
}
