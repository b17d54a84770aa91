#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

#include "nfrbench/orchestrator.hpp"

namespace nfrbench {

namespace {

using Clock = std::chrono::steady_clock;

void close_fd(int& fd) {
    if (fd >= 0) ::close(fd);
    fd = -1;
}

void write_all(int fd, std::string_view data) {
    while (!data.empty()) {
        const ssize_t n = ::write(fd, data.data(), data.size());
        if (n < 0) {
            if (errno == EINTR) continue;
            throw RunnerUnavailable(std::string("write to runner failed: ") + std::strerror(errno));
        }
        data.remove_prefix(static_cast<std::size_t>(n));
    }
}

}  // namespace

ProcessRunner::ProcessRunner(std::vector<std::string> argv, int pool_size, std::chrono::milliseconds grace)
    : argv_(std::move(argv)), grace_(grace), workers_(static_cast<std::size_t>(std::max(1, pool_size))) {
    if (argv_.empty()) throw std::invalid_argument("runner command is empty");
    argv_.push_back("--protocol=" + std::to_string(kProtocolVersion));
    // A dead worker must surface as EPIPE on write, not kill us.
    ::signal(SIGPIPE, SIG_IGN);
}

ProcessRunner::~ProcessRunner() {
    for (auto& w : workers_) kill(w);
}

void ProcessRunner::spawn(Worker& w) {
    int to_child[2];
    int from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0) throw RunnerUnavailable("pipe failed");
    if (::pipe2(from_child, O_CLOEXEC) != 0) {
        ::close(to_child[0]);
        ::close(to_child[1]);
        throw RunnerUnavailable("pipe failed");
    }

    std::vector<char*> args;
    for (auto& a : argv_) args.push_back(a.data());
    args.push_back(nullptr);

    const pid_t pid = ::fork();
    if (pid < 0) {
        for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
        throw RunnerUnavailable("fork failed");
    }
    if (pid == 0) {
        // Own process group, so killing the worker also reaps anything it spawned.
        ::setpgid(0, 0);
        ::dup2(to_child[0], STDIN_FILENO);
        ::dup2(from_child[1], STDOUT_FILENO);
        ::execvp(args[0], args.data());
        ::_exit(127);
    }
    ::setpgid(pid, pid);
    ::close(to_child[0]);
    ::close(from_child[1]);
    w.pid = pid;
    w.in_fd = to_child[1];
    w.out_fd = from_child[0];
    w.buffer.clear();
}

void ProcessRunner::kill(Worker& w) {
    close_fd(w.in_fd);
    close_fd(w.out_fd);
    if (w.pid > 0) {
        ::kill(-w.pid, SIGKILL);
        ::kill(w.pid, SIGKILL);
        ::waitpid(w.pid, nullptr, 0);
    }
    w.pid = -1;
    w.buffer.clear();
}

std::string ProcessRunner::read_line(Worker& w, Clock::time_point deadline) {
    for (;;) {
        if (auto nl = w.buffer.find('\n'); nl != std::string::npos) {
            std::string line = w.buffer.substr(0, nl);
            w.buffer.erase(0, nl + 1);
            return line;
        }
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
        if (left.count() <= 0) throw RunnerUnavailable("runner did not answer before the deadline");
        pollfd p{w.out_fd, POLLIN, 0};
        const int r = ::poll(&p, 1, static_cast<int>(std::min<long long>(left.count(), 60'000)));
        if (r < 0) {
            if (errno == EINTR) continue;
            throw RunnerUnavailable("poll failed");
        }
        if (r == 0) continue;
        char chunk[65536];
        const ssize_t n = ::read(w.out_fd, chunk, sizeof chunk);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw RunnerUnavailable("read from runner failed");
        }
        if (n == 0) throw RunnerUnavailable("runner exited");
        w.buffer.append(chunk, static_cast<std::size_t>(n));
    }
}

RunnerResponse ProcessRunner::execute(const RunnerRequest& req) {
    Worker* w = nullptr;
    {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] {
            return std::any_of(workers_.begin(), workers_.end(), [](const Worker& x) { return !x.busy; });
        });
        for (auto& x : workers_) {
            if (!x.busy) {
                w = &x;
                break;
            }
        }
        w->busy = true;
    }
    struct Release {
        ProcessRunner& self;
        Worker& w;
        ~Release() {
            {
                std::lock_guard lock(self.mu_);
                w.busy = false;
            }
            self.cv_.notify_one();
        }
    } release{*this, *w};

    try {
        if (w->pid < 0) spawn(*w);
        // Each test runs in its own process with its own limit; allow for all
        // of them plus interpreter start-up.
        const auto per_test = std::chrono::milliseconds(static_cast<long long>(req.limits.timeout_s * 1000.0)) + grace_;
        const auto deadline = Clock::now() + per_test * static_cast<long long>(req.tests.size() + 1) + grace_;
        write_all(w->in_fd, wire::encode_request(req) + "\n");
        RunnerResponse res = wire::decode_response(read_line(*w, deadline));
        if (res.id != req.id) throw ProtocolError("response id '" + res.id + "' does not echo '" + req.id + "'");
        return res;
    } catch (const ProtocolError& e) {
        kill(*w);
        throw RunnerUnavailable(std::string("protocol desync: ") + e.what());
    } catch (...) {
        kill(*w);
        throw;
    }
}

}  // namespace nfrbench
