// Protocol-speaking stand-in for the sandbox runner. Reads one request per
// line on stdin and answers with the stub directives' verdicts.
#include <cstring>
#include <iostream>
#include <string>

#include "nfrbench/orchestrator.hpp"

int main(int argc, char** argv) {
    int version = nfrbench::kProtocolVersion;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a.rfind("--protocol=", 0) == 0) {
            version = std::atoi(a.c_str() + 11);
        } else if (a == "--protocol" && i + 1 < argc) {
            version = std::atoi(argv[++i]);
        } else {
            std::cerr << "usage: nfrbench-stub-runner [--protocol=1]\n";
            return 2;
        }
    }
    if (version != nfrbench::kProtocolVersion) {
        std::cerr << "unsupported protocol version " << version << "\n";
        return 2;
    }

    std::ios::sync_with_stdio(false);
    for (std::string line; std::getline(std::cin, line);) {
        if (line.empty()) continue;
        nfrbench::RunnerResponse res;
        try {
            res = nfrbench::stub_execute(nfrbench::wire::decode_request(line));
        } catch (const std::exception& e) {
            res.id = nfrbench::wire::salvage_id(line).value_or("");
            res.runner_error = std::string("malformed request: ") + e.what();
        }
        std::cout << nfrbench::wire::encode_response(res) << '\n' << std::flush;
    }
    return 0;
}
