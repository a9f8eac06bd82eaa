#include <cstdio>
#include <cstdlib>

#include "nmqj/acceptance.hpp"

int main(int argc, char** argv) {
    bool ok = true;
    if (argc > 1) {
        for (int i = 1; i < argc; ++i) {
            const auto r = nmqj::run_criterion(std::atoi(argv[i]));
            std::printf("%s\n", nmqj::format_result(r).c_str());
            ok = ok && r.pass;
        }
        return ok ? 0 : 1;
    }
    for (const auto& r : nmqj::run_acceptance_suite()) {
        std::printf("%s\n", nmqj::format_result(r).c_str());
        std::fflush(stdout);
        ok = ok && r.pass;
    }
    return ok ? 0 : 1;
}
