// Shared doctest entry point. After the cases run it checks the global
// first-order audit: no first-order energy evaluated in this process may be
// negative beyond rounding.

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdio>

#include "swflow/functional.hpp"

int main(int argc, char** argv) {
    doctest::Context ctx(argc, argv);
    const int res = ctx.run();
    if (ctx.shouldExit()) return res;
    const auto audit = swflow::first_order_audit();
    if (audit.evaluations > 0 && audit.minimum < -1e-12) {
        std::printf("first-order audit FAILED: minimum %.3e over %llu evaluations\n", audit.minimum,
                    static_cast<unsigned long long>(audit.evaluations));
        return 1;
    }
    std::printf("first-order audit: %llu evaluations, minimum %.3e\n",
                static_cast<unsigned long long>(audit.evaluations), audit.evaluations ? audit.minimum : 0.0);
    return res;
}
