#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "vislip/common.hpp"

int main(int argc, char** argv) {
    vislip::set_warnings_enabled(false);
    doctest::Context ctx(argc, argv);
    return ctx.run();
}
