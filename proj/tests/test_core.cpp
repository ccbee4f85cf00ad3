#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include "intmat.hpp"
TEST_CASE("smoke") { CHECK(sieglab::IntMatrix::identity(2).det() == 1); }
