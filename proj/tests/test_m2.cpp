#include <doctest.h>

TEST_SUITE("m2") {}
