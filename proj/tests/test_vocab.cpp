#include <doctest.h>

TEST_SUITE("vocab") {}
