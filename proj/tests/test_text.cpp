#include <doctest.h>

TEST_SUITE("text") {}
