#include <doctest.h>

TEST_SUITE("confusion") {}
