#include <doctest.h>

TEST_SUITE("gru") {}
