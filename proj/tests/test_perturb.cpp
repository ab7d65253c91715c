#include <doctest.h>

TEST_SUITE("perturb") {}
