#include <doctest.h>

TEST_SUITE("g2p") {}
