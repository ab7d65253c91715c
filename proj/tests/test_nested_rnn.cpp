#include <doctest.h>

TEST_SUITE("nested_rnn") {}
