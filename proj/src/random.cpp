#include "hti/random.hpp"

static_assert(hti::split_seed(0, 0) != hti::split_seed(0, 1));
