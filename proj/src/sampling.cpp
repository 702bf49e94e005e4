#include "gk/sampling.hpp"

// header-only; this translation unit just anchors the target
