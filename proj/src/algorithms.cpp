#include "nmr/algorithms.hpp"
