#include "vendor/doctest.h"
