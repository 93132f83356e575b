#include "nmr/experiment.hpp"
