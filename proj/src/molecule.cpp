#include "nmr/molecule.hpp"
