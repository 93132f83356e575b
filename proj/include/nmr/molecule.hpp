#pragma once

#include <string>

#include "nmr/spin_system.hpp"

namespace nmr {

// Molecule files are JSON: name, offsets_hz, j_hz (full symmetric matrix or
// upper triangle rows), optional dipolar_hz, t1_s, t2_s, polarization_ratio,
// medium ("isotropic" | "liquid_crystal"), optional t2_sys_s.
SpinSystem load_molecule(const std::string& path);
SpinSystem parse_molecule(const std::string& json_text);
std::string molecule_to_json(const SpinSystem& sys);

}  // namespace nmr
