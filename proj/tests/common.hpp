#pragma once

#include <string>

#include "feigen/extension.hpp"
#include "feigen/solver.hpp"

namespace feigen::testing {

inline std::string data_path(const std::string& name) { return std::string(FEIGEN_DATA_DIR) + "/" + name; }

/// The shipped ell = 2 fixed point, loaded (and verified) once per test binary.
inline const RenormFixedPoint& reference_fp() {
    static const RenormFixedPoint fp = load_fixed_point(data_path("reference_l2.txt"));
    return fp;
}

inline const ExtensionConfig& reference_cfg() {
    static const ExtensionConfig cfg = default_config(reference_fp());
    return cfg;
}

}  // namespace feigen::testing
