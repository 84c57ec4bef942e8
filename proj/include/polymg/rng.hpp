#pragma once

#include <cstdint>
#include <random>

namespace polymg {

/// Deterministic uniform double in [0,1); avoids the distribution classes,
/// whose output is implementation-defined.
inline double uniform01(std::mt19937_64& gen) {
  return double(gen() >> 11) * 0x1.0p-53;
}

}  // namespace polymg
