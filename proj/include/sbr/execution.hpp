#pragma once

namespace sbr {

// Selects between the OpenMP kernel and its single-threaded reference.
// Both paths produce bit-identical results; the serial path exists for
// testing and benchmarking.
enum class Execution { serial, parallel };

}  // namespace sbr
