#pragma once

#include "sislab/config.hpp"
#include "sislab/experiments.hpp"

namespace sislab {

/// Acceptance criteria 1-13 on built-in coefficient sets and seeded random
/// suites. Each criterion is evaluated independently; an exception inside one
/// marks only that criterion failed, with the message as its detail.
ConvergenceReport run_verify();

/// run_verify twice; criterion 14 compares the two summary bodies (runtimes
/// excluded) byte for byte. Provenance is taken from `cfg`.
ConvergenceReport run_verify_twice(const RunConfig& cfg);

}  // namespace sislab
