#pragma once

// Serial reference implementations of the hot kernels. Same arithmetic and
// same summation order as the OpenMP versions, plain loops only; kept for
// the bitwise parallel-consistency tests and the benchmark.

#include "vsense/dynamics.hpp"
#include "vsense/grid.hpp"
#include "vsense/soliton.hpp"

namespace vsense::ref {

double integrate(const ScalarField& field);
Complex inner(const ComplexField& a, const ComplexField& b);
ScalarField laplacian(const ScalarField& field);
ScalarField charge_density(const VortexConfiguration& config, const GridSpec& spec);
ComplexField wavefunction(const VortexConfiguration& config, const GridSpec& spec);
ComplexField evolve(const EvolvedState& state, const GridSpec& spec);

}  // namespace vsense::ref
