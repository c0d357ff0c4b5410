// Copyright 2026 The qsplit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "qsplit/circuit.hpp"
#include "qsplit/state.hpp"

namespace qsplit {

using GradVector = std::vector<double>;

/// Maps a final state to a real number. Parameter-shift gradients are
/// exact only when the head is linear in the density matrix, i.e. a fixed
/// weighted sum of expectation values or basis probabilities.
using ScalarHead = std::function<double(const StateVector &)>;

class GradientError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct ParamShiftOptions {
    double shift = std::numbers::pi / 2.0;
    double prefactor = 0.5;
};

/// Two-term parameter-shift gradient of head(evaluate(params, input)).
///
/// Every angle bound to a parameter is shifted on its own by +-shift; a
/// parameter that appears in several angles (as in a lowered CU3)
/// accumulates scale * prefactor * [f(+) - f(-)] over its occurrences.
/// Trainable angles must sit in RX/RY/RZ/U3; run
/// decompose_trainable_controlled() first for circuits with trainable
/// controlled gates.
///
/// Shifted evaluations restart from the cached state just before the
/// shifted op, so the cost per occurrence is the circuit suffix only.
GradVector param_shift_grad(const Circuit &circuit, std::span<const double> params, std::span<const double> input,
                            const ScalarHead &head, const ParamShiftOptions &options = {});

/// Central differences [f(p + eps e_i) - f(p - eps e_i)] / (2 eps) through
/// full re-evaluations of the circuit.
GradVector finite_diff_grad(const Circuit &circuit, std::span<const double> params, std::span<const double> input,
                            const ScalarHead &head, double epsilon);

/// Central-difference gradient of a function of a classical vector.
std::vector<double> finite_diff_input_grad(const std::function<double(std::span<const double>)> &f,
                                           std::span<const double> x, double epsilon = 1e-4);

/// Replaces every trainable controlled gate with CX/CZ and single-qubit
/// rotations so that each trainable angle is two-term shiftable. The
/// realized unitary is unchanged up to global phase. Ops that are not
/// trainable, and circuits without trainable controlled gates, pass
/// through unchanged.
Circuit decompose_trainable_controlled(const Circuit &circuit);

}  // namespace qsplit
