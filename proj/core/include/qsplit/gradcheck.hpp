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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qsplit/circuit.hpp"
#include "qsplit/gradient.hpp"
#include "qsplit/rng.hpp"

namespace qsplit {

/// A random circuit over 1..max_qubits qubits with at most max_params
/// parameters. Mixes data rotations, fixed gates, trainable single-qubit
/// and controlled rotations, and parameters reused by several angles with
/// random scales.
Circuit random_circuit(Rng &rng, std::size_t max_qubits, std::size_t max_params);

/// A random head linear in the final density matrix: weighted Pauli-Z
/// expectations plus weighted basis probabilities.
ScalarHead random_linear_head(Rng &rng, std::size_t num_qubits);

struct GradCheckOptions {
    std::size_t circuits = 50;
    std::size_t max_qubits = 6;
    std::size_t max_params = 36;
    std::uint64_t seed = 7;
    double epsilon = 1e-4;
    ParamShiftOptions shift{};
};

struct GradCheckReport {
    std::size_t circuits = 0;
    std::size_t params_checked = 0;
    double max_abs_error = 0.0;
};

/// Parameter shift on the lowered circuit against central differences on
/// the original, over options.circuits random circuits.
GradCheckReport run_grad_check(const GradCheckOptions &options);

}  // namespace qsplit
