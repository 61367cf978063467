// Copyright 2026 the kgsr authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "kgsr/train/losses.hpp"

namespace kgsr::train {

/// Loop-by-loop re-evaluation of objective() in extended precision. Shares
/// no code with the Eigen forward pass, so it serves as the
/// finite-difference oracle for the analytic gradients.
long double reference_objective(const model::Model& m, const ObjectiveContext& ctx, const Batch& batch);

}  // namespace kgsr::train
