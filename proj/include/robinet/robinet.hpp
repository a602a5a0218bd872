// Copyright 2026 The Robinet Authors
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

#include "robinet/core/expm.hpp"
#include "robinet/core/metrics.hpp"
#include "robinet/core/model.hpp"
#include "robinet/core/operators.hpp"
#include "robinet/core/parallel.hpp"
#include "robinet/core/record.hpp"
#include "robinet/core/rng.hpp"
#include "robinet/core/state.hpp"
#include "robinet/core/superop.hpp"
#include "robinet/core/types.hpp"
#include "robinet/expansion/hermite.hpp"
#include "robinet/expansion/perturbative.hpp"
#include "robinet/instrument/exact_map.hpp"
#include "robinet/instrument/quadrature.hpp"
#include "robinet/bench/reconstruction.hpp"
#include "robinet/infer/likelihood.hpp"
#include "robinet/trajectory/sample.hpp"
#include "robinet/trajectory/simulate.hpp"
#include "robinet/verify/postselect.hpp"
