// Copyright 2026 The eigloc Authors. All Rights Reserved.
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

#include "eigloc/bench.hpp"
#include "eigloc/completion.hpp"
#include "eigloc/csv.hpp"
#include "eigloc/dual_source.hpp"
#include "eigloc/error.hpp"
#include "eigloc/field_model.hpp"
#include "eigloc/linalg.hpp"
#include "eigloc/optimize.hpp"
#include "eigloc/piecewise_linear.hpp"
#include "eigloc/rng.hpp"
#include "eigloc/rotation.hpp"
#include "eigloc/sampling.hpp"
#include "eigloc/spectral.hpp"
