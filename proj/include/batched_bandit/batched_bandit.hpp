// Copyright 2026 The batched-bandit Authors.
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

#include "batched_bandit/bounds.hpp"
#include "batched_bandit/core.hpp"
#include "batched_bandit/grids.hpp"
#include "batched_bandit/harness.hpp"
#include "batched_bandit/policies.hpp"
#include "batched_bandit/random.hpp"
#include "batched_bandit/simulator.hpp"
