// Copyright 2026 The mpflab Authors
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

#include "mpflab/bch.hpp"
#include "mpflab/commutator_metrics.hpp"
#include "mpflab/defaults.hpp"
#include "mpflab/error.hpp"
#include "mpflab/experiments.hpp"
#include "mpflab/hamiltonian.hpp"
#include "mpflab/mpf.hpp"
#include "mpflab/operator.hpp"
#include "mpflab/parallel.hpp"
#include "mpflab/pauli.hpp"
#include "mpflab/product_formula.hpp"
#include "mpflab/serialize.hpp"
