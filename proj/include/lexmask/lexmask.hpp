// Copyright 2026 The lexmask Authors
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

#include "lexmask/chunker.hpp"
#include "lexmask/clean.hpp"
#include "lexmask/document.hpp"
#include "lexmask/error.hpp"
#include "lexmask/lexicon.hpp"
#include "lexmask/masker.hpp"
#include "lexmask/metrics.hpp"
#include "lexmask/propagation.hpp"
#include "lexmask/rng.hpp"
#include "lexmask/segment.hpp"
#include "lexmask/utf8.hpp"
