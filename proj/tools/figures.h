// Copyright 2026 The metrokit Authors
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

// Datasets behind the published figures.

#pragma once

#include <vector>

#include "cli_app.h"

namespace metrokit::cli {

// fig2: per-probe QFI rate bounds vs t for parallel and fast-control schemes.
std::vector<Table> figure2(const RunConfig& c);
// fig3: optimized parallel rate bound vs N against the sequential rate.
std::vector<Table> figure3(const RunConfig& c);
// fig4: threshold probe numbers vs p.
std::vector<Table> figure4(const RunConfig& c);
// fig5: gap between the two phase-estimation strategies.
std::vector<Table> figure5(const RunConfig& c);

}  // namespace metrokit::cli
