// Copyright 2026 The datamin authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "datamin/command.hpp"
#include "datamin/error.hpp"
#include "datamin/io.hpp"
#include "datamin/minimiser.hpp"
#include "datamin/monitor.hpp"
#include "datamin/program.hpp"
#include "datamin/properties.hpp"
#include "datamin/tester.hpp"
#include "datamin/trace.hpp"
