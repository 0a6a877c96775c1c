// Copyright 2026 The ncdft Authors
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

#include "ncdft/audio_io.hpp"
#include "ncdft/nc_engine.hpp"
#include "ncdft/oracle.hpp"
#include "ncdft/ring_buffer.hpp"
#include "ncdft/scale_planner.hpp"
#include "ncdft/signals.hpp"
#include "ncdft/sweep.hpp"
