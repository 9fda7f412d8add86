// Copyright 2026 The qstab developers
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

#include "qstab/addressability.hpp"
#include "qstab/chart_io.hpp"
#include "qstab/dataset.hpp"
#include "qstab/device_metrics.hpp"
#include "qstab/histogram.hpp"
#include "qstab/mbd.hpp"
#include "qstab/rng.hpp"
#include "qstab/run_config.hpp"
#include "qstab/stability.hpp"
#include "qstab/studies.hpp"
#include "qstab/synth.hpp"
#include "qstab/timeutil.hpp"
