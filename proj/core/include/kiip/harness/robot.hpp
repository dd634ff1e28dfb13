// Copyright 2026 The KIIP Authors
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

#include "kiip/chain_io.hpp"
#include "kiip/pipeline.hpp"

namespace kiip::harness {

// Fixture robot loosely shaped like a mobile manipulator: a lift, a
// shoulder yaw and two elbow joints, then wrist pitch and wrist roll, plus a
// pan/tilt head. The wrist pitch axis passes through the crop center, so the
// grasped object turns in place in front of the head camera.
inline constexpr double kCameraDistance = 0.35;  // m, head camera to crop center
inline constexpr double kHeadHeight = 1.0;        // m

geom::ChainDescription fixture_arm(double camera_distance = kCameraDistance);
geom::ChainDescription fixture_head();
pipeline::RobotModel fixture_robot(double camera_distance = kCameraDistance);

}  // namespace kiip::harness
