// Copyright 2026 The cgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CGATE_METRICS_H_
#define CGATE_METRICS_H_

#include <span>
#include <vector>

#include "cgate/codec.h"
#include "cgate/video.h"

namespace cgate {

constexpr double kPsnrCapDb = 99.0;

// Eq. (1)-style encoder time saving in percent: (1 - t_modified / t_anchor).
double TimeSaving(double t_anchor, double t_modified);

// Luma PSNR over the top-left width x height region; identical frames give
// the 99 dB cap.
double Psnr(const Plane& reference, const Plane& test, int width, int height);
// Mean squared error over the same region.
double Mse(const Plane& reference, const Plane& test, int width, int height);

struct RdPoint {
  double rate = 0.0;  // bits per second
  double psnr = 0.0;  // dB
};

// Four points sorted by ascending rate with strictly increasing rates.
class RdCurve {
 public:
  static constexpr int kNumPoints = 4;

  // Sorts, nudges tied rates apart by 1e-9 relative and validates.
  static RdCurve FromPoints(std::vector<RdPoint> points);

  const std::vector<RdPoint>& points() const { return points_; }

 private:
  explicit RdCurve(std::vector<RdPoint> points) : points_(std::move(points)) {}
  std::vector<RdPoint> points_;
};

constexpr double kMinPsnrOverlapDb = 0.5;

// Bjontegaard delta rate in percent of |test| against |anchor| using cubic
// fits of log10(rate) over PSNR. Positive means the test needs more bits.
double BdBr(const RdCurve& anchor, const RdCurve& test);

struct ModeShare {
  double srfpm_pct = 0.0;
  double crfpm_pct = 0.0;
};

ModeShare ComputeModeShare(std::span<const BlockRecord> records);
ModeShare ModeShareFromCounts(int srfpm, int crfpm);

}  // namespace cgate

#endif  // CGATE_METRICS_H_
