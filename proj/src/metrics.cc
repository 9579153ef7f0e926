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

#include "cgate/metrics.h"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>

#include "cgate/util.h"

namespace cgate {
namespace {

// Cubic in a normalised abscissa s = (psnr - center) / scale.
struct LogRateFit {
  std::array<double, 4> coef{};
  double center = 0.0;
  double scale = 1.0;

  // Integral of the fitted log10(rate) over psnr in [lo, hi].
  double Integrate(double lo, double hi) const {
    const auto antiderivative = [&](double psnr) {
      const double s = (psnr - center) / scale;
      double value = 0.0;
      double power = s;
      for (int k = 0; k < 4; ++k) {
        value += coef[k] * power / (k + 1);
        power *= s;
      }
      return value * scale;
    };
    return antiderivative(hi) - antiderivative(lo);
  }
};

LogRateFit FitLogRate(const RdCurve& curve) {
  const auto& points = curve.points();
  double lo = points.front().psnr;
  double hi = lo;
  for (const RdPoint& p : points) {
    lo = std::min(lo, p.psnr);
    hi = std::max(hi, p.psnr);
  }
  LogRateFit fit;
  fit.center = 0.5 * (lo + hi);
  fit.scale = std::max(0.5 * (hi - lo), 1e-12);
  const int n = static_cast<int>(points.size());
  Eigen::MatrixXd design(n, 4);
  Eigen::VectorXd target(n);
  for (int i = 0; i < n; ++i) {
    const double s = (points[i].psnr - fit.center) / fit.scale;
    double power = 1.0;
    for (int k = 0; k < 4; ++k) {
      design(i, k) = power;
      power *= s;
    }
    target(i) = std::log10(points[i].rate);
  }
  const Eigen::VectorXd solution = design.colPivHouseholderQr().solve(target);
  for (int k = 0; k < 4; ++k) fit.coef[k] = solution(k);
  return fit;
}

}  // namespace

double TimeSaving(double t_anchor, double t_modified) {
  if (!(t_anchor > 0.0)) {
    throw Error(StrFormat("time saving needs a positive anchor time, got %g",
                          t_anchor));
  }
  return (1.0 - t_modified / t_anchor) * 100.0;
}

double Mse(const Plane& reference, const Plane& test, int width, int height) {
  if (reference.width() != test.width() ||
      reference.height() != test.height()) {
    throw Error("psnr: plane dimensions differ");
  }
  if (width <= 0 || height <= 0 || width > reference.width() ||
      height > reference.height()) {
    throw Error("psnr: logical region outside the plane");
  }
  int64_t sum = 0;
  for (int y = 0; y < height; ++y) {
    const uint8_t* a = reference.Row(y);
    const uint8_t* b = test.Row(y);
    for (int x = 0; x < width; ++x) {
      const int d = a[x] - b[x];
      sum += d * d;
    }
  }
  return static_cast<double>(sum) / (static_cast<double>(width) * height);
}

double Psnr(const Plane& reference, const Plane& test, int width, int height) {
  const double mse = Mse(reference, test, width, height);
  if (mse == 0.0) return kPsnrCapDb;
  return std::min(kPsnrCapDb, 10.0 * std::log10(255.0 * 255.0 / mse));
}

RdCurve RdCurve::FromPoints(std::vector<RdPoint> points) {
  if (static_cast<int>(points.size()) != kNumPoints) {
    throw Error(StrFormat("RD curve needs exactly %d points, got %zu",
                          kNumPoints, points.size()));
  }
  for (const RdPoint& p : points) {
    if (!(p.rate > 0.0) || !std::isfinite(p.rate)) {
      throw Error("RD point rate must be positive");
    }
    if (!std::isfinite(p.psnr)) throw Error("RD point PSNR must be finite");
  }
  std::stable_sort(points.begin(), points.end(),
                   [](const RdPoint& a, const RdPoint& b) {
                     return a.rate < b.rate;
                   });
  for (size_t i = 1; i < points.size(); ++i) {
    if (points[i].rate <= points[i - 1].rate) {
      points[i].rate = points[i - 1].rate * (1.0 + 1e-9);
    }
  }
  for (size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].psnr > points[i - 1].psnr)) {
      throw Error(StrFormat(
          "RD curve is not monotone: rate %.6g has PSNR %.4f after %.4f",
          points[i].rate, points[i].psnr, points[i - 1].psnr));
    }
  }
  return RdCurve(std::move(points));
}

double BdBr(const RdCurve& anchor, const RdCurve& test) {
  const auto& a = anchor.points();
  const auto& b = test.points();
  const double lo = std::max(a.front().psnr, b.front().psnr);
  const double hi = std::min(a.back().psnr, b.back().psnr);
  if (!(hi - lo >= kMinPsnrOverlapDb)) {
    throw Error(StrFormat(
        "BD-BR: PSNR ranges overlap by %.3f dB, need at least %.1f dB",
        hi - lo, kMinPsnrOverlapDb));
  }
  const LogRateFit fit_anchor = FitLogRate(anchor);
  const LogRateFit fit_test = FitLogRate(test);
  const double delta =
      (fit_test.Integrate(lo, hi) - fit_anchor.Integrate(lo, hi)) / (hi - lo);
  return (std::pow(10.0, delta) - 1.0) * 100.0;
}

ModeShare ModeShareFromCounts(int srfpm, int crfpm) {
  const int total = srfpm + crfpm;
  if (total <= 0) throw Error("mode share of an empty block set");
  return {100.0 * srfpm / total, 100.0 * crfpm / total};
}

ModeShare ComputeModeShare(std::span<const BlockRecord> records) {
  int compound = 0;
  for (const BlockRecord& r : records) compound += IsCompound(r.choice);
  return ModeShareFromCounts(static_cast<int>(records.size()) - compound,
                             compound);
}

}  // namespace cgate
