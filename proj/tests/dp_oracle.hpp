#pragma once

// Brute-force reference for the 8-direction semi-global recurrence. Scanlines
// are materialized as explicit coordinate lists (pure wrap-axis lines as two
// laps around the cylinder, keeping the second), then a plain DP runs over
// each list. Per-step arithmetic matches the spec recurrence exactly, so the
// production path must agree bit for bit.

#include <limits>
#include <utility>
#include <vector>

#include "mode/image.hpp"
#include "mode/stereo.hpp"

inline std::vector<float> sgm_oracle(const std::vector<float>& cost, int H,
                                     int W, int K, float p1, float p2,
                                     mode::WrapAxis wrap) {
  const float sentinel = mode::kCostSentinel;
  const int dirs[8][2] = {{0, 1},  {0, -1}, {1, 0},  {-1, 0},
                          {1, 1},  {1, -1}, {-1, 1}, {-1, -1}};
  std::vector<float> out(cost.size(), 0.0f);

  for (const auto& dir : dirs) {
    const int dr = dir[0], dc = dir[1];
    std::vector<std::pair<std::vector<std::pair<int, int>>, int>> lines;

    auto wrapi = [](int v, int n) { return ((v % n) + n) % n; };
    if (wrap == mode::WrapAxis::kRows) {
      if (dc != 0) {
        for (int r0 = 0; r0 < H; ++r0) {
          std::vector<std::pair<int, int>> coords;
          int r = r0, c = dc > 0 ? 0 : W - 1;
          for (int s = 0; s < W; ++s, r = wrapi(r + dr, H), c += dc)
            coords.emplace_back(r, c);
          lines.emplace_back(std::move(coords), 0);
        }
      } else {
        for (int c = 0; c < W; ++c) {
          std::vector<std::pair<int, int>> coords;
          int r = dr > 0 ? 0 : H - 1;
          for (int s = 0; s < 2 * H; ++s, r = wrapi(r + dr, H))
            coords.emplace_back(r, c);
          lines.emplace_back(std::move(coords), H);
        }
      }
    } else if (wrap == mode::WrapAxis::kCols) {
      if (dr != 0) {
        for (int c0 = 0; c0 < W; ++c0) {
          std::vector<std::pair<int, int>> coords;
          int c = c0, r = dr > 0 ? 0 : H - 1;
          for (int s = 0; s < H; ++s, c = wrapi(c + dc, W), r += dr)
            coords.emplace_back(r, c);
          lines.emplace_back(std::move(coords), 0);
        }
      } else {
        for (int r = 0; r < H; ++r) {
          std::vector<std::pair<int, int>> coords;
          int c = dc > 0 ? 0 : W - 1;
          for (int s = 0; s < 2 * W; ++s, c = wrapi(c + dc, W))
            coords.emplace_back(r, c);
          lines.emplace_back(std::move(coords), W);
        }
      }
    } else {
      for (int r0 = 0; r0 < H; ++r0)
        for (int c0 = 0; c0 < W; ++c0) {
          const int pr = r0 - dr, pc = c0 - dc;
          if (pr >= 0 && pr < H && pc >= 0 && pc < W) continue;
          std::vector<std::pair<int, int>> coords;
          for (int r = r0, c = c0; r >= 0 && r < H && c >= 0 && c < W;
               r += dr, c += dc)
            coords.emplace_back(r, c);
          lines.emplace_back(std::move(coords), 0);
        }
    }

    for (const auto& [coords, accum_from] : lines) {
      std::vector<float> lprev, lcur(static_cast<size_t>(K));
      for (size_t step = 0; step < coords.size(); ++step) {
        const auto [r, c] = coords[step];
        const float* cc = &cost[(static_cast<size_t>(r) * W + c) * K];
        float minprev = std::numeric_limits<float>::infinity();
        bool any = false;
        for (int k = 0; k < K && !lprev.empty(); ++k)
          if (lprev[static_cast<size_t>(k)] != sentinel) {
            any = true;
            minprev = std::min(minprev, lprev[static_cast<size_t>(k)]);
          }
        for (int k = 0; k < K; ++k) {
          if (cc[k] == sentinel) {
            lcur[static_cast<size_t>(k)] = sentinel;
          } else if (!any) {
            lcur[static_cast<size_t>(k)] = cc[k];
          } else {
            float best = std::numeric_limits<float>::infinity();
            if (lprev[static_cast<size_t>(k)] != sentinel)
              best = lprev[static_cast<size_t>(k)];
            if (k > 0 && lprev[static_cast<size_t>(k - 1)] != sentinel)
              best = std::min(best, lprev[static_cast<size_t>(k - 1)] + p1);
            if (k + 1 < K && lprev[static_cast<size_t>(k + 1)] != sentinel)
              best = std::min(best, lprev[static_cast<size_t>(k + 1)] + p1);
            best = std::min(best, minprev + p2);
            lcur[static_cast<size_t>(k)] = cc[k] + best - minprev;
          }
        }
        if (static_cast<int>(step) >= accum_from)
          for (int k = 0; k < K; ++k)
            if (lcur[static_cast<size_t>(k)] != sentinel)
              out[(static_cast<size_t>(r) * W + c) * K +
                  static_cast<size_t>(k)] += lcur[static_cast<size_t>(k)];
        lprev = lcur;
      }
    }
  }

  for (size_t i = 0; i < out.size(); ++i)
    out[i] = cost[i] == sentinel ? sentinel : out[i] * 0.125f;
  return out;
}
