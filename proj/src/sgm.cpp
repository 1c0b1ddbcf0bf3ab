#include "mode/sgm.hpp"

#include <limits>
#include <vector>

#include "mode/errors.hpp"
#include "mode/parallel.hpp"

namespace mode::detail {

namespace {

constexpr int kDirs[8][2] = {{0, 1},  {0, -1}, {1, 0},  {-1, 0},
                             {1, 1},  {1, -1}, {-1, 1}, {-1, -1}};

struct Scan {
  int r0, c0;
  int steps;
  int accum_from;  // accumulate L into the output from this step on
};

inline int wrap_index(int i, int n) {
  int m = i % n;
  if (m < 0) m += n;
  return m;
}

std::vector<Scan> scanlines_for(int dr, int dc, int height, int width,
                                WrapAxis wrap) {
  std::vector<Scan> scans;
  if (wrap == WrapAxis::kRows) {
    if (dc != 0) {
      const int c0 = dc > 0 ? 0 : width - 1;
      for (int r = 0; r < height; ++r) scans.push_back({r, c0, width, 0});
    } else {
      const int r0 = dr > 0 ? 0 : height - 1;
      for (int c = 0; c < width; ++c)
        scans.push_back({r0, c, 2 * height, height});
    }
  } else if (wrap == WrapAxis::kCols) {
    if (dr != 0) {
      const int r0 = dr > 0 ? 0 : height - 1;
      for (int c = 0; c < width; ++c) scans.push_back({r0, c, height, 0});
    } else {
      const int c0 = dc > 0 ? 0 : width - 1;
      for (int r = 0; r < height; ++r)
        scans.push_back({r, c0, 2 * width, width});
    }
  } else {
    auto length_from = [&](int r, int c) {
      int steps = std::numeric_limits<int>::max();
      if (dr > 0) steps = std::min(steps, height - r);
      if (dr < 0) steps = std::min(steps, r + 1);
      if (dc > 0) steps = std::min(steps, width - c);
      if (dc < 0) steps = std::min(steps, c + 1);
      return steps;
    };
    auto is_start = [&](int r, int c) {
      const int pr = r - dr, pc = c - dc;
      return pr < 0 || pr >= height || pc < 0 || pc >= width;
    };
    for (int r = 0; r < height; ++r)
      for (int c = 0; c < width; ++c)
        if (is_start(r, c)) scans.push_back({r, c, length_from(r, c), 0});
  }
  return scans;
}

}  // namespace

void sgm_aggregate_raw(const float* cost, float* out, int height, int width,
                       int num_k, float p1, float p2, WrapAxis wrap,
                       float sentinel) {
  if (!(p1 > 0.0f) || p2 < p1)
    throw ConfigError("sgm: require p2 >= p1 > 0");
  const size_t cells = static_cast<size_t>(height) * width;
  std::fill(out, out + cells * num_k, 0.0f);

  for (const auto& dir : kDirs) {
    const int dr = dir[0], dc = dir[1];
    const auto scans = scanlines_for(dr, dc, height, width, wrap);
    parallel_for(0, static_cast<int>(scans.size()), [&](int si) {
      const Scan& scan = scans[static_cast<size_t>(si)];
      std::vector<float> lprev(num_k), lcur(num_k);
      bool have_prev = false;
      int r = scan.r0, c = scan.c0;
      for (int step = 0; step < scan.steps; ++step) {
        const size_t idx = (static_cast<size_t>(r) * width + c);
        const float* cc = cost + idx * num_k;
        float minprev = std::numeric_limits<float>::infinity();
        bool any_valid_prev = false;
        if (have_prev) {
          for (int k = 0; k < num_k; ++k)
            if (lprev[k] != sentinel) {
              any_valid_prev = true;
              if (lprev[k] < minprev) minprev = lprev[k];
            }
        }
        for (int k = 0; k < num_k; ++k) {
          if (cc[k] == sentinel) {
            lcur[k] = sentinel;
          } else if (!any_valid_prev) {
            lcur[k] = cc[k];
          } else {
            float best = std::numeric_limits<float>::infinity();
            if (lprev[k] != sentinel) best = lprev[k];
            if (k > 0 && lprev[k - 1] != sentinel)
              best = std::min(best, lprev[k - 1] + p1);
            if (k + 1 < num_k && lprev[k + 1] != sentinel)
              best = std::min(best, lprev[k + 1] + p1);
            best = std::min(best, minprev + p2);
            lcur[k] = cc[k] + best - minprev;
          }
        }
        if (step >= scan.accum_from) {
          float* dst = out + idx * num_k;
          for (int k = 0; k < num_k; ++k)
            if (lcur[k] != sentinel) dst[k] += lcur[k];
        }
        lprev.swap(lcur);
        have_prev = true;
        // advance; the wrapped axis steps modulo its extent
        r += dr;
        c += dc;
        if (wrap == WrapAxis::kRows) r = wrap_index(r, height);
        if (wrap == WrapAxis::kCols) c = wrap_index(c, width);
      }
    });
  }

  for (size_t i = 0; i < cells; ++i) {
    float* dst = out + i * num_k;
    const float* src = cost + i * num_k;
    for (int k = 0; k < num_k; ++k)
      dst[k] = src[k] == sentinel ? sentinel : dst[k] * 0.125f;
  }
}

}  // namespace mode::detail
