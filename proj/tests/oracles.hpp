// Independent reference implementations used only by the tests.
#pragma once

#include <cstddef>
#include <cstdint>
#include <queue>
#include <utility>
#include <vector>

namespace oracle {

struct Betti {
    std::size_t b0 = 0, b1 = 0;
};

// Flood fill over an n x n cell mask (row-major, row = y). Closed cells that
// share a vertex touch, so the set uses 8-connectivity. Complement cells can
// only meet across an edge, so the complement uses 4-connectivity; beta_1
// counts complement components that do not reach the padded border.
inline Betti flood_fill_betti(const std::vector<std::uint8_t>& cells, std::size_t n) {
    const std::size_t w = n + 2;
    std::vector<std::uint8_t> pad(w * w, 0);
    for (std::size_t y = 0; y < n; ++y)
        for (std::size_t x = 0; x < n; ++x) pad[(y + 1) * w + x + 1] = cells[y * n + x];
    std::vector<int> label(w * w, -1);
    auto fill = [&](std::size_t start, std::uint8_t value, bool diagonal) {
        std::queue<std::size_t> q;
        q.push(start);
        label[start] = 1;
        bool touches_border = false;
        while (!q.empty()) {
            const std::size_t c = q.front();
            q.pop();
            const long cx = static_cast<long>(c % w), cy = static_cast<long>(c / w);
            if (cx == 0 || cy == 0 || cx + 1 == static_cast<long>(w) || cy + 1 == static_cast<long>(w))
                touches_border = true;
            for (long dy = -1; dy <= 1; ++dy)
                for (long dx = -1; dx <= 1; ++dx) {
                    if ((dx == 0 && dy == 0) || (!diagonal && dx != 0 && dy != 0)) continue;
                    const long nx = cx + dx, ny = cy + dy;
                    if (nx < 0 || ny < 0 || nx >= static_cast<long>(w) || ny >= static_cast<long>(w)) continue;
                    const std::size_t nb = static_cast<std::size_t>(ny) * w + static_cast<std::size_t>(nx);
                    if (pad[nb] != value || label[nb] != -1) continue;
                    label[nb] = 1;
                    q.push(nb);
                }
        }
        return touches_border;
    };
    Betti b;
    for (std::size_t c = 0; c < w * w; ++c) {
        if (label[c] != -1) continue;
        if (pad[c]) {
            fill(c, 1, true);
            ++b.b0;
        } else if (!fill(c, 0, false)) {
            ++b.b1;
        }
    }
    return b;
}

// Runs of consecutive member cells.
inline std::size_t runs_1d(const std::vector<std::uint8_t>& cells) {
    std::size_t runs = 0;
    for (std::size_t i = 0; i < cells.size(); ++i)
        if (cells[i] && (i == 0 || !cells[i - 1])) ++runs;
    return runs;
}

}  // namespace oracle
