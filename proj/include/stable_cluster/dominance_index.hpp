#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

namespace stable_cluster {

struct CountSum {
  std::size_t count = 0;
  double sum = 0.0;
};

// Weighted points (a, b, w); answers count and weight over
//   a >= A (or a > A)  and  b <= B (or b < B).
// Static blocks are layered merge-sort trees; insertion uses the binary
// counter scheme, so each point is rebuilt O(log n) times.
class DominanceIndex {
 public:
  struct Entry {
    double a, b, w;
  };

  void insert(double a, double b, double w) {
    std::vector<Entry> carry{{a, b, w}};
    for (std::size_t lvl = 0;; ++lvl) {
      if (lvl == blocks_.size()) blocks_.emplace_back();
      if (blocks_[lvl].empty()) {
        blocks_[lvl] = Block(std::move(carry));
        break;
      }
      auto& mine = blocks_[lvl].entries;
      carry.insert(carry.end(), mine.begin(), mine.end());
      blocks_[lvl] = Block();
    }
    ++size_;
  }

  std::size_t size() const { return size_; }

  CountSum query(double a_min, bool a_strict, double b_max, bool b_strict) const {
    CountSum out;
    for (const auto& blk : blocks_)
      if (!blk.empty()) blk.query(a_min, a_strict, b_max, b_strict, out);
    return out;
  }

 private:
  struct Block {
    std::vector<Entry> entries;            // sorted by a
    std::vector<std::vector<double>> bs;   // per level: b sorted inside aligned runs
    std::vector<std::vector<double>> ws;   // per level: prefix sums of w in that order

    Block() = default;
    explicit Block(std::vector<Entry> e) : entries(std::move(e)) {
      std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
        return x.a < y.a || (x.a == y.a && x.b < y.b);
      });
      const std::size_t m = entries.size();
      std::vector<std::pair<double, double>> cur(m);
      for (std::size_t i = 0; i < m; ++i) cur[i] = {entries[i].b, entries[i].w};
      std::size_t width = 1;
      while (true) {
        bs.emplace_back(m);
        ws.emplace_back(m + 1, 0.0);
        auto& lb = bs.back();
        auto& lw = ws.back();
        for (std::size_t i = 0; i < m; ++i) {
          lb[i] = cur[i].first;
          lw[i + 1] = lw[i] + cur[i].second;
        }
        if (width >= m) break;
        std::vector<std::pair<double, double>> next(m);
        for (std::size_t s = 0; s < m; s += 2 * width) {
          auto mid = std::min(s + width, m), end = std::min(s + 2 * width, m);
          std::merge(cur.begin() + s, cur.begin() + mid, cur.begin() + mid, cur.begin() + end,
                     next.begin() + s,
                     [](const auto& x, const auto& y) { return x.first < y.first; });
        }
        cur.swap(next);
        width *= 2;
      }
    }

    bool empty() const { return entries.empty(); }

    void query(double a_min, bool a_strict, double b_max, bool b_strict, CountSum& out) const {
      const std::size_t m = entries.size();
      auto it = a_strict
                    ? std::upper_bound(entries.begin(), entries.end(), a_min,
                                       [](double v, const Entry& e) { return v < e.a; })
                    : std::lower_bound(entries.begin(), entries.end(), a_min,
                                       [](const Entry& e, double v) { return e.a < v; });
      std::size_t pos = static_cast<std::size_t>(it - entries.begin());
      while (pos < m) {
        std::size_t lvl = 0;
        while (lvl + 1 < bs.size() && pos % (std::size_t{2} << lvl) == 0 &&
               pos + (std::size_t{2} << lvl) <= m)
          ++lvl;
        std::size_t len = std::min(std::size_t{1} << lvl, m - pos);
        const auto& lb = bs[lvl];
        auto first = lb.begin() + static_cast<std::ptrdiff_t>(pos);
        auto last = first + static_cast<std::ptrdiff_t>(len);
        auto cut = b_strict ? std::lower_bound(first, last, b_max) : std::upper_bound(first, last, b_max);
        std::size_t hi = static_cast<std::size_t>(cut - lb.begin());
        out.count += hi - pos;
        out.sum += ws[lvl][hi] - ws[lvl][pos];
        pos += len;
      }
    }
  };

  std::vector<Block> blocks_;
  std::size_t size_ = 0;
};

}  // namespace stable_cluster
