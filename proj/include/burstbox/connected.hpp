#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "burstbox/image.hpp"

namespace burstbox {

/// One connected component of true mask pixels.
struct Component {
  BoundingBox box;      // tight bounds of the component's pixels
  uint64_t area = 0;    // number of true pixels
  uint32_t label = 0;   // label in the grid returned by label_components
};

namespace detail {

class UnionFind {
 public:
  uint32_t make() {
    parent_.push_back(static_cast<uint32_t>(parent_.size()));
    return static_cast<uint32_t>(parent_.size() - 1);
  }
  uint32_t find(uint32_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];  // path halving
      a = parent_[a];
    }
    return a;
  }
  void merge(uint32_t a, uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent_[b] = a;  // keep the smaller (earlier) root
    else parent_[a] = b;
  }

 private:
  std::vector<uint32_t> parent_;
};

}  // namespace detail

/// Two-pass union-find labeling. Fills `labels` (0 = background, component
/// labels start at 1 in raster order of first appearance) and returns one
/// Component per label, sorted by area descending with ties broken by the
/// box top-left (y, then x).
inline std::vector<Component> label_components(const BinaryMask& mask, int connectivity,
                                               std::vector<uint32_t>* labels_out = nullptr) {
  if (connectivity != 4 && connectivity != 8)
    throw std::invalid_argument("connected_components: connectivity must be 4 or 8");
  const uint32_t w = mask.width, h = mask.height;
  std::vector<uint32_t> labels(static_cast<size_t>(w) * h, 0);
  detail::UnionFind uf;
  uf.make();  // slot 0 stays the background

  // first pass: assign provisional labels, record equivalences
  for (uint32_t y = 0; y < h; ++y) {
    for (uint32_t x = 0; x < w; ++x) {
      const size_t idx = static_cast<size_t>(y) * w + x;
      if (!mask.bits[idx]) continue;
      uint32_t neighbor = 0;
      const auto consider = [&](uint32_t lab) {
        if (!lab) return;
        if (!neighbor) neighbor = lab;
        else uf.merge(neighbor, lab);
      };
      if (x > 0) consider(labels[idx - 1]);
      if (y > 0) {
        consider(labels[idx - w]);
        if (connectivity == 8) {
          if (x > 0) consider(labels[idx - w - 1]);
          if (x + 1 < w) consider(labels[idx - w + 1]);
        }
      }
      labels[idx] = neighbor ? uf.find(neighbor) : uf.make();
    }
  }

  // second pass: compact roots to 1..C in raster order, accumulate stats
  std::vector<uint32_t> compact;  // root -> compact label (0 = unseen)
  std::vector<Component> comps;
  for (uint32_t y = 0; y < h; ++y) {
    for (uint32_t x = 0; x < w; ++x) {
      const size_t idx = static_cast<size_t>(y) * w + x;
      if (!labels[idx]) continue;
      const uint32_t root = uf.find(labels[idx]);
      if (root >= compact.size()) compact.resize(root + 1, 0);
      uint32_t lab = compact[root];
      if (!lab) {
        comps.push_back(Component{BoundingBox{x, y, 1, 1}, 0,
                                  static_cast<uint32_t>(comps.size() + 1)});
        lab = compact[root] = static_cast<uint32_t>(comps.size());
      }
      labels[idx] = lab;
      Component& c = comps[lab - 1];
      c.area += 1;
      BoundingBox& b = c.box;
      const uint32_t x1 = std::max(b.right(), x + 1);
      const uint32_t y1 = std::max(b.bottom(), y + 1);
      b.x = std::min(b.x, x);
      b.y = std::min(b.y, y);
      b.w = x1 - b.x;
      b.h = y1 - b.y;
    }
  }

  if (labels_out) *labels_out = std::move(labels);
  std::sort(comps.begin(), comps.end(), [](const Component& a, const Component& b) {
    if (a.area != b.area) return a.area > b.area;
    if (a.box.y != b.box.y) return a.box.y < b.box.y;
    return a.box.x < b.box.x;
  });
  return comps;
}

/// Components of true pixels, largest area first.
inline std::vector<Component> connected_components(const BinaryMask& mask, int connectivity) {
  return label_components(mask, connectivity, nullptr);
}

}  // namespace burstbox
