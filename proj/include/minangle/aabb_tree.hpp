#pragma once

#include <vector>

#include "minangle/geometry.hpp"
#include "minangle/vec3.hpp"

namespace minangle {

/// One triangle to index; `id` is caller-defined (usually a mesh facet id)
/// and is echoed back by queries.
struct TreeTriangle {
    Vec3 a, b, c;
    int id = -1;
};

struct TreeHit {
    int id = -1;
    Vec3 point;
    double dist2 = 0.0;
};

/// Static BVH over triangles. Queries return the exact closest point over
/// all indexed triangles (pruning uses strict bounds only, so results match
/// a brute-force scan).
class AabbTree {
public:
    AabbTree() = default;
    explicit AabbTree(std::vector<TreeTriangle> triangles) { build(std::move(triangles)); }

    void build(std::vector<TreeTriangle> triangles);

    bool empty() const { return triangles_.empty(); }
    std::size_t size() const { return triangles_.size(); }

    /// Closest triangle to p; tree must be non-empty.
    TreeHit closest(const Vec3& p) const;

    /// True if some triangle lies within distance d of p (early-out query).
    bool within(const Vec3& p, double d) const;

private:
    struct Node {
        Bbox box;
        int left = -1;   // internal: child index; leaf: first triangle
        int right = -1;  // internal: child index; leaf: -1
        int count = 0;   // leaf: number of triangles, 0 for internal
    };

    int build_node(int begin, int end);

    std::vector<TreeTriangle> triangles_;
    std::vector<Node> nodes_;
};

}  // namespace minangle
