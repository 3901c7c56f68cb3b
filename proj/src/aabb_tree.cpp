#include "minangle/aabb_tree.hpp"

#include <algorithm>
#include <cassert>
#include <limits>

namespace minangle {

static Bbox triangle_box(const TreeTriangle& t) {
    Bbox b;
    b.expand(t.a);
    b.expand(t.b);
    b.expand(t.c);
    return b;
}

void AabbTree::build(std::vector<TreeTriangle> triangles) {
    triangles_ = std::move(triangles);
    nodes_.clear();
    if (triangles_.empty()) return;
    nodes_.reserve(2 * triangles_.size());
    build_node(0, static_cast<int>(triangles_.size()));
}

int AabbTree::build_node(int begin, int end) {
    int node_index = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    Bbox box;
    for (int i = begin; i < end; ++i) box.expand(triangle_box(triangles_[i]));
    nodes_[node_index].box = box;

    int count = end - begin;
    if (count <= 4) {
        nodes_[node_index].left = begin;
        nodes_[node_index].count = count;
        return node_index;
    }

    Vec3 extent = box.hi - box.lo;
    int axis = 0;
    if (extent.y > extent.x) axis = 1;
    if (extent.z > extent[axis]) axis = 2;

    int mid = begin + count / 2;
    std::nth_element(triangles_.begin() + begin, triangles_.begin() + mid, triangles_.begin() + end,
                     [axis](const TreeTriangle& s, const TreeTriangle& t) {
                         double cs = s.a[axis] + s.b[axis] + s.c[axis];
                         double ct = t.a[axis] + t.b[axis] + t.c[axis];
                         if (cs != ct) return cs < ct;
                         return s.id < t.id;  // deterministic tie-break
                     });

    int left = build_node(begin, mid);
    int right = build_node(mid, end);
    nodes_[node_index].left = left;
    nodes_[node_index].right = right;
    return node_index;
}

TreeHit AabbTree::closest(const Vec3& p) const {
    assert(!triangles_.empty());
    TreeHit best;
    best.dist2 = std::numeric_limits<double>::infinity();

    // Manual stack; pairs of (node, lower bound) visited nearest-first.
    struct Entry {
        int node;
        double bound;
    };
    Entry stack[64];
    int top = 0;
    stack[top++] = {0, nodes_[0].box.dist2_to(p)};

    while (top > 0) {
        Entry e = stack[--top];
        if (e.bound > best.dist2) continue;
        const Node& n = nodes_[e.node];
        if (n.count > 0) {
            for (int i = n.left; i < n.left + n.count; ++i) {
                const TreeTriangle& t = triangles_[i];
                ClosestPoint cp = closest_point_triangle(p, t.a, t.b, t.c);
                if (cp.dist2 < best.dist2) {
                    best.dist2 = cp.dist2;
                    best.point = cp.point;
                    best.id = t.id;
                }
            }
            continue;
        }
        double dl = nodes_[n.left].box.dist2_to(p);
        double dr = nodes_[n.right].box.dist2_to(p);
        // Push the farther child first so the nearer one is explored next.
        if (dl <= dr) {
            if (dr <= best.dist2) stack[top++] = {n.right, dr};
            if (dl <= best.dist2) stack[top++] = {n.left, dl};
        } else {
            if (dl <= best.dist2) stack[top++] = {n.left, dl};
            if (dr <= best.dist2) stack[top++] = {n.right, dr};
        }
        assert(top < 64);
    }
    return best;
}

bool AabbTree::within(const Vec3& p, double d) const {
    if (triangles_.empty()) return false;
    double d2 = d * d;
    int stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& n = nodes_[stack[--top]];
        if (n.box.dist2_to(p) > d2) continue;
        if (n.count > 0) {
            for (int i = n.left; i < n.left + n.count; ++i) {
                const TreeTriangle& t = triangles_[i];
                if (closest_point_triangle(p, t.a, t.b, t.c).dist2 <= d2) return true;
            }
            continue;
        }
        stack[top++] = n.left;
        stack[top++] = n.right;
        assert(top < 64);
    }
    return false;
}

}  // namespace minangle
