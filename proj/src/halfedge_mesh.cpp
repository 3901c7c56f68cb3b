#include "minangle/halfedge_mesh.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>
#include <unordered_map>

namespace minangle {

HalfedgeMesh::HalfedgeMesh(const std::vector<Vec3>& positions,
                           const std::vector<std::array<int, 3>>& triangles) {
    if (positions.empty() || triangles.empty())
        throw NonManifoldError("mesh has no vertices or no facets");
    vertices_.resize(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) vertices_[i].position = positions[i];
    n_vertices_ = static_cast<int>(positions.size());

    // Edge lookup keyed by (min, max); value remembers the halfedge that runs
    // min -> max so directed lookups resolve to a side.
    std::unordered_map<std::uint64_t, int> edge_of;
    edge_of.reserve(triangles.size() * 3 / 2 + 1);
    auto edge_key = [](int a, int b) {
        if (a > b) std::swap(a, b);
        return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
    };

    for (std::size_t t = 0; t < triangles.size(); ++t) {
        const auto& tri = triangles[t];
        for (int k = 0; k < 3; ++k) {
            if (tri[k] < 0 || tri[k] >= n_vertices_)
                throw NonManifoldError("facet " + std::to_string(t) + " references missing vertex " +
                                std::to_string(tri[k]));
        }
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[2] == tri[0])
            throw NonManifoldError("facet " + std::to_string(t) + " repeats a vertex");

        FacetHandle f = new_facet();
        HalfedgeHandle loop[3];
        for (int k = 0; k < 3; ++k) {
            int a = tri[k], b = tri[(k + 1) % 3];
            auto key = edge_key(a, b);
            auto it = edge_of.find(key);
            HalfedgeHandle h;
            if (it == edge_of.end()) {
                EdgeHandle e = new_edge(VertexHandle{a}, VertexHandle{b});
                h = halfedge(e, 0);  // runs a -> b
                edge_of.emplace(key, std::min(a, b) == a ? h.i : (h.i ^ 1));
                // stored halfedge runs min -> max
            } else {
                int stored = it->second;  // min -> max
                h = (std::min(a, b) == a) ? HalfedgeHandle{stored} : HalfedgeHandle{stored ^ 1};
                if (facet(h).valid())
                    throw NonManifoldError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                                           "): more than two incident facets or inconsistent "
                                           "orientation");
            }
            halfedges_[h.i].facet = f;
            loop[k] = h;
        }
        facets_[f.i].halfedge = loop[0];
        for (int k = 0; k < 3; ++k) set_next(loop[k], loop[(k + 1) % 3]);
    }

    // Boundary halfedges: chain them into loops. A manifold vertex has at
    // most one outgoing boundary halfedge.
    std::unordered_map<int, int> boundary_out;  // vertex -> boundary halfedge
    for (int h = 0; h < halfedge_capacity(); ++h) {
        if (halfedges_[h].facet.valid()) continue;
        int from = halfedges_[h ^ 1].to.i;
        auto [it, inserted] = boundary_out.emplace(from, h);
        if (!inserted)
            throw NonManifoldError("vertex " + std::to_string(from) +
                                   ": multiple boundary fans meet");
    }
    for (auto [from, h] : boundary_out) {
        (void)from;
        int to = halfedges_[h].to.i;
        auto it = boundary_out.find(to);
        if (it == boundary_out.end())
            throw NonManifoldError("vertex " + std::to_string(to) + ": open boundary chain");
        set_next(HalfedgeHandle{h}, HalfedgeHandle{it->second});
    }

    // Outgoing halfedges; boundary vertices must reference their boundary
    // halfedge so circulation starts at the fan's edge.
    std::vector<int> degree(vertices_.size(), 0);
    for (int h = 0; h < halfedge_capacity(); ++h) {
        VertexHandle from = halfedges_[h ^ 1].to;
        ++degree[from.i];
        if (!vertices_[from.i].halfedge.valid()) vertices_[from.i].halfedge = HalfedgeHandle{h};
    }
    for (auto [v, h] : boundary_out) vertices_[v].halfedge = HalfedgeHandle{h};

    for (int v = 0; v < vertex_capacity(); ++v) {
        if (degree[v] == 0)
            throw NonManifoldError("vertex " + std::to_string(v) + ": isolated (no incident facet)");
        // A second fan glued at v is unreachable from the stored halfedge.
        int seen = 0;
        HalfedgeHandle start = vertices_[v].halfedge;
        HalfedgeHandle h = start;
        do {
            ++seen;
            h = rotate(h);
        } while (h != start && seen <= degree[v]);
        if (seen != degree[v])
            throw NonManifoldError("vertex " + std::to_string(v) + ": disconnected fans meet");
    }
}

EdgeHandle HalfedgeMesh::new_edge(VertexHandle a, VertexHandle b) {
    EdgeHandle e{edge_capacity()};
    halfedges_.push_back({b, {}, {}, {}});
    halfedges_.push_back({a, {}, {}, {}});
    edge_deleted_.push_back(false);
    ++n_edges_;
    return e;
}

FacetHandle HalfedgeMesh::new_facet() {
    facets_.push_back({});
    ++n_facets_;
    return FacetHandle{facet_capacity() - 1};
}

void HalfedgeMesh::delete_edge(EdgeHandle e) {
    assert(!edge_deleted_[e.i]);
    edge_deleted_[e.i] = true;
    --n_edges_;
}

void HalfedgeMesh::delete_facet(FacetHandle f) {
    assert(!facets_[f.i].deleted);
    facets_[f.i].deleted = true;
    --n_facets_;
}

void HalfedgeMesh::delete_vertex(VertexHandle v) {
    assert(!vertices_[v.i].deleted);
    vertices_[v.i].deleted = true;
    vertices_[v.i].halfedge = {};
    --n_vertices_;
}

std::array<VertexHandle, 3> HalfedgeMesh::facet_vertices(FacetHandle f) const {
    HalfedgeHandle h = facets_[f.i].halfedge;
    HalfedgeHandle n = next(h);
    return {to_vertex(h), to_vertex(n), to_vertex(next(n))};
}

std::array<Vec3, 3> HalfedgeMesh::facet_points(FacetHandle f) const {
    auto v = facet_vertices(f);
    return {position(v[0]), position(v[1]), position(v[2])};
}

Vec3 HalfedgeMesh::facet_normal(FacetHandle f) const {
    auto p = facet_points(f);
    return normalized(triangle_normal_raw(p[0], p[1], p[2]));
}

double HalfedgeMesh::facet_area(FacetHandle f) const {
    auto p = facet_points(f);
    return triangle_area(p[0], p[1], p[2]);
}

std::vector<VertexHandle> HalfedgeMesh::vertex_ring(VertexHandle v) const {
    std::vector<VertexHandle> ring;
    HalfedgeHandle start = halfedge(v);
    HalfedgeHandle h = start;
    do {
        ring.push_back(to_vertex(h));
        h = rotate(h);
    } while (h != start);
    return ring;
}

std::vector<FacetHandle> HalfedgeMesh::vertex_facets(VertexHandle v) const {
    std::vector<FacetHandle> out;
    HalfedgeHandle start = halfedge(v);
    HalfedgeHandle h = start;
    do {
        if (facet(h).valid()) out.push_back(facet(h));
        h = rotate(h);
    } while (h != start);
    return out;
}

int HalfedgeMesh::valence(VertexHandle v) const {
    int n = 0;
    HalfedgeHandle start = halfedge(v);
    HalfedgeHandle h = start;
    do {
        ++n;
        h = rotate(h);
    } while (h != start);
    return n;
}

HalfedgeHandle HalfedgeMesh::find_halfedge(VertexHandle a, VertexHandle b) const {
    HalfedgeHandle start = halfedge(a);
    if (!start.valid()) return {};
    HalfedgeHandle h = start;
    do {
        if (to_vertex(h) == b) return h;
        h = rotate(h);
    } while (h != start);
    return {};
}

bool HalfedgeMesh::link_condition(HalfedgeHandle h) const {
    VertexHandle a = from_vertex(h), b = to_vertex(h);
    HalfedgeHandle o = opposite(h);

    std::set<int> apexes;
    if (facet(h).valid()) apexes.insert(to_vertex(next(h)).i);
    if (facet(o).valid()) apexes.insert(to_vertex(next(o)).i);

    // Two interior facets sharing the same apex form a two-triangle pillow;
    // collapsing its edge cannot produce a valid triangulation.
    if (facet(h).valid() && facet(o).valid() && apexes.size() == 1) return false;

    // lk(a) n lk(b), vertex part: common neighbors must be exactly the apexes.
    std::set<int> ring_a;
    for (VertexHandle v : vertex_ring(a)) ring_a.insert(v.i);
    std::set<int> common;
    for (VertexHandle v : vertex_ring(b))
        if (ring_a.count(v.i)) common.insert(v.i);
    if (common != apexes) return false;

    // Edge part: an edge opposite a in one facet and opposite b in another
    // would collapse onto a duplicated facet. lk(ab) never contains edges, so
    // the intersection must contain none either.
    std::set<int> opp_a;
    for (FacetHandle f : vertex_facets(a)) {
        HalfedgeHandle e = facets_[f.i].halfedge;
        while (to_vertex(e) != a) e = next(e);
        opp_a.insert(edge(next(next(e))).i);  // edge not touching a
    }
    for (FacetHandle f : vertex_facets(b)) {
        HalfedgeHandle e = facets_[f.i].halfedge;
        while (to_vertex(e) != b) e = next(e);
        if (opp_a.count(edge(next(next(e))).i)) return false;
    }
    return true;
}

bool HalfedgeMesh::collapse_preserves_boundary(HalfedgeHandle h) const {
    if (is_boundary(edge(h))) return true;
    // Interior edge joining two boundary vertices: collapsing pinches the
    // surface into a non-manifold vertex.
    return !(is_boundary(from_vertex(h)) && is_boundary(to_vertex(h)));
}

void HalfedgeMesh::adjust_vertex_halfedge(VertexHandle v) {
    HalfedgeHandle start = vertices_[v.i].halfedge;
    if (!start.valid()) return;
    HalfedgeHandle h = start;
    do {
        if (is_boundary(h)) {
            vertices_[v.i].halfedge = h;
            return;
        }
        h = rotate(h);
    } while (h != start);
}

// Merges the two edges of a degenerate two-sided facet loop (h, next(h)):
// the surviving edge takes over the role of opposite(h)'s pair, edge(h) and
// the degenerate facet are deleted.
void HalfedgeMesh::remove_degenerate_loop(HalfedgeHandle h) {
    HalfedgeHandle h0 = h;
    HalfedgeHandle h1 = next(h0);
    HalfedgeHandle o0 = opposite(h0);
    HalfedgeHandle o1 = opposite(h1);
    VertexHandle v0 = to_vertex(h0);
    VertexHandle v1 = to_vertex(h1);
    FacetHandle fh = facet(h0);
    FacetHandle fo = facet(o0);
    assert(next(h1) == h0);

    set_next(h1, next(o0));
    set_next(prev(o0), h1);
    halfedges_[h1.i].facet = fo;
    if (fo.valid()) facets_[fo.i].halfedge = h1;

    vertices_[v0.i].halfedge = h1;
    adjust_vertex_halfedge(v0);
    vertices_[v1.i].halfedge = o1;
    adjust_vertex_halfedge(v1);

    if (fh.valid()) delete_facet(fh);
    delete_edge(edge(h0));
}

VertexHandle HalfedgeMesh::collapse_edge(HalfedgeHandle h, const Vec3& new_position) {
    if (!link_condition(h))
        throw TopologyError("collapse rejected: link condition fails for edge (" +
                            std::to_string(from_vertex(h).i) + ", " +
                            std::to_string(to_vertex(h).i) + ")");
    if (!collapse_preserves_boundary(h))
        throw TopologyError("collapse rejected: interior edge (" +
                            std::to_string(from_vertex(h).i) + ", " +
                            std::to_string(to_vertex(h).i) +
                            ") joins two boundary vertices");

    HalfedgeHandle h0 = h;
    HalfedgeHandle o0 = opposite(h0);
    HalfedgeHandle hn = next(h0), hp = prev(h0);
    HalfedgeHandle on = next(o0), op = prev(o0);
    FacetHandle fh = facet(h0), fo = facet(o0);
    VertexHandle vk = to_vertex(h0);   // kept
    VertexHandle vr = to_vertex(o0);   // removed

    // Retarget halfedges incoming to the removed vertex.
    std::vector<HalfedgeHandle> incoming;
    {
        HalfedgeHandle start = halfedge(vr);
        HalfedgeHandle g = start;
        do {
            incoming.push_back(opposite(g));
            g = rotate(g);
        } while (g != start);
    }
    for (HalfedgeHandle g : incoming) halfedges_[g.i].to = vk;

    // Unlink the collapsing edge from both facet loops.
    set_next(hp, hn);
    set_next(op, on);
    if (fh.valid()) facets_[fh.i].halfedge = hn;
    if (fo.valid()) facets_[fo.i].halfedge = on;

    if (halfedge(vk) == o0) vertices_[vk.i].halfedge = hn;
    adjust_vertex_halfedge(vk);

    delete_edge(edge(h0));
    delete_vertex(vr);

    // Triangles on either side degenerated into 2-gons.
    if (next(next(hp)) == hp) remove_degenerate_loop(hp);
    if (!is_deleted(edge(on)) && next(next(on)) == on) remove_degenerate_loop(on);

    vertices_[vk.i].position = new_position;
    return vk;
}

VertexHandle HalfedgeMesh::split_edge(HalfedgeHandle h, const Vec3& position) {
    HalfedgeHandle o = opposite(h);
    FacetHandle f0 = facet(h), f1 = facet(o);
    VertexHandle b = to_vertex(h);
    HalfedgeHandle hn = next(h), hp = prev(h);
    HalfedgeHandle on = next(o), op = prev(o);

    vertices_.push_back({position, {}, false});
    ++n_vertices_;
    VertexHandle m{vertex_capacity() - 1};

    // Fixed allocation order (callers rely on it to predict ids):
    // edge (m,b); edge (m,c) if facet(h); edge (m,d) if facet(opposite(h));
    // then the facet(h) child, then the facet(opposite(h)) child.
    EdgeHandle e_mb = new_edge(m, b);
    HalfedgeHandle t0 = halfedge(e_mb, 0);  // m -> b
    HalfedgeHandle t1 = halfedge(e_mb, 1);  // b -> m

    halfedges_[h.i].to = m;  // h: a -> m, o: m -> a

    if (f0.valid()) {
        VertexHandle c = to_vertex(hn);
        EdgeHandle e_mc = new_edge(m, c);
        HalfedgeHandle mc0 = halfedge(e_mc, 0);  // m -> c
        HalfedgeHandle mc1 = halfedge(e_mc, 1);  // c -> m
        FacetHandle fb = new_facet();            // (m, b, c)

        set_next(h, mc0);
        set_next(mc0, hp);
        halfedges_[mc0.i].facet = f0;
        facets_[f0.i].halfedge = h;

        set_next(t0, hn);
        set_next(hn, mc1);
        set_next(mc1, t0);
        halfedges_[t0.i].facet = fb;
        halfedges_[hn.i].facet = fb;
        halfedges_[mc1.i].facet = fb;
        facets_[fb.i].halfedge = t0;
    } else {
        set_next(h, t0);
        set_next(t0, hn);
    }

    if (f1.valid()) {
        VertexHandle d = to_vertex(on);
        EdgeHandle e_md = new_edge(m, d);
        HalfedgeHandle md0 = halfedge(e_md, 0);  // m -> d
        HalfedgeHandle md1 = halfedge(e_md, 1);  // d -> m
        FacetHandle fb = new_facet();            // (m, a, d)

        set_next(t1, md0);
        set_next(md0, op);
        set_next(op, t1);
        halfedges_[t1.i].facet = f1;
        halfedges_[md0.i].facet = f1;
        facets_[f1.i].halfedge = t1;

        set_next(on, md1);
        set_next(md1, o);
        halfedges_[o.i].facet = fb;
        halfedges_[on.i].facet = fb;
        halfedges_[md1.i].facet = fb;
        facets_[fb.i].halfedge = o;
    } else {
        set_next(op, t1);
        set_next(t1, o);
    }

    if (halfedge(b) == o) vertices_[b.i].halfedge = t1;
    vertices_[m.i].halfedge = t0;
    adjust_vertex_halfedge(m);
    adjust_vertex_halfedge(b);
    return m;
}

LocalPatch HalfedgeMesh::local_patch(const std::vector<VertexHandle>& seeds) const {
    LocalPatch patch;
    std::set<int> inner;
    for (VertexHandle v : seeds)
        for (FacetHandle f : vertex_facets(v)) inner.insert(f.i);

    std::set<int> touched_vertices;
    for (int f : inner)
        for (VertexHandle v : facet_vertices(FacetHandle{f})) touched_vertices.insert(v.i);

    std::set<int> extended = inner;
    for (int v : touched_vertices)
        for (FacetHandle f : vertex_facets(VertexHandle{v})) extended.insert(f.i);

    patch.inner.reserve(inner.size());
    for (int f : inner) patch.inner.push_back(FacetHandle{f});
    patch.extended.reserve(extended.size());
    for (int f : extended) patch.extended.push_back(FacetHandle{f});
    return patch;
}

Bbox HalfedgeMesh::bbox() const {
    Bbox box;
    for_each_vertex([&](VertexHandle v) { box.expand(position(v)); });
    return box;
}

void HalfedgeMesh::to_arrays(std::vector<Vec3>& positions, std::vector<std::array<int, 3>>& triangles,
                             std::vector<int>* vertex_map, std::vector<int>* facet_map) const {
    positions.clear();
    triangles.clear();
    std::vector<int> vmap(vertex_capacity(), -1);
    for (int v = 0; v < vertex_capacity(); ++v) {
        if (vertices_[v].deleted) continue;
        vmap[v] = static_cast<int>(positions.size());
        positions.push_back(vertices_[v].position);
    }
    std::vector<int> fmap;
    if (facet_map) fmap.assign(facet_capacity(), -1);
    for (int f = 0; f < facet_capacity(); ++f) {
        if (facets_[f].deleted) continue;
        auto fv = facet_vertices(FacetHandle{f});
        if (facet_map) fmap[f] = static_cast<int>(triangles.size());
        triangles.push_back({vmap[fv[0].i], vmap[fv[1].i], vmap[fv[2].i]});
    }
    if (vertex_map) *vertex_map = std::move(vmap);
    if (facet_map) *facet_map = std::move(fmap);
}

void HalfedgeMesh::check_integrity() const {
    int live_v = 0, live_e = 0, live_f = 0;
    for (int v = 0; v < vertex_capacity(); ++v) {
        if (vertices_[v].deleted) continue;
        ++live_v;
        HalfedgeHandle h = vertices_[v].halfedge;
        if (!h.valid() || is_deleted(h)) throw MeshError("vertex halfedge invalid");
        if (from_vertex(h) != VertexHandle{v}) throw MeshError("vertex halfedge not outgoing");
        bool has_boundary = false;
        HalfedgeHandle g = h;
        int guard = 0;
        do {
            if (is_boundary(g)) has_boundary = true;
            g = rotate(g);
            if (++guard > 1 + halfedge_capacity()) throw MeshError("vertex circulation broken");
        } while (g != h);
        if (has_boundary && !is_boundary(h))
            throw MeshError("boundary vertex halfedge not on boundary");
    }
    for (int e = 0; e < edge_capacity(); ++e) {
        if (edge_deleted_[e]) continue;
        ++live_e;
        for (int s = 0; s < 2; ++s) {
            HalfedgeHandle h{2 * e + s};
            if (is_deleted(next(h)) || is_deleted(prev(h))) throw MeshError("halfedge links dead");
            if (next(prev(h)) != h || prev(next(h)) != h) throw MeshError("next/prev mismatch");
            if (facet(h) != facet(next(h))) throw MeshError("facet mismatch along loop");
            VertexHandle t = to_vertex(h);
            if (!t.valid() || is_deleted(t)) throw MeshError("halfedge target dead");
        }
    }
    for (int f = 0; f < facet_capacity(); ++f) {
        if (facets_[f].deleted) continue;
        ++live_f;
        HalfedgeHandle h = facets_[f].halfedge;
        if (!h.valid() || is_deleted(h)) throw MeshError("facet halfedge invalid");
        if (facet(h) != FacetHandle{f}) throw MeshError("facet halfedge astray");
        if (next(next(next(h))) != h) throw MeshError("facet loop not a triangle");
    }
    if (live_v != n_vertices_ || live_e != n_edges_ || live_f != n_facets_)
        throw MeshError("element counts out of sync");
}

}  // namespace minangle
