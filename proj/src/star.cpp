#include "minangle/star.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <set>

namespace minangle {

static void add_relocate_triangles(const HalfedgeMesh& mesh, VertexHandle v, StarPreview& star) {
    HalfedgeHandle start = mesh.halfedge(v);
    HalfedgeHandle h = start;
    do {
        if (mesh.facet(h).valid()) {
            HalfedgeHandle hn = mesh.next(h);
            StarTriangle t;
            t.r1 = mesh.to_vertex(h);
            t.r2 = mesh.to_vertex(hn);
            t.p1 = mesh.position(t.r1);
            t.p2 = mesh.position(t.r2);
            t.facet_id = mesh.facet(h).i;
            t.replaced_facet_id = t.facet_id;
            t.spoke1_edge_id = mesh.edge(h).i;
            t.ring_edge_id = mesh.edge(hn).i;
            t.spoke2_edge_id = mesh.edge(mesh.next(hn)).i;
            star.triangles.push_back(t);
        }
        h = mesh.rotate(h);
    } while (h != start);
}

StarPreview preview_star(const HalfedgeMesh& mesh, const StarOp& op) {
    StarPreview star;
    star.op = op;

    switch (op.kind) {
        case StarOp::Kind::Relocate: {
            VertexHandle v = op.vertex;
            star.center_vertex_id = v.i;
            add_relocate_triangles(mesh, v, star);
            for (const StarTriangle& t : star.triangles) star.replaced_facet_ids.push_back(t.facet_id);
            LocalPatch patch = mesh.local_patch({v});
            for (FacetHandle f : patch.inner) star.patch_facet_ids.push_back(f.i);
            for (FacetHandle f : patch.extended) star.extended_patch_facet_ids.push_back(f.i);
            break;
        }
        case StarOp::Kind::Collapse: {
            HalfedgeHandle h = op.halfedge;
            HalfedgeHandle o = mesh.opposite(h);
            VertexHandle a = mesh.from_vertex(h);
            VertexHandle b = mesh.to_vertex(h);
            FacetHandle fh = mesh.facet(h), fo = mesh.facet(o);
            VertexHandle apex_c = fh.valid() ? mesh.to_vertex(mesh.next(h)) : VertexHandle{};
            VertexHandle apex_d = fo.valid() ? mesh.to_vertex(mesh.next(o)) : VertexHandle{};

            star.center_vertex_id = b.i;
            star.dying_vertex_id = a.i;
            star.dying_edge_ids.push_back(mesh.edge(h).i);
            if (fh.valid()) {
                star.dying_facet_ids.push_back(fh.i);
                star.dying_edge_ids.push_back(mesh.edge(mesh.prev(h)).i);  // old (apex_c, a)
            }
            if (fo.valid()) {
                star.dying_facet_ids.push_back(fo.i);
                star.dying_edge_ids.push_back(mesh.edge(mesh.next(o)).i);  // old (a, apex_d)
            }
            // After the collapse the (apex, a) edges merge into the (apex, b)
            // edges, which keep their ids.
            int edge_bc = fh.valid() ? mesh.edge(mesh.next(h)).i : -1;
            int edge_bd = fo.valid() ? mesh.edge(mesh.prev(o)).i : -1;

            // Surviving facets around b keep their spokes.
            HalfedgeHandle start = mesh.halfedge(b);
            HalfedgeHandle g = start;
            do {
                FacetHandle f = mesh.facet(g);
                if (f.valid() && f != fh && f != fo) {
                    HalfedgeHandle gn = mesh.next(g);
                    StarTriangle t;
                    t.r1 = mesh.to_vertex(g);
                    t.r2 = mesh.to_vertex(gn);
                    t.p1 = mesh.position(t.r1);
                    t.p2 = mesh.position(t.r2);
                    t.facet_id = f.i;
                    t.replaced_facet_id = f.i;
                    t.spoke1_edge_id = mesh.edge(g).i;
                    t.ring_edge_id = mesh.edge(gn).i;
                    t.spoke2_edge_id = mesh.edge(mesh.next(gn)).i;
                    star.triangles.push_back(t);
                }
                g = mesh.rotate(g);
            } while (g != start);
            // Surviving facets around a: spokes through the apexes remap to
            // the surviving (apex, b) edge ids.
            auto spoke_from_a = [&](HalfedgeHandle ha, VertexHandle x) {
                if (x == apex_c) return edge_bc;
                if (x == apex_d) return edge_bd;
                return mesh.edge(ha).i;
            };
            start = mesh.halfedge(a);
            g = start;
            do {
                FacetHandle f = mesh.facet(g);
                if (f.valid() && f != fh && f != fo) {
                    HalfedgeHandle gn = mesh.next(g);
                    StarTriangle t;
                    t.r1 = mesh.to_vertex(g);
                    t.r2 = mesh.to_vertex(gn);
                    t.p1 = mesh.position(t.r1);
                    t.p2 = mesh.position(t.r2);
                    t.facet_id = f.i;
                    t.replaced_facet_id = f.i;
                    t.spoke1_edge_id = spoke_from_a(g, t.r1);
                    t.ring_edge_id = mesh.edge(gn).i;
                    t.spoke2_edge_id = spoke_from_a(mesh.opposite(mesh.next(gn)), t.r2);
                    star.triangles.push_back(t);
                }
                g = mesh.rotate(g);
            } while (g != start);

            std::set<int> replaced;
            for (FacetHandle f : mesh.vertex_facets(a)) replaced.insert(f.i);
            for (FacetHandle f : mesh.vertex_facets(b)) replaced.insert(f.i);
            star.replaced_facet_ids.assign(replaced.begin(), replaced.end());
            LocalPatch patch = mesh.local_patch({a, b});
            for (FacetHandle f : patch.inner) star.patch_facet_ids.push_back(f.i);
            for (FacetHandle f : patch.extended) star.extended_patch_facet_ids.push_back(f.i);
            break;
        }
        case StarOp::Kind::Split: {
            HalfedgeHandle h = op.halfedge;
            HalfedgeHandle o = mesh.opposite(h);
            VertexHandle a = mesh.from_vertex(h);
            VertexHandle b = mesh.to_vertex(h);
            FacetHandle f0 = mesh.facet(h), f1 = mesh.facet(o);

            star.center_vertex_id = mesh.vertex_capacity();  // new vertex
            int e_next = mesh.edge_capacity();
            int f_next = mesh.facet_capacity();
            // Allocation order inside split_edge: edge (m,b), then (m,c) for
            // the facet(h) side, then (m,d); children: facet(h) side first.
            int e_mb = e_next++;
            int e_ma = mesh.edge(h).i;  // edge (a,b) retargets to (a,m)
            int e_mc = f0.valid() ? e_next++ : -1;
            int e_md = f1.valid() ? e_next++ : -1;

            auto push = [&](VertexHandle r1, VertexHandle r2, int facet_id, int parent, int s1,
                            int ring, int s2) {
                StarTriangle t;
                t.r1 = r1;
                t.r2 = r2;
                t.p1 = mesh.position(r1);
                t.p2 = mesh.position(r2);
                t.facet_id = facet_id;
                t.replaced_facet_id = parent;
                t.spoke1_edge_id = s1;
                t.ring_edge_id = ring;
                t.spoke2_edge_id = s2;
                star.triangles.push_back(t);
            };
            if (f0.valid()) {
                VertexHandle c = mesh.to_vertex(mesh.next(h));
                int e_ca = mesh.edge(mesh.prev(h)).i;
                int e_bc = mesh.edge(mesh.next(h)).i;
                int child = f_next++;
                // (a, m, c) keeps f0; (m, b, c) is the new child.
                push(c, a, f0.i, f0.i, e_mc, e_ca, e_ma);
                push(b, c, child, f0.i, e_mb, e_bc, e_mc);
            }
            if (f1.valid()) {
                VertexHandle d = mesh.to_vertex(mesh.next(o));
                int e_ad = mesh.edge(mesh.next(o)).i;
                int e_db = mesh.edge(mesh.prev(o)).i;
                int child = f_next++;
                // (b, m, d) keeps f1; (m, a, d) is the new child.
                push(d, b, f1.i, f1.i, e_md, e_db, e_mb);
                push(a, d, child, f1.i, e_ma, e_ad, e_md);
            }

            if (f0.valid()) star.replaced_facet_ids.push_back(f0.i);
            if (f1.valid()) star.replaced_facet_ids.push_back(f1.i);
            LocalPatch patch = mesh.local_patch({a, b});
            for (FacetHandle f : patch.inner) star.patch_facet_ids.push_back(f.i);
            for (FacetHandle f : patch.extended) star.extended_patch_facet_ids.push_back(f.i);
            break;
        }
    }
    return star;
}

bool creates_foldover(const HalfedgeMesh& mesh, const StarOp& op, double eps_area) {
    StarPreview star = preview_star(mesh, op);
    return creates_foldover_preview(mesh, star, eps_area);
}

bool creates_foldover(const HalfedgeMesh& mesh, const StarOp& op) {
    double diag = mesh.bbox_diagonal();
    return creates_foldover(mesh, op, 1e-12 * diag * diag);
}

bool creates_foldover_preview(const HalfedgeMesh& mesh, const StarPreview& star, double eps_area) {
    for (const StarTriangle& t : star.triangles) {
        Vec3 after_raw = triangle_normal_raw(star.op.target, t.p1, t.p2);
        double area_after = 0.5 * norm(after_raw);
        if (area_after < eps_area) return true;
        auto p = mesh.facet_points(FacetHandle{t.replaced_facet_id});
        Vec3 before = normalized(triangle_normal_raw(p[0], p[1], p[2]));
        if (dot(before, after_raw / (2.0 * area_after)) < 0.0) return true;
    }
    return false;
}

double star_min_angle(const StarPreview& star, const Vec3& center) {
    double worst = std::numeric_limits<double>::infinity();
    for (const StarTriangle& t : star.triangles) {
        try {
            worst = std::min(worst, triangle_min_angle(center, t.p1, t.p2));
        } catch (const GeometryError&) {
            return -std::numeric_limits<double>::infinity();
        }
    }
    return worst;
}

VertexHandle apply_star_op(HalfedgeMesh& mesh, const StarPreview& star) {
    VertexHandle v;
    switch (star.op.kind) {
        case StarOp::Kind::Relocate:
            mesh.relocate_vertex(star.op.vertex, star.op.target);
            v = star.op.vertex;
            break;
        case StarOp::Kind::Collapse:
            v = mesh.collapse_edge(star.op.halfedge, star.op.target);
            break;
        case StarOp::Kind::Split:
            v = mesh.split_edge(star.op.halfedge, star.op.target);
            break;
    }
    if (v.i != star.center_vertex_id) throw MeshError("star preview: center id mismatch");
    for (const StarTriangle& t : star.triangles) {
        FacetHandle f{t.facet_id};
        if (mesh.is_deleted(f)) throw MeshError("star preview: predicted facet missing");
        auto fv = mesh.facet_vertices(f);
        int k = fv[0] == v ? 0 : fv[1] == v ? 1 : 2;
        if (fv[k] != v || fv[(k + 1) % 3] != t.r1 || fv[(k + 2) % 3] != t.r2)
            throw MeshError("star preview: facet vertices mismatch");
        if (mesh.find_halfedge(v, t.r1).valid() &&
            mesh.edge(mesh.find_halfedge(v, t.r1)).i != t.spoke1_edge_id)
            throw MeshError("star preview: spoke edge id mismatch");
    }
    return v;
}

}  // namespace minangle
