#include "doctest.h"
#include "heapstone/simplicial.hpp"

#include <random>

using namespace heapstone;

namespace {

std::vector<std::size_t> counts(const FiniteSSet& x)
{
    std::vector<std::size_t> c;
    for (int d = 0; d <= x.dim(); ++d) c.push_back(x.count(d));
    return c;
}

long long binom(int n, int k)
{
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// number of jointly injective lattice paths from (0,0) to (p,q) of length m
long long paths(int p, int q, int m)
{
    // choose which of the m steps move x (p of them) and which move y (q of them); diagonal steps move both
    long long total = 0;
    int diag = p + q - m;
    if (diag < 0 || diag > std::min(p, q)) return 0;
    total = binom(m, diag) * binom(m - diag, p - diag);
    return total;
}

}  // namespace

TEST_CASE("standard simplices and boundaries")
{
    CHECK(counts(standard_simplex(1)) == std::vector<std::size_t>{2, 1});
    CHECK(counts(boundary(2)) == std::vector<std::size_t>{3, 3});
    auto s4 = boundary(5);
    std::vector<std::size_t> expect;
    for (int k = 0; k < 5; ++k) expect.push_back(static_cast<std::size_t>(binom(6, k + 1)));
    CHECK(counts(s4) == expect);
    CHECK(s4.euler_characteristic() == 2);
    CHECK(s4.validate().empty());
    CHECK(boundary(0).empty());
    CHECK(standard_simplex(3).same_as(standard_simplex(3)));
}

TEST_CASE("degeneracy normal form")
{
    Simplex s = Simplex::from_word(0, 2, {3, 1});
    CHECK(s.dim == 4);
    CHECK(s.degeneracy_word() == std::vector<int>{3, 1});
    auto d2 = standard_simplex(2);
    // s_1 s_1 x = s_2 s_1 x
    Simplex x = Simplex::nondegenerate(2, 0);
    CHECK(d2.degeneracy(d2.degeneracy(x, 1), 1) == d2.degeneracy(d2.degeneracy(x, 1), 2));
    // d_i s_i = id
    for (int i = 0; i <= 2; ++i) {
        CHECK(d2.face(d2.degeneracy(x, i), i) == x);
        CHECK(d2.face(d2.degeneracy(x, i), i + 1) == x);
    }
    CHECK_THROWS_AS(Simplex::from_word(0, 1, {1, 2}), std::invalid_argument);
}

TEST_CASE("spot check identities on standard models")
{
    auto x = real_projective_plane();
    std::vector<Simplex> samples;
    for (int d = 0; d <= x.dim(); ++d)
        for (auto s : x.simplices(d)) {
            samples.push_back(s);
            samples.push_back(x.degeneracy(s, 0));
        }
    CHECK(spot_check_identities<Simplex>(x, samples).empty());
    CHECK(x.euler_characteristic() == 1);
    CHECK(torus().euler_characteristic() == 0);
    CHECK(torus().validate().empty());
}

TEST_CASE("products")
{
    auto d1 = standard_simplex(1);
    ProductSSet sq({d1, d1});
    CHECK(counts(sq.sset()) == std::vector<std::size_t>{4, 5, 2});
    CHECK(sq.sset().validate().empty());
    for (std::size_t i = 0; i < 2; ++i) CHECK(sq.projection(i).validate().empty());

    ProductSSet pr({d1, standard_simplex(2)});
    CHECK(pr.sset().count(3) == 3);
    CHECK(pr.sset().validate().empty());

    auto rp2 = real_projective_plane();
    ProductSSet unit({rp2, point()});
    CHECK(counts(unit.sset()) == counts(rp2));

    // cell counts of Δ^p × Δ^q against the lattice-path formula
    for (int p = 0; p <= 3; ++p)
        for (int q = 0; q <= 3; ++q) {
            ProductSSet x({standard_simplex(p), standard_simplex(q)});
            for (int m = 0; m <= p + q; ++m) {
                long long expect = 0;
                for (int a = 0; a <= p; ++a)
                    for (int b = 0; b <= q; ++b) expect += binom(p + 1, a + 1) * binom(q + 1, b + 1) * paths(a, b, m);
                CHECK(static_cast<long long>(x.sset().count(m)) == expect);
            }
        }
}

TEST_CASE("product euler characteristic is multiplicative and associative counts")
{
    auto a = boundary(2), b = real_projective_plane(), c = standard_simplex(1);
    ProductSSet ab({a, b});
    CHECK(ab.sset().euler_characteristic() == a.euler_characteristic() * b.euler_characteristic());
    ProductSSet bc({b, c});
    CHECK(bc.sset().euler_characteristic() == 1);
    ProductSSet ab_c({ab.sset(), c});
    ProductSSet a_bc({a, bc.sset()});
    ProductSSet abc({a, b, c});
    CHECK(counts(ab_c.sset()) == counts(a_bc.sset()));
    CHECK(counts(ab_c.sset()) == counts(abc.sset()));
    CHECK(abc.sset().validate().empty());
}

TEST_CASE("pairing and tuple of degenerate components")
{
    auto d1 = standard_simplex(1);
    ProductSSet sq({d1, d1});
    auto diag = sq.pairing({SimplicialMap::identity(d1), SimplicialMap::identity(d1)});
    CHECK(diag.validate().empty());
    // the pair (s0 e, s1 e) is the nondegenerate 2-simplex
    Simplex e = Simplex::nondegenerate(1, 0);
    Simplex t = sq.tuple({d1.degeneracy(e, 0), d1.degeneracy(e, 1)});
    CHECK(t.is_nondegenerate());
    CHECK(t.dim == 2);
    // (s0 e, s0 e) is degenerate on the diagonal
    Simplex u = sq.tuple({d1.degeneracy(e, 0), d1.degeneracy(e, 0)});
    CHECK(u.base_dim == 1);
}

TEST_CASE("coproduct and pushout")
{
    auto c = coproduct({point(), point()});
    CHECK(c.sset.count(0) == 2);
    // A = Δ^0 in Δ^1 glued to a point: nothing changes
    auto d1 = standard_simplex(1);
    auto a = Subcomplex::generated_by(d1, {Simplex::nondegenerate(0, 0)});
    auto p = pushout(a, SimplicialMap::constant(a.sset(), point(), 0));
    CHECK(counts(p.sset) == std::vector<std::size_t>{2, 1});
    // collapse both ends: a circle
    auto ends = Subcomplex::generated_by(d1, {Simplex::nondegenerate(0, 0), Simplex::nondegenerate(0, 1)});
    auto circ = pushout(ends, SimplicialMap::constant(ends.sset(), point(), 0));
    CHECK(counts(circ.sset) == std::vector<std::size_t>{1, 1});
    CHECK(circ.sset.validate().empty());
    CHECK(circ.from_x.validate().empty());
}

TEST_CASE("fibered products and diagonal subspaces")
{
    auto x = boundary(2);
    auto to_pt = SimplicialMap::constant(x, point(), 0);
    auto fp = fibered_product(to_pt, to_pt);
    CHECK(fp.sub.sset().total_cells() == fp.product.sset().total_cells());

    auto id = SimplicialMap::identity(x);
    auto diag = fibered_product(id, id);
    CHECK(counts(diag.sub.sset()) == counts(x));

    // two disjoint sections of a trivial 2-point fibre bundle over Δ^1
    auto d1 = standard_simplex(1);
    auto two = coproduct({d1, d1});
    auto fold = SimplicialMap::from_function(two.sset, d1, [&](const Simplex& s) {
        Simplex r = s;
        if (r.id >= d1.count(s.base_dim)) r.id -= d1.count(s.base_dim);
        return r;
    });
    auto pair = fibered_product(fold, fold);
    // over each vertex: 2×2 = 4 points
    std::size_t vertices = pair.sub.sset().count(0);
    CHECK(vertices == 8);
    CHECK(pair.sub.sset().count(1) == 4);

    auto d111 = diag_subspace(to_pt, {1, 1, 1});
    auto d21 = diag_subspace(to_pt, {2, 1});
    auto d12 = diag_subspace(to_pt, {1, 2});
    auto d3 = diag_subspace(to_pt, {3});
    CHECK(d111.diagonal.sset().total_cells() == d111.power.sset().total_cells());
    std::size_t fp2 = fibered_product(to_pt, to_pt).sub.sset().total_cells();
    CHECK(d21.diagonal.sset().total_cells() == fp2);
    CHECK(counts(d3.diagonal.sset()) == counts(x));
    auto in21 = diagonal_in(d111.product, to_pt, {2, 1});
    auto in12 = diagonal_in(d111.product, to_pt, {1, 2});
    auto in3 = diagonal_in(d111.product, to_pt, {3});
    auto inter = in21.intersect(in12);
    CHECK(counts(inter.sset()) == counts(d3.diagonal.sset()));
    CHECK(counts(inter.sset()) == counts(in3.sset()));
    CHECK(counts(in12.sset()) == counts(d12.diagonal.sset()));
    // chain δ³ ⊆ δ^{21} ⊆ δ^{111}
    CHECK(in3.intersect(in21).sset().total_cells() == in3.sset().total_cells());
    CHECK(in21.intersect(d111.power).sset().total_cells() == in21.sset().total_cells());
}

TEST_CASE("hat delta subspaces")
{
    auto pt = point();
    auto h = hat_delta(SimplicialMap::identity(pt));
    CHECK(counts(h.hat111.sset()) == std::vector<std::size_t>{3, 3, 1});
    CHECK(counts(h.hat2112.sset()) == std::vector<std::size_t>{2, 1});

    CHECK_FALSE(hat111_member(0b111, false, false));
    CHECK(hat111_member(0b100, false, false));
    CHECK(hat111_member(0b101, true, false));
    CHECK_FALSE(hat111_member(0b101, false, true));
    CHECK(hat2112_member(0b001, true, false));
    CHECK_FALSE(hat2112_member(0b011, true, false));

    auto x = standard_simplex(1);
    auto hx = hat_delta(SimplicialMap::constant(x, pt, 0));
    CHECK(hx.hat111.sset().validate().empty());
    // vertices over the Δ² vertex 2 form the full triple power (2^3 vertices)
    std::size_t over2 = 0;
    for (const auto& s : hx.hat111.sset().simplices(0)) {
        auto ps = hx.hat111.inclusion()(s);
        if (hx.product.components(ps)[0].id == 2) ++over2;
    }
    CHECK(over2 == 8);
}

TEST_CASE("cylinder replacement")
{
    auto ci = cylinder_replacement(SimplicialMap::identity(point()));
    CHECK(counts(ci.glued.sset) == std::vector<std::size_t>{2, 1});
    CHECK(ci.projection.validate().empty());
    CHECK(ci.end_inclusion.validate().empty());

    auto two = coproduct({point(), point()});
    auto cw = cylinder_replacement(SimplicialMap::constant(two.sset, point(), 0));
    CHECK(counts(cw.glued.sset) == std::vector<std::size_t>{3, 2});
    CHECK(cw.projection.compose_after(cw.end_inclusion).validate().empty());

    auto d1 = standard_simplex(1);
    auto incl = face_inclusion(2, 0);
    auto cyl = cylinder_replacement(incl);
    CHECK(cyl.glued.sset.validate().empty());
    CHECK(cyl.projection.validate().empty());
    CHECK(cyl.glued.sset.euler_characteristic() == 1);
    (void)d1;
}

TEST_CASE("fibrewise suspension")
{
    auto id = SimplicialMap::identity(boundary(2));
    auto s = fibrewise_suspension(id);
    ProductSSet prism({standard_simplex(1), boundary(2)});
    CHECK(counts(s.glued.sset) == counts(prism.sset()));

    auto s0 = coproduct({point(), point()});
    auto sus = fibrewise_suspension(SimplicialMap::constant(s0.sset, point(), 0));
    CHECK(counts(sus.glued.sset) == std::vector<std::size_t>{2, 2});
    CHECK(sus.projection.validate().empty());

    auto s2 = fibrewise_suspension(SimplicialMap::constant(boundary(2), point(), 0));
    CHECK(s2.glued.sset.euler_characteristic() == 2);
    CHECK(s2.glued.sset.validate().empty());
    CHECK(s2.quotient.validate().empty());
    CHECK(s2.end0.validate().empty());
}

TEST_CASE("face and vertex inclusions")
{
    for (int i = 0; i <= 3; ++i) CHECK(face_inclusion(3, i).validate().empty());
    CHECK(vertex_inclusion(2, 1)(Simplex::nondegenerate(0, 0)).id == 1);
    CHECK_THROWS_AS(face_inclusion(2, 3), std::out_of_range);
    auto f = simplex_face(standard_simplex(3), {0, 2});
    CHECK(counts(f.sset()) == std::vector<std::size_t>{2, 1});
}

TEST_CASE("builder rejects inconsistent faces")
{
    SSetBuilder b;
    b.add_vertex();
    b.add_vertex();
    b.add_simplex(1, {Simplex::nondegenerate(0, 0), Simplex::nondegenerate(0, 1)});
    b.add_simplex(1, {Simplex::nondegenerate(0, 1), Simplex::nondegenerate(0, 0)});
    // a triangle whose faces do not match up
    b.add_simplex(2, {Simplex::nondegenerate(1, 0), Simplex::nondegenerate(1, 0), Simplex::nondegenerate(1, 0)});
    CHECK_THROWS_AS(b.build(), std::invalid_argument);
}
