#include "doctest.h"
#include "heapstone/cochain.hpp"

#include <random>

using namespace heapstone;

namespace {

Cochain random_cochain(const FiniteSSet& x, int d, const FGAbelianGroup& pi, std::mt19937& rng, int range = 3)
{
    Cochain c = Cochain::zero(x, d, pi);
    std::uniform_int_distribution<int> u(-range, range);
    for (std::size_t id = 0; id < c.size(); ++id) {
        IntVector v(pi.n_generators());
        for (auto& e : v) e = u(rng);
        c.set(id, v);
    }
    return c.canonical();
}

Cochain absolute_cup1_rhs(const Cochain& u, const Cochain& v)
{
    int p = u.degree(), q = v.degree();
    auto sgn = [](int e) { return e % 2 ? -1 : 1; };
    return cup(u, v).times(sgn(p + q - 1)) + cup(v, u).times(sgn(p * q + p + q)) + cup1(coboundary(u), v) +
           cup1(u, coboundary(v)).times(sgn(p));
}

std::string h(const RelativeComplex& rc, int k, const FGAbelianGroup& pi) { return rc.cohomology(k, pi)->group().type_string(); }

}  // namespace

TEST_CASE("coboundary squares to zero and pullbacks commute with it")
{
    std::mt19937 rng(7);
    FiniteSSet x = ProductSSet({standard_simplex(1), standard_simplex(2)}).sset();

    for (int d = 0; d < 3; ++d) {
        Cochain c = random_cochain(x, d, FGAbelianGroup::integers(), rng);
        CHECK(coboundary(coboundary(c)).is_zero());
    }
    ProductSSet prod({standard_simplex(1), boundary(3)});
    Cochain c = random_cochain(boundary(3), 1, FGAbelianGroup::integers(), rng);
    CHECK(pullback(prod.projection(1), coboundary(c)).equals(coboundary(pullback(prod.projection(1), c))));
}

TEST_CASE("E(Z,0) on Δ^1: coboundary of vertex values (a, b) is b - a")
{
    FGAbelianGroup z = FGAbelianGroup::integers();
    Cochain c = Cochain::zero(standard_simplex(1), 0, z);
    c.set(0, {Integer(4)});
    c.set(1, {Integer(9)});
    CHECK(coboundary(c).value(0)[0] == 5);
}

TEST_CASE("cup unit, Leibniz and the cup-1 coboundary formula with integer coefficients")
{
    std::mt19937 rng(11);
    FGAbelianGroup z = FGAbelianGroup::integers();
    FiniteSSet x = standard_simplex(6);
    Cochain one = Cochain::zero(x, 0, z);
    for (std::size_t i = 0; i < one.size(); ++i) one.set(i, {Integer(1)});
    for (int p = 0; p <= 3; ++p)
        for (int q = 0; q <= 3; ++q) {
            Cochain a = random_cochain(x, p, z, rng), b = random_cochain(x, q, z, rng);
            CHECK(cup(one, a).equals(a));
            CHECK(cup(a, one).equals(a));
            Cochain lhs = coboundary(cup(a, b));
            Cochain rhs = cup(coboundary(a), b) + cup(a, coboundary(b)).times(p % 2 ? -1 : 1);
            CHECK(lhs.equals(rhs));
            if (p >= 1 && q >= 1 && p + q <= 5) CHECK(coboundary(cup1(a, b)).equals(absolute_cup1_rhs(a, b)));
        }
}

TEST_CASE("mod 2: δ(c⌣₁c) = c⌣c + c⌣c for cocycles, and the cup-i coboundary formula")
{
    std::mt19937 rng(5);
    FGAbelianGroup z2 = FGAbelianGroup::cyclic(2);
    FiniteSSet x = standard_simplex(7);
    for (int trial = 0; trial < 3; ++trial) {
        Cochain c = coboundary(random_cochain(x, 2, z2, rng)).canonical();
        CHECK(coboundary(cup1(c, c)).equals(cup(c, c) + cup(c, c)));
    }
    for (int i = 1; i <= 3; ++i)
        for (int p = i; p <= 4; ++p)
            for (int q = i; q <= 4; ++q) {
                if (p + q - i + 1 > 7) continue;
                Cochain u = random_cochain(x, p, z2, rng), v = random_cochain(x, q, z2, rng);
                Cochain lhs = coboundary(cup_i(i, u, v));
                Cochain rhs = cup_i(i - 1, u, v) + cup_i(i - 1, v, u) + cup_i(i, coboundary(u), v) + cup_i(i, u, coboundary(v));
                CHECK(lhs.equals(rhs));
            }
    // the subset formula at i = 1 agrees with cup1 mod 2
    Cochain u = random_cochain(x, 3, z2, rng), v = random_cochain(x, 3, z2, rng);
    CHECK(cup_i(1, u, v).equals(cup1(u, v).canonical()));
}

TEST_CASE("relative complex: absolute cohomology of standard triangulations")
{
    FGAbelianGroup z = FGAbelianGroup::integers(), z2 = FGAbelianGroup::cyclic(2);
    RelativeComplex s2(boundary(3), Subcomplex::empty(boundary(3)));
    CHECK(h(s2, 0, z) == "Z");
    CHECK(h(s2, 1, z) == "0");
    CHECK(h(s2, 2, z) == "Z");
    CHECK(h(s2, 3, z) == "0");
    FiniteSSet rp = real_projective_plane();
    RelativeComplex rp2(rp, Subcomplex::empty(rp));
    CHECK(h(rp2, 1, z) == "0");
    CHECK(h(rp2, 2, z) == "Z/2");
    CHECK(h(rp2, 1, z2) == "Z/2");
    CHECK(h(rp2, 2, z2) == "Z/2");
    FiniteSSet tor = torus();
    RelativeComplex t2(tor, Subcomplex::empty(tor));
    CHECK(h(t2, 1, z) == "Z^2");
    CHECK(h(t2, 2, z) == "Z");
    RelativeComplex s4(boundary(5), Subcomplex::empty(boundary(5)));
    CHECK(h(s4, 4, z) == "Z");
    CHECK(h(s4, 3, z) == "0");
    CHECK(h(s4, 4, FGAbelianGroup::cyclic(6)) == "Z/6");
}

TEST_CASE("relative complex: pairs")
{
    FGAbelianGroup z = FGAbelianGroup::integers();
    FiniteSSet d2 = standard_simplex(2);
    Subcomplex bd = Subcomplex::from_predicate(d2, [](const Simplex& s) { return s.dim < 2; });
    RelativeComplex disk(d2, bd);
    CHECK(h(disk, 2, z) == "Z");
    CHECK(h(disk, 1, z) == "0");
    ProductSSet cyl({standard_simplex(1), boundary(3)});
    Subcomplex ends = Subcomplex::from_predicate(cyl.sset(), [&](const Simplex& s) {
        return cyl.components(s)[0].base_dim == 0;
    });
    RelativeComplex susp(cyl.sset(), ends);
    CHECK(h(susp, 3, z) == "Z");
    CHECK(h(susp, 2, z) == "0");
    CHECK(h(susp, 1, z) == "Z");
    RelativeComplex all(d2, Subcomplex::full(d2));
    for (int k = 0; k <= 2; ++k) CHECK(h(all, k, z) == "0");
}

TEST_CASE("relative solve and class round trips")
{
    std::mt19937 rng(3);
    FGAbelianGroup z = FGAbelianGroup::integers();
    FiniteSSet s4 = boundary(5);
    RelativeComplex rc(s4, Subcomplex::empty(s4));
    for (int trial = 0; trial < 5; ++trial) {
        Cochain b = random_cochain(s4, 3, z, rng);
        Cochain t = coboundary(b);
        auto c = rc.solve(t);
        REQUIRE(c);
        CHECK(coboundary(*c).equals(t));
        CHECK(rc.cohomology(4, z)->class_of(t).is_zero());
    }
    Cochain fund = Cochain::zero(s4, 4, z);
    fund.set(0, {Integer(1)});
    CHECK_FALSE(rc.solve(fund));
    auto h4 = rc.cohomology(4, z);
    GroupElement g = h4->class_of(fund);
    CHECK_FALSE(g.is_zero());
    CHECK(h4->class_of(h4->representative(g)) == g);
    CHECK(h4->class_of(fund.times(3) + coboundary(random_cochain(s4, 3, z, rng))) == g.times(3));
    CHECK_THROWS_AS(rc.solve(random_cochain(s4, 3, z, rng)), std::invalid_argument);

    // relative: the solution vanishes on the subcomplex
    ProductSSet cyl({standard_simplex(1), boundary(3)});
    Subcomplex ends = Subcomplex::from_predicate(cyl.sset(), [&](const Simplex& s) { return cyl.components(s)[0].base_dim == 0; });
    RelativeComplex rel(cyl.sset(), ends);
    Cochain b = random_cochain(cyl.sset(), 2, z, rng);
    for (std::size_t id = 0; id < b.size(); ++id)
        if (ends.contains(2, id)) b.set(id, {Integer(0)});
    auto c = rel.solve(coboundary(b));
    REQUIRE(c);
    CHECK(rel.vanishes_on_subcomplex(*c));
}

TEST_CASE("simplex pullbacks")
{
    std::mt19937 rng(1);
    FGAbelianGroup z = FGAbelianGroup::integers();
    FiniteSSet x = boundary(4);
    Cochain c = random_cochain(x, 2, z, rng);
    Simplex sigma = Simplex::nondegenerate(3, 2);
    Cochain local = pullback_simplex(c, sigma);
    CHECK(local.space().same_as(standard_simplex(3)));
    CHECK(pullback(simplex_map(x, sigma), c).equals(local));
    // faces of the local cochain agree with the cochain on the face simplex
    for (int i = 0; i <= 3; ++i)
        CHECK(pullback_order(local, coface(3, i)).equals(pullback_simplex(c, x.face(sigma, i))));
    CHECK(pullback_order(local, codegeneracy(3, 1)).equals(pullback_simplex(c, x.degeneracy(sigma, 1))));
}
