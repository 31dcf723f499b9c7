#include "doctest.h"
#include "heapstone/em.hpp"

#include <set>

using namespace heapstone;

namespace {

std::string key(const Cochain& c) { return c.canonical().to_string(); }

}  // namespace

TEST_CASE("K(Z/2,1) has 2^q simplices in level q; K(pi,n) is a point below level n")
{
    EMSpace k(EMSpace::Kind::K, 1, FGAbelianGroup::cyclic(2));
    for (int q = 0; q <= 4; ++q) CHECK(k.enumerate(q).size() == (std::size_t{1} << q));
    EMSpace k3(EMSpace::Kind::K, 3, FGAbelianGroup::cyclic(3));
    for (int q = 0; q < 3; ++q) CHECK(k3.enumerate(q).size() == 1);
    CHECK(k3.enumerate(3).size() == 3);
}

TEST_CASE("delta_map is a levelwise surjection onto cocycles")
{
    FGAbelianGroup z2 = FGAbelianGroup::cyclic(2), z3 = FGAbelianGroup::cyclic(3);
    for (auto [n, pi, top] : {std::tuple{1, z2, 4}, std::tuple{0, z3, 3}, std::tuple{2, z2, 4}}) {
        EMSpace e(EMSpace::Kind::E, n, pi), k(EMSpace::Kind::K, n + 1, pi);
        for (int q = 0; q <= top; ++q) {
            std::set<std::string> image, cocycles;
            for (const auto& s : e.enumerate(q)) {
                CHECK(k.contains(delta_map(s)));
                image.insert(key(delta_map(s)));
            }
            for (const auto& s : k.enumerate(q)) cocycles.insert(key(s));
            CHECK(image == cocycles);
        }
    }
}

TEST_CASE("faces, degeneracies and the group structure")
{
    FGAbelianGroup z = FGAbelianGroup::integers(), z2 = FGAbelianGroup::cyclic(2);
    EMSpace k1(EMSpace::Kind::K, 1, z2);
    EMSimplex e = k1.zero(1);
    e.set(0, {Integer(1)});
    CHECK(k1.contains(e));
    CHECK(em_face(e, 0).equals(k1.zero(0)));
    CHECK(em_face(e, 1).equals(k1.zero(0)));
    CHECK(em_face(k1.zero(3), 2).equals(k1.zero(2)));

    std::mt19937 rng(9);
    EMSpace e3(EMSpace::Kind::E, 3, z), k3(EMSpace::Kind::K, 3, z);
    std::vector<EMSimplex> samples;
    for (int q = 2; q <= 6; ++q) samples.push_back(e3.random(q, rng));
    CHECK(spot_check_identities(e3, samples).empty());
    std::vector<EMSimplex> ks;
    for (int q = 3; q <= 6; ++q) ks.push_back(k3.random(q, rng));
    CHECK(spot_check_identities(k3, ks).empty());
    for (const auto& s : samples) {
        EMSimplex t = e3.random(s.space().dim(), rng);
        CHECK(em_add(s, em_neg(s)).is_zero());
        CHECK(em_add(s, e3.zero(s.space().dim())).equals(s));
        for (int i = 0; i <= s.space().dim(); ++i) {
            CHECK(em_face(em_add(s, t), i).equals(em_add(em_face(s, i), em_face(t, i))));
            CHECK(em_face(em_degeneracy(s, i), i).equals(s));
        }
        CHECK(delta_map(delta_map(s)).is_zero());
    }
}

TEST_CASE("delta on Δ^1 with integer vertex values")
{
    EMSpace e0(EMSpace::Kind::E, 0, FGAbelianGroup::integers());
    EMSimplex s = e0.zero(1);
    s.set(0, {Integer(-2)});
    s.set(1, {Integer(5)});
    CHECK(delta_map(s).value(0)[0] == 7);
}

TEST_CASE("lift_through_delta_on_simplex")
{
    FGAbelianGroup z = FGAbelianGroup::integers();
    EMSpace k4(EMSpace::Kind::K, 4, z);
    auto zero_lift = lift_through_delta_on_simplex(k4.zero(5), {});
    REQUIRE(zero_lift);
    CHECK(zero_lift->is_zero());

    EMSimplex top = k4.zero(4);
    top.set(0, {Integer(3)});
    auto c = lift_through_delta_on_simplex(top, {});
    REQUIRE(c);
    CHECK(coboundary(*c).equals(top));

    std::mt19937 rng(2);
    EMSpace e3(EMSpace::Kind::E, 3, z);
    EMSimplex want = e3.random(5, rng);
    std::vector<std::pair<int, EMSimplex>> cons;
    for (int i : {0, 2, 5}) cons.emplace_back(i, em_face(want, i));
    auto got = lift_through_delta_on_simplex(delta_map(want), cons);
    REQUIRE(got);
    CHECK(delta_map(*got).equals(delta_map(want)));
    for (const auto& [i, f] : cons) CHECK(em_face(*got, i).equals(f));

    // q = 1, n = 0: the vertex values fix δc, which contradicts z
    EMSpace e0(EMSpace::Kind::E, 0, z), k1(EMSpace::Kind::K, 1, z);
    EMSimplex v0 = e0.zero(0), v1 = e0.zero(0);
    v0.set(0, {Integer(1)});
    v1.set(0, {Integer(1)});
    EMSimplex zz = k1.zero(1);
    zz.set(0, {Integer(4)});
    CHECK_FALSE(lift_through_delta_on_simplex(zz, {{0, v0}, {1, v1}}));

    // incompatible constraints are rejected before solving
    EMSimplex other = e3.random(5, rng);
    CHECK_THROWS_AS(lift_through_delta_on_simplex(delta_map(want), {{0, em_face(want, 0)}, {1, em_face(other, 1)}}),
                    std::invalid_argument);
}

TEST_CASE("classify_map_to_K")
{
    FGAbelianGroup z = FGAbelianGroup::integers();
    FiniteSSet s2 = boundary(3);
    RelativeComplex pair(s2, Subcomplex::empty(s2));
    Cochain fund = Cochain::zero(s2, 2, z);
    fund.set(0, {Integer(1)});
    GroupElement g = classify_map_to_K(pair, fund);
    CHECK(g.group().type_string() == "Z");
    IntVector sc = g.group().smith_coordinates(g.coords());
    REQUIRE(sc.size() == 1);
    CHECK(abs(sc[0]) == 1);
    Cochain b = Cochain::zero(s2, 1, z);
    b.set(2, {Integer(5)});
    CHECK(classify_map_to_K(pair, coboundary(b)).is_zero());
    CHECK_THROWS_AS(classify_map_to_K(pair, b), std::invalid_argument);

    FiniteSSet rp = real_projective_plane();
    RelativeComplex rp2(rp, Subcomplex::empty(rp));
    Cochain face = Cochain::zero(rp, 2, z);
    face.set(0, {Integer(1)});
    GroupElement r = classify_map_to_K(rp2, face);
    CHECK(r.group().type_string() == "Z/2");
    CHECK_FALSE(r.is_zero());
    CHECK(r.times(2).is_zero());
}
