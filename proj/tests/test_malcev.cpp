#include "doctest.h"
#include "heapstone/malcev.hpp"

using namespace heapstone;

namespace {

FGAbelianGroup Z() { return FGAbelianGroup::integers(); }

Tower s3_tower()
{
    FGAbelianGroup z = Z(), z2 = FGAbelianGroup::cyclic(2);
    KExpr rho = KExpr::mod(2, KExpr::fib(1, 3, z));
    return Tower(point(), {StageSpec{3, z, KExpr::zero(4, z)}, StageSpec{4, z2, KExpr::cup_i(1, rho, rho)}});
}

Cochain random_cochain(const FiniteSSet& x, int deg, const FGAbelianGroup& pi, std::mt19937& rng)
{
    std::uniform_int_distribution<int> u(-3, 3);
    Cochain c = Cochain::zero(x, deg, pi);
    for (std::size_t i = 0; i < c.size(); ++i) c.set(i, {Integer(u(rng))});
    return c.canonical();
}

// A random map X -> P_top over the constant base map, vanishing on A.
StageMap random_map(const Tower& t, const RelativeComplex& pair, std::mt19937& rng)
{
    const FiniteSSet& x = pair.space();
    StageMap f = base_only(SimplicialMap::constant(x, t.base(), 0));
    for (int j = 1; j <= t.height(); ++j) {
        LiftResult r = lift_map(pair, t, f);
        REQUIRE(r.lift);
        const StageSpec& s = t.stage(j);
        Cochain noise = s.n == 0 ? Cochain::zero(x, 0, s.pi)
                                 : mask_to(random_cochain(x, s.n - 1, s.pi, rng), pair.subcomplex()).times(1);
        Cochain off_a = noise - mask_to(noise, pair.subcomplex());
        f = principal_action(*r.lift, coboundary(off_a));
    }
    return f;
}

StageMap end_of(const StageMap& h, const ProductSSet& prism, std::size_t vertex)
{
    const FiniteSSet& x = prism.factor(1);
    SimplicialMap i = prism.pairing({SimplicialMap::constant(x, prism.factor(0), vertex), SimplicialMap::identity(x)});
    return precompose(h, i);
}

bool same_coords(const StageMap& a, const StageMap& b)
{
    if (a.level() != b.level()) return false;
    for (int j = 0; j < a.level(); ++j)
        if (!a.coords[j].equals(b.coords[j])) return false;
    return true;
}

}  // namespace

TEST_CASE("first stages carry the strict operation c - e + d")
{
    FGAbelianGroup z = Z();
    Tower t(point(), {StageSpec{2, z, KExpr::zero(3, z)}});
    WeakMalcev w(t);
    StageSet p(t, 1);
    std::mt19937 rng(1);
    EMSpace fibre(EMSpace::Kind::K, 2, z);
    for (int q = 2; q <= 5; ++q) {
        StageSimplex x = p.random(q, rng), r = p.random_over(x.base, rng), y = p.random_over(x.base, rng);
        CHECK(p.equal(w.tau(x, x, y), y));
        CHECK(p.equal(w.tau(x, y, y), x));
        EMSimplex z1 = fibre.random(q, rng), z2 = fibre.random(q, rng), z3 = fibre.random(q, rng);
        StageSimplex lhs = w.tau(principal_action(x, z1), principal_action(r, z2), principal_action(y, z3));
        CHECK(p.equal(lhs, principal_action(w.tau(x, r, y), em_add(em_add(z1, em_neg(z2)), z3))));
    }
    CHECK(w.nonzero_values() == 0);
}

TEST_CASE("deviation of a cup-square k-invariant")
{
    FGAbelianGroup z = Z();
    KExpr c = KExpr::fib(1, 3, z);
    Tower t(point(), {StageSpec{3, z, KExpr::zero(4, z)}, StageSpec{5, z, KExpr::cup(c, c)}});
    WeakMalcev w(t);
    std::mt19937 rng(2);
    HatQuery q = random_hat_simplex(t, 1, 6, rng, true);
    StageMap below = base_only(q.x.base);
    below.coords.push_back((q.x.coords[0] - q.r.coords[0] + q.y.coords[0]).canonical());
    Cochain m = w.deviation(2, q, below);
    Cochain a = q.x.coords[0] - q.r.coords[0], b = q.y.coords[0] - q.r.coords[0];
    CHECK(m.equals(cup(a, b) + cup(b, a)));
    CHECK_FALSE(m.is_zero());
    // m vanishes on the cancellation triples
    HatQuery xxy{q.label, q.x, q.x, q.y};
    StageMap b2 = base_only(q.x.base);
    b2.coords.push_back(q.y.coords[0]);
    CHECK(w.deviation(2, xxy, b2).is_zero());
    StageMap t2 = w.tau_hat(q);
    CHECK(is_member(t, t2));
}

TEST_CASE("base-pulled k-invariants have no deviation")
{
    FiniteSSet b = boundary(5);
    FGAbelianGroup z = Z();
    Cochain fund = Cochain::zero(b, 4, z);
    fund.set(0, {Integer(1)});
    Tower t(b, {StageSpec{3, z, KExpr::base(fund)}});
    WeakMalcev w(t);
    std::mt19937 rng(3);
    CHECK(w.validate_random(1, 6, rng) == 0);
}

TEST_CASE("corrector on the 3-sphere tower")
{
    Tower t = s3_tower();
    WeakMalcev w(t);
    std::mt19937 rng(4);
    std::size_t before = Validators::instance().violations("deltaM");
    CHECK(w.validate_random(2, 40, rng) > 0);
    CHECK(w.nonzero_values() > 0);
    CHECK(Validators::instance().violations("deltaM") == before);
    // closed form: a ⌣₂ b with a = ρ(x - r), b = ρ(y - r) also lifts m
    FGAbelianGroup z2 = t.stage(2).pi;
    for (int k = 0; k < 4; ++k) {
        HatQuery q = random_hat_simplex(t, 2, 5 + k % 2, rng, true);
        StageMap out = w.tau_hat(q);
        Cochain m = w.deviation(2, q, out.truncated(1));
        GroupHom rho(Z(), z2, IntMatrix(1, 1, {Integer(1)}));
        Cochain a = apply_hom(GroupHom(q.x.coords[0].coefficients(), z2, rho.matrix()), q.x.coords[0] - q.r.coords[0]);
        Cochain b = apply_hom(GroupHom(q.x.coords[0].coefficients(), z2, rho.matrix()), q.y.coords[0] - q.r.coords[0]);
        CHECK(coboundary(cup_i(2, a, b)).equals(m));
        CHECK(out.coords[1].equals((q.x.coords[1] - q.r.coords[1] + q.y.coords[1] + relabel(cup_i(2, a, b), z2)).canonical()));
    }
    // the prescribed-zero region
    for (int k = 0; k < 12; ++k) {
        HatQuery q = random_hat_simplex(t, 2, 5, rng);
        StageMap out = w.tau_hat(q);
        CHECK(is_member(t, out));
    }
    CHECK(Validators::instance().violations("M-zero") == 0);
}

TEST_CASE("cancellation homotopies and the diagonal")
{
    Tower t = s3_tower();
    WeakMalcev w(t);
    std::mt19937 rng(5);
    FiniteSSet x = boundary(5);
    RelativeComplex pair(x, Subcomplex::empty(x));
    StageMap a = random_map(t, pair, rng), b = random_map(t, pair, rng);
    PrismMap lam = w.lambda(a, b);
    CHECK(same_coords(end_of(lam.map, lam.product, 0), b));
    CHECK(same_coords(end_of(lam.map, lam.product, 1), w.tau(a, a, b)));
    PrismMap rho = w.rho(a, b);
    CHECK(same_coords(end_of(rho.map, rho.product, 0), a));
    CHECK(same_coords(end_of(rho.map, rho.product, 1), w.tau(a, b, b)));
    PrismMap eta = w.eta(a);
    CHECK(is_member(t, eta.map));
    // at the corners of Δ² the diagonal homotopy is a, a and τ(a,a,a)
    CHECK(same_coords(end_of(eta.map, eta.product, 0), a));
    CHECK(same_coords(end_of(eta.map, eta.product, 1), a));
    CHECK(same_coords(end_of(eta.map, eta.product, 2), w.tau(a, a, a)));
}

TEST_CASE("operation on classes rel A")
{
    FGAbelianGroup z = Z();
    Tower t(point(), {StageSpec{2, z, KExpr::zero(3, z)}});
    WeakMalcev w(t);
    FiniteSSet x = boundary(3);
    Subcomplex a = Subcomplex::generated_by(x, {x.nerve_simplex({0, 1})});
    RelativeComplex pair(x, a);
    auto h2 = pair.cohomology(2, z);
    CHECK(h2->group().type_string() == "Z");
    std::vector<StageMap> maps;
    for (int k = 1; k <= 3; ++k) {
        StageMap f = base_only(SimplicialMap::constant(x, point(), 0));
        Cochain c = h2->representative(h2->group().generator(0).times(k));
        f.coords.push_back(relabel(c, z));
        std::mt19937 rng(k);
        Cochain e = random_cochain(x, 1, z, rng);
        f = principal_action(f, coboundary(e - mask_to(e, a)));
        maps.push_back(f);
    }
    auto cls = [&](const StageMap& f) { return h2->class_of(f.coords[0]); };
    ClassMalcev t3(w, a);
    StageMap l = t3(maps[0], maps[1], maps[2]);
    CHECK(cls(l) == cls(maps[0]) - cls(maps[1]) + cls(maps[2]));
    CHECK(restrict_to(l.coords[0], a).equals(restrict_to(maps[0].coords[0], a)));
    CHECK(cls(t3(maps[1], maps[1], maps[2])) == cls(maps[2]));
    CHECK(cls(t3.multiple(maps[2], maps[0], 5)) == cls(maps[0]) + (cls(maps[2]) - cls(maps[0])).times(5));
    CHECK(cls(t3.multiple(maps[2], maps[0], -2)) == cls(maps[0]) - (cls(maps[2]) - cls(maps[0])).times(2));
    CHECK(cls(t3.affine(maps, IntVector{Integer(2), Integer(-3), Integer(2)})) ==
          cls(maps[0]).times(2) - cls(maps[1]).times(3) + cls(maps[2]).times(2));

    ClassMalcev free_t(w, Subcomplex::empty(x));
    CHECK(same_coords(free_t(maps[0], maps[1], maps[2]), w.tau(maps[0], maps[1], maps[2])));
}

TEST_CASE("closed-form correctors exist for squares over strict stages")
{
    FGAbelianGroup z = Z(), z2 = FGAbelianGroup::cyclic(2);
    Tower t = s3_tower();
    WeakMalcev w(t);
    CHECK(w.natural(1));
    CHECK(w.natural(2));

    // a square of a non-strict stage falls back to the solved corrector
    KExpr c1 = KExpr::fib(1, 3, z2), c2 = KExpr::fib(2, 4, z2);
    Tower deep(point(), {StageSpec{3, z2, KExpr::zero(4, z2)}, StageSpec{4, z2, KExpr::cup_i(1, c1, c1)},
                         StageSpec{6, z2, KExpr::cup_i(1, c2, c2)}});
    WeakMalcev wd(deep);
    CHECK(wd.natural(2));
    CHECK_FALSE(wd.natural(3));

    // integral squares need odd degree; the mixed product has no closed form
    KExpr a = KExpr::fib(1, 3, z);
    Tower odd(point(), {StageSpec{3, z, KExpr::zero(4, z)}, StageSpec{5, z, KExpr::cup(a, a)}});
    CHECK(WeakMalcev(odd).natural(2));
    KExpr b = KExpr::fib(2, 4, z);
    Tower mixed(point(), {StageSpec{3, z, KExpr::zero(4, z)}, StageSpec{4, z, KExpr::zero(5, z)},
                          StageSpec{6, z, KExpr::cup(a, b)}});
    CHECK_FALSE(WeakMalcev(mixed).natural(3));
}
